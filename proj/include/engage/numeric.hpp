#pragma once

#include <string>
#include <vector>

namespace engage {

// Median with the even-count convention: mean of the two central values.
// The input is copied and sorted.
double median(std::vector<double> values);

// Population variance (divide by n).
double population_variance(const std::vector<double>& values);

double mean(const std::vector<double>& values);

// Type-7 quantile (linear interpolation between order statistics), the
// common spreadsheet/NumPy default. p in [0, 1].
double quantile(std::vector<double> values, double p);

// Natural string ordering: digit runs compare numerically, so "s2" < "s10".
bool natural_less(const std::string& a, const std::string& b);

}  // namespace engage

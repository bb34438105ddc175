#include "engage/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace engage {

double median(std::vector<double> values) {
    if (values.empty()) throw std::runtime_error("median of empty range");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw std::runtime_error("mean of empty range");
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_variance(const std::vector<double>& values) {
    if (values.empty()) throw std::runtime_error("variance of empty range");
    const double m = mean(values);
    double acc = 0.0;
    for (const double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size());
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::runtime_error("quantile of empty range");
    if (p < 0.0 || p > 1.0) throw std::runtime_error("quantile p outside [0,1]");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 1) return values[0];
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t i0 = i, j0 = j;
            while (i < a.size() && std::isdigit(static_cast<unsigned char>(a[i]))) ++i;
            while (j < b.size() && std::isdigit(static_cast<unsigned char>(b[j]))) ++j;
            // Strip leading zeros, then compare by length and lexicographically.
            std::size_t ia = i0, jb = j0;
            while (ia + 1 < i && a[ia] == '0') ++ia;
            while (jb + 1 < j && b[jb] == '0') ++jb;
            const std::size_t la = i - ia, lb = j - jb;
            if (la != lb) return la < lb;
            const int cmp = a.compare(ia, la, b, jb, lb);
            if (cmp != 0) return cmp < 0;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return (a.size() - i) < (b.size() - j);
}

}  // namespace engage

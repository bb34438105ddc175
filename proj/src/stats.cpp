#include "engage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace engage::stats {

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::runtime_error("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_test_p_two_sided(double t, double nu) {
    if (nu <= 0.0) throw std::runtime_error("t test: dof must be > 0");
    if (std::isinf(t)) return 0.0;
    const double x = nu / (nu + t * t);
    return std::clamp(incomplete_beta(nu / 2.0, 0.5, x), 0.0, 1.0);
}

double f_survival(double f, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0) throw std::runtime_error("f_survival: dof must be > 0");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return std::clamp(incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)), 0.0, 1.0);
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues and eigenvectors as rows of V.
void jacobi_eigen(std::vector<std::vector<double>> A, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
    const std::size_t n = A.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    const auto off_diagonal_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) s += A[i][j] * A[i][j];
        }
        return std::sqrt(s);
    };

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(A[i][i]));
    scale = std::max(scale, 1.0);

    for (int sweep = 0; sweep < 100 && off_diagonal_norm() > 1e-12 * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(A[p][q]) < 1e-300) continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A[k][p];
                    const double akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A[p][k];
                    const double aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigenvectors[p][k];
                    const double vkq = eigenvectors[q][k];
                    eigenvectors[p][k] = c * vkp - s * vkq;
                    eigenvectors[q][k] = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = A[i][i];
}

}  // namespace

PcaResult pca_project(const std::vector<std::vector<double>>& X, std::size_t k) {
    const std::size_t n = X.size();
    if (n < 2) throw std::runtime_error("pca: need at least 2 rows");
    const std::size_t d = X[0].size();
    for (const auto& row : X) {
        if (row.size() != d) throw std::runtime_error("pca: ragged input");
        for (const double v : row) {
            if (!std::isfinite(v)) throw std::runtime_error("pca: non-finite value");
        }
    }

    std::vector<double> mu(d, 0.0);
    for (const auto& row : X) {
        for (std::size_t j = 0; j < d; ++j) mu[j] += row[j];
    }
    for (auto& m : mu) m /= static_cast<double>(n);

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& row : X) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = row[i] - mu[i];
            for (std::size_t j = i; j < d; ++j) cov[i][j] += di * (row[j] - mu[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n - 1);
            cov[j][i] = cov[i][j];
        }
    }
    double total_variance = 0.0;
    for (std::size_t i = 0; i < d; ++i) total_variance += cov[i][i];

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
    jacobi_eigen(cov, eigenvalues, eigenvectors);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    PcaResult res;
    const double eigen_floor = 1e-12 * std::max(total_variance, 1.0);
    std::size_t usable = 0;
    for (std::size_t i = 0; i < std::min(k, d); ++i) {
        if (eigenvalues[order[i]] > eigen_floor) ++usable;
    }
    res.rank_limited_to = usable;

    for (std::size_t i = 0; i < usable; ++i) {
        std::vector<double> axis = eigenvectors[order[i]];
        // Deterministic sign: largest-magnitude component positive.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::fabs(axis[j]) > std::fabs(axis[arg])) arg = j;
        }
        if (axis[arg] < 0.0) {
            for (auto& v : axis) v = -v;
        }
        res.axes.push_back(std::move(axis));
        res.explained_variance.push_back(eigenvalues[order[i]]);
        res.explained_fraction.push_back(
            total_variance > 0.0 ? eigenvalues[order[i]] / total_variance : 0.0);
    }

    res.projections.assign(n, std::vector<double>(res.axes.size(), 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < res.axes.size(); ++c) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += (X[r][j] - mu[j]) * res.axes[c][j];
            res.projections[r][c] = dot;
        }
    }
    return res;
}

TestResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::runtime_error("anova: need at least 2 groups");
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw std::runtime_error("anova: each group needs at least 2 values");
        total_n += g.size();
        for (const double v : g) grand_sum += v;
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        double gm = 0.0;
        for (const double v : g) gm += v;
        gm /= static_cast<double>(g.size());
        ss_between += static_cast<double>(g.size()) * (gm - grand_mean) * (gm - grand_mean);
        for (const double v : g) ss_within += (v - gm) * (v - gm);
    }
    const double df_between = static_cast<double>(groups.size()) - 1.0;
    const double df_within = static_cast<double>(total_n - groups.size());

    TestResult res;
    if (ss_within <= 0.0) {
        // All groups internally constant: either no effect or an infinite one.
        res.statistic = ss_between <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        res.p = ss_between <= 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.statistic = (ss_between / df_between) / (ss_within / df_within);
    res.p = f_survival(res.statistic, df_between, df_within);
    return res;
}

TestResult var_ftest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw std::runtime_error("var_ftest: need >= 2 values each");
    const auto sample_var = [](const std::vector<double>& v) {
        double m = 0.0;
        for (const double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (const double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size() - 1);
    };
    const double va = sample_var(a);
    const double vb = sample_var(b);
    if (va <= 0.0 && vb <= 0.0) throw std::runtime_error("var_ftest: both variances are zero");

    double f = 0.0, df1 = 0.0, df2 = 0.0;
    if (va >= vb) {
        if (vb <= 0.0) throw std::runtime_error("var_ftest: zero variance in denominator");
        f = va / vb;
        df1 = static_cast<double>(a.size() - 1);
        df2 = static_cast<double>(b.size() - 1);
    } else {
        if (va <= 0.0) throw std::runtime_error("var_ftest: zero variance in denominator");
        f = vb / va;
        df1 = static_cast<double>(b.size() - 1);
        df2 = static_cast<double>(a.size() - 1);
    }
    TestResult res;
    res.statistic = f;
    res.p = std::min(1.0, 2.0 * f_survival(f, df1, df2));
    return res;
}

std::optional<double> fleiss_kappa(const RaterMatrix& m) {
    if (m.empty() || m[0].empty()) throw std::runtime_error("fleiss_kappa: empty matrix");
    const std::size_t n_items = m.size();
    const std::size_t n_cats = m[0].size();
    int n_raters = 0;
    for (const int c : m[0]) n_raters += c;
    if (n_raters < 2) throw std::runtime_error("fleiss_kappa: need >= 2 raters per item");
    for (const auto& row : m) {
        if (row.size() != n_cats) throw std::runtime_error("fleiss_kappa: ragged matrix");
        int total = 0;
        for (const int c : row) {
            if (c < 0) throw std::runtime_error("fleiss_kappa: negative count");
            total += c;
        }
        if (total != n_raters) {
            throw std::runtime_error("fleiss_kappa: rater count must be constant per item");
        }
    }

    std::vector<double> category_share(n_cats, 0.0);
    double p_bar = 0.0;
    const double nr = static_cast<double>(n_raters);
    for (const auto& row : m) {
        double agree = 0.0;
        for (std::size_t j = 0; j < n_cats; ++j) {
            agree += static_cast<double>(row[j]) * (static_cast<double>(row[j]) - 1.0);
            category_share[j] += static_cast<double>(row[j]);
        }
        p_bar += agree / (nr * (nr - 1.0));
    }
    p_bar /= static_cast<double>(n_items);
    double pe = 0.0;
    for (std::size_t j = 0; j < n_cats; ++j) {
        const double pj = category_share[j] / (static_cast<double>(n_items) * nr);
        pe += pj * pj;
    }
    if (pe >= 1.0) return std::nullopt;
    return (p_bar - pe) / (1.0 - pe);
}

std::vector<double> ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> out(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) out[order[k]] = midrank;
        i = j;
    }
    return out;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::runtime_error("spearman: inputs must be parallel with >= 2 values");
    }
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace engage::stats

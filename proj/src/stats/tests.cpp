#include "akisub/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "akisub/error.hpp"
#include "akisub/stats/distributions.hpp"

namespace akisub::stats {

namespace {

double mean_of(const Sample& s) { return std::accumulate(s.begin(), s.end(), 0.0) / double(s.size()); }

void require_groups(const std::vector<Sample>& groups, std::size_t min_size, const char* who) {
    if (groups.size() < 2) throw ArgumentError(std::string(who) + " needs at least two groups");
    for (const auto& g : groups) {
        if (g.size() < min_size) {
            throw ArgumentError(std::string(who) + " needs at least " + std::to_string(min_size) +
                                " values per group");
        }
    }
}

// Residual sum of squares of y on the columns of x by Householder QR.
// Throws NumericalRankError when a column is (numerically) dependent.
double residual_ss(std::vector<std::vector<double>> cols, std::vector<double> y) {
    const std::size_t n = y.size(), p = cols.size();
    if (p > n) throw NumericalRankError("more model columns than observations");
    for (std::size_t k = 0; k < p; ++k) {
        double scale = 0.0;
        for (double v : cols[k]) scale = std::max(scale, std::abs(v));
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += cols[k][i] * cols[k][i];
        norm = std::sqrt(norm);
        if (scale == 0.0 || norm <= 1e-10 * scale * std::sqrt(double(n))) {
            throw NumericalRankError("design matrix is rank deficient at column " + std::to_string(k));
        }
        const double alpha = cols[k][k] > 0.0 ? -norm : norm;
        std::vector<double> v(n, 0.0);
        for (std::size_t i = k; i < n; ++i) v[i] = cols[k][i];
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        auto reflect = [&](std::vector<double>& a) {
            double d = 0.0;
            for (std::size_t i = k; i < n; ++i) d += v[i] * a[i];
            const double f = 2.0 * d / vnorm2;
            for (std::size_t i = k; i < n; ++i) a[i] -= f * v[i];
        };
        for (std::size_t j = k; j < p; ++j) reflect(cols[j]);
        reflect(y);
    }
    double rss = 0.0;
    for (std::size_t i = p; i < n; ++i) rss += y[i] * y[i];
    return rss;
}

}  // namespace

TestResult chi_square_test(const std::vector<std::vector<double>>& table) {
    const std::size_t r = table.size();
    if (r < 2) throw ArgumentError("chi-square test needs at least 2 rows");
    const std::size_t c = table.front().size();
    if (c < 2) throw ArgumentError("chi-square test needs at least 2 columns");
    std::vector<double> row(r, 0.0), col(c, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        if (table[i].size() != c) throw DimensionError("ragged contingency table");
        for (std::size_t j = 0; j < c; ++j) {
            if (!(table[i][j] >= 0.0)) throw ArgumentError("negative count in contingency table");
            row[i] += table[i][j];
            col[j] += table[i][j];
            total += table[i][j];
        }
    }
    for (double m : row)
        if (m == 0.0) throw ArgumentError("contingency table has a zero row total");
    for (double m : col)
        if (m == 0.0) throw ArgumentError("contingency table has a zero column total");
    double stat = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double e = row[i] * col[j] / total;
            stat += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    TestResult out;
    out.statistic = stat;
    out.dof = double((r - 1) * (c - 1));
    out.p_value = chi_square_sf(stat, out.dof);
    return out;
}

TestResult one_way_anova(const std::vector<Sample>& groups) {
    require_groups(groups, 2, "one-way ANOVA");
    std::size_t n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        n += g.size();
        grand += std::accumulate(g.begin(), g.end(), 0.0);
    }
    grand /= double(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        ssb += double(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ssw += (v - m) * (v - m);
    }
    const double k = double(groups.size());
    TestResult out;
    out.dof = k - 1.0;
    out.dof2 = double(n) - k;
    const double scale = std::max(1.0, std::abs(grand));
    if (ssb <= 1e-24 * scale * scale * double(n)) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    if (ssw == 0.0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    out.statistic = (ssb / out.dof) / (ssw / out.dof2);
    out.p_value = f_sf(out.statistic, out.dof, out.dof2);
    return out;
}

TestResult kruskal_wallis(const std::vector<Sample>& groups) {
    require_groups(groups, 1, "Kruskal-Wallis test");
    struct Obs {
        double value;
        std::size_t group;
    };
    std::vector<Obs> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (double v : groups[g]) pooled.push_back({v, g});
    const std::size_t n = pooled.size();
    std::sort(pooled.begin(), pooled.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });
    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].value == pooled[i].value) ++j;
        const double avg = (double(i + 1) + double(j + 1)) / 2.0;
        const double t = double(j - i + 1);
        tie_term += t * t * t - t;
        for (std::size_t m = i; m <= j; ++m) rank_sum[pooled[m].group] += avg;
        i = j + 1;
    }
    TestResult out;
    out.dof = double(groups.size() - 1);
    const double N = double(n);
    const double correction = 1.0 - tie_term / (N * N * N - N);
    if (correction <= 0.0) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    double h = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) h += rank_sum[g] * rank_sum[g] / double(groups[g].size());
    h = 12.0 / (N * (N + 1.0)) * h - 3.0 * (N + 1.0);
    h = std::max(0.0, h / correction);
    out.statistic = h;
    out.p_value = chi_square_sf(h, out.dof);
    return out;
}

TestResult tukey_hsd(const std::vector<Sample>& groups) {
    require_groups(groups, 2, "Tukey HSD");
    const std::size_t k = groups.size();
    std::size_t n = 0;
    double ssw = 0.0;
    std::vector<double> means;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        means.push_back(m);
        n += g.size();
        for (double v : g) ssw += (v - m) * (v - m);
    }
    const double dfw = double(n - k);
    const double msw = ssw / dfw;
    const double q = tukey_q_critical(k, dfw);
    TestResult out;
    out.dof = double(k);
    out.dof2 = dfw;
    out.statistic = q;
    out.p_value = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double diff = means[i] - means[j];
            const double se = std::sqrt(msw / 2.0 * (1.0 / double(groups[i].size()) + 1.0 / double(groups[j].size())));
            const bool sig = diff != 0.0 && std::abs(diff) > q * se;
            out.pairwise.push_back({i, j, diff, sig});
        }
    return out;
}

TestResult ancova_adjust(const Sample& values, const std::vector<int>& groups, const Sample& covariate) {
    const std::size_t n = values.size();
    if (groups.size() != n || covariate.size() != n) throw DimensionError("ANCOVA inputs differ in length");
    std::vector<int> levels(groups);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() < 2) throw ArgumentError("ANCOVA needs at least two groups");
    std::vector<std::vector<double>> reduced{std::vector<double>(n, 1.0), covariate};
    auto full = reduced;
    for (std::size_t l = 1; l < levels.size(); ++l) {
        std::vector<double> dummy(n);
        for (std::size_t i = 0; i < n; ++i) dummy[i] = groups[i] == levels[l] ? 1.0 : 0.0;
        full.push_back(std::move(dummy));
    }
    const double rss_full = residual_ss(full, values);
    const double rss_red = residual_ss(reduced, values);
    TestResult out;
    out.dof = double(levels.size() - 1);
    out.dof2 = double(n) - double(full.size());
    if (out.dof2 <= 0.0) throw NumericalRankError("ANCOVA has no residual degrees of freedom");
    // a gain at the round-off level of the RSS means the groups add nothing
    const double gain = std::max(0.0, rss_red - rss_full);
    if (gain <= 1e-12 * rss_red) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    if (rss_full == 0.0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    out.statistic = (gain / out.dof) / (rss_full / out.dof2);
    out.p_value = f_sf(out.statistic, out.dof, out.dof2);
    return out;
}

Moments sample_moments(const Sample& s) {
    if (s.size() < 2) return {};
    const double m = mean_of(s);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : s) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double n = double(s.size());
    m2 /= n, m3 /= n, m4 /= n;
    if (m2 == 0.0) {
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

Route normality_route(const Sample& sample) {
    if (sample.size() < 8) return Route::nonparametric;
    const Moments m = sample_moments(sample);
    if (std::isnan(m.skewness)) return Route::nonparametric;
    return std::abs(m.skewness) < 1.0 && std::abs(m.excess_kurtosis) < 2.0 ? Route::parametric
                                                                           : Route::nonparametric;
}

}  // namespace akisub::stats

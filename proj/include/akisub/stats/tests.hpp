#pragma once

#include <cstddef>
#include <vector>

namespace akisub::stats {

using Sample = std::vector<double>;

struct PairwiseResult {
    std::size_t group_i = 0;
    std::size_t group_j = 0;
    double mean_difference = 0.0;
    bool significant = false;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;   // numerator / chi-square dof
    double dof2 = 0.0;  // denominator dof for F tests
    std::vector<PairwiseResult> pairwise;
};

/// Pearson chi-square on an r x c count table. Throws ArgumentError on a zero
/// row or column total.
TestResult chi_square_test(const std::vector<std::vector<double>>& table);

/// Requires >= 2 groups of >= 2 values. Zero within-group variance gives
/// p = 1 when all means agree and F = inf, p = 0 otherwise.
TestResult one_way_anova(const std::vector<Sample>& groups);

/// H with tie correction, chi-square approximation on k - 1 dof. A single
/// shared value everywhere gives H = 0, p = 1.
TestResult kruskal_wallis(const std::vector<Sample>& groups);

/// All-pairs comparison at alpha = 0.05 using the tabulated studentized range.
/// Throws ArgumentError for a group with fewer than 2 values.
TestResult tukey_hsd(const std::vector<Sample>& groups);

/// Nested least-squares F-test of the group block in value ~ covariate +
/// group dummies against value ~ covariate. Throws NumericalRankError when
/// the full design is rank deficient.
TestResult ancova_adjust(const Sample& values, const std::vector<int>& groups, const Sample& covariate);

enum class Route { parametric, nonparametric };

struct Moments {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};
Moments sample_moments(const Sample& sample);

/// Parametric when n >= 8, |skewness| < 1 and |excess kurtosis| < 2.
Route normality_route(const Sample& sample);

}  // namespace akisub::stats

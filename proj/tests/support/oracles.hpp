#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code path it is meant to check.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"
#include "akisub/numeric/tape.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::oracle {

using Rng = std::mt19937_64;

// ---- finite differences ----------------------------------------------------

/// |a - n| / max(|a|, |n|, floor). The floor keeps near-zero entries from
/// turning round-off of the central difference into a huge ratio.
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheck {
    double max_rel_error = 0.0;
    std::string worst;  // "<param>[<index>]"
    std::size_t checked = 0;
};

/// Central differences of `loss` over every scalar of every parameter,
/// compared with `analytic` (same order and shapes as params). Parameters are
/// restored afterwards.
GradCheck check_gradients(numeric::ParameterSet& params, const std::vector<numeric::Tensor>& analytic,
                          const std::function<double()>& loss, double step = 1e-5);

/// Same, over a flat vector of scalars.
GradCheck check_gradients(std::vector<double>& x, const std::vector<double>& analytic,
                          const std::function<double()>& loss, double step = 1e-5);

// ---- KDIGO -----------------------------------------------------------------

struct KdigoTruth {
    bool is_case = false;
    std::optional<double> onset;
    std::optional<int> stage;
};

/// Brute force over every SCr pair, every in-window SCr point against the
/// lookback baseline and every contiguous run of low urine observations.
/// Window is (start, end].
KdigoTruth kdigo_oracle(const cohort::EventSeries& scr, const cohort::EventSeries& urine_rate, double start,
                        double end, bool rrt, double lookback_hours = 168.0);

/// Minimum over [start - lookback, start), else first at/after start, else
/// the last measurement.
std::optional<double> baseline_oracle(const cohort::EventSeries& scr, double start, double lookback_hours = 168.0);

struct Trajectory {
    cohort::EventSeries scr;
    cohort::EventSeries urine_rate;
    double start = 24.0;
    double end = 192.0;
    bool rrt = false;
};

/// Random SCr and urine-rate series on a 0.5 h / 0.05 unit grid so that
/// boundary cases (exactly 48 h apart, exactly 6 h runs, exact ratios) occur.
Trajectory random_trajectory(Rng& rng);

// ---- metrics ---------------------------------------------------------------

/// Pairwise counting: (wins + ties / 2) / (P * N), evaluated exactly.
double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels);

// ---- statistics ------------------------------------------------------------

/// One-way ANOVA F by the textbook sums of squares.
double anova_f(const std::vector<std::vector<double>>& groups);

/// Nested least-squares F of the group block given an intercept and the
/// covariate, via Householder QR.
double ancova_f(const std::vector<double>& values, const std::vector<int>& groups,
                const std::vector<double>& covariate);

/// Monte-Carlo tail probabilities from standard normal draws.
double mc_chi_square_sf(double x, int dof, std::size_t draws, Rng& rng);
double mc_f_sf(double f, int d1, int d2, std::size_t draws, Rng& rng);
double mc_normal_cdf(double z, std::size_t draws, Rng& rng);
/// P(Q >= q) for the studentized range of k means with `dof` error dof.
double mc_studentized_range_sf(double q, int k, int dof, std::size_t draws, Rng& rng);

/// P(F >= f_obs) for ANOVA on Gaussian null data with the given group sizes.
double mc_anova_p(const std::vector<std::size_t>& sizes, double f_obs, std::size_t draws, Rng& rng);

/// P(F >= f_obs) for the ANCOVA group block on Gaussian null data with the
/// given design (the covariate effect is irrelevant to the null law).
double mc_ancova_p(const std::vector<int>& groups, const std::vector<double>& covariate, double f_obs,
                   std::size_t draws, Rng& rng);

// ---- clustering ------------------------------------------------------------

/// Minimum inertia over all partitions of the rows into exactly k non-empty
/// groups (exhaustive; n <= 10).
double exhaustive_min_inertia(const numeric::Tensor& x, std::size_t k);

}  // namespace akisub::oracle

#pragma once

#include <cstddef>

namespace akisub::stats {

/// Upper tail P(X >= x) of a chi-square variable with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

/// Upper tail P(F >= f) of an F(d1, d2) variable.
double f_sf(double f, double d1, double d2);

double normal_cdf(double z);

/// Critical value of the studentized range for alpha = 0.05, k in [2, 10]
/// groups and `dof` error degrees of freedom (>= 2; infinity allowed).
/// Tabulated values are interpolated linearly in 1 / dof.
double tukey_q_critical(std::size_t k, double dof);

}  // namespace akisub::stats

#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace akisub::oracle {

double relative_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

GradCheck check_gradients(numeric::ParameterSet& params, const std::vector<numeric::Tensor>& analytic,
                          const std::function<double()>& loss, double step) {
    GradCheck out;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& values = params.value(p).storage();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + step;
            const double up = loss();
            values[i] = saved - step;
            const double down = loss();
            values[i] = saved;
            const double err = relative_error(analytic[p][i], (up - down) / (2.0 * step));
            ++out.checked;
            if (err > out.max_rel_error) {
                out.max_rel_error = err;
                out.worst = params.name(p) + "[" + std::to_string(i) + "]";
            }
        }
    }
    return out;
}

GradCheck check_gradients(std::vector<double>& x, const std::vector<double>& analytic,
                          const std::function<double()>& loss, double step) {
    GradCheck out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double up = loss();
        x[i] = saved - step;
        const double down = loss();
        x[i] = saved;
        const double err = relative_error(analytic[i], (up - down) / (2.0 * step));
        ++out.checked;
        if (err > out.max_rel_error) {
            out.max_rel_error = err;
            out.worst = "x[" + std::to_string(i) + "]";
        }
    }
    return out;
}

// ---- KDIGO -----------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

bool in_window(double t, double start, double end) { return t > start && t <= end; }

// Earliest in-window SCr time j with some earlier i, t_j - t_i <= 48, rise >= 0.3
// and value_j >= floor.
double scr_pairs(const cohort::EventSeries& scr, double start, double end, double floor) {
    double best = kInf;
    const auto& p = scr.points;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j].offset_hours <= p[i].offset_hours) continue;
            if (p[j].offset_hours - p[i].offset_hours > 48.0) continue;
            if (p[j].value - p[i].value < 0.3 - kTol) continue;
            if (p[j].value < floor) continue;
            if (in_window(p[j].offset_hours, start, end)) best = std::min(best, p[j].offset_hours);
        }
    return best;
}

double scr_ratio(const cohort::EventSeries& scr, double start, double end, std::optional<double> base,
                 double ratio) {
    if (!base) return kInf;
    double best = kInf;
    for (const auto& p : scr.points)
        if (in_window(p.offset_hours, start, end) && p.value >= ratio * *base - kTol)
            best = std::min(best, p.offset_hours);
    return best;
}

// Every contiguous run a..b of observations below the threshold covers
// [t_a, E] with E the next observation (or t_b at the end of the series). The
// clause holds on [t_a + hours, E]; candidate instants are t_a + hours and
// every urine observation time.
double urine_runs(const cohort::EventSeries& u, double start, double end, double threshold, double hours) {
    double best = kInf;
    const auto& p = u.points;
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = a; b < p.size(); ++b) {
            bool low = true;
            for (std::size_t m = a; m <= b; ++m) low = low && p[m].value < threshold;
            if (!low) break;
            const double cover_end = b + 1 < p.size() ? p[b + 1].offset_hours : p[b].offset_hours;
            const double from = p[a].offset_hours + hours;
            std::vector<double> candidates{from};
            for (const auto& q : p) candidates.push_back(q.offset_hours);
            for (double tau : candidates)
                if (tau >= from && tau <= cover_end && in_window(tau, start, end)) best = std::min(best, tau);
        }
    }
    return best;
}

}  // namespace

std::optional<double> baseline_oracle(const cohort::EventSeries& scr, double start, double lookback_hours) {
    if (scr.points.empty()) return std::nullopt;
    std::optional<double> lo;
    for (const auto& p : scr.points)
        if (p.offset_hours >= start - lookback_hours && p.offset_hours < start)
            lo = lo ? std::min(*lo, p.value) : p.value;
    if (lo) return lo;
    for (const auto& p : scr.points)
        if (p.offset_hours >= start) return p.value;
    return scr.points.back().value;
}

KdigoTruth kdigo_oracle(const cohort::EventSeries& scr, const cohort::EventSeries& urine, double start,
                        double end, bool rrt, double lookback_hours) {
    const auto base = baseline_oracle(scr, start, lookback_hours);
    const double onset = std::min({scr_pairs(scr, start, end, -kInf), scr_ratio(scr, start, end, base, 1.5),
                                   urine_runs(urine, start, end, 0.5, 6.0)});
    KdigoTruth t;
    if (onset == kInf) return t;
    t.is_case = true;
    t.onset = onset;
    int stage = 1;
    if (scr_ratio(scr, start, end, base, 2.0) < kInf) stage = 2;
    if (urine_runs(urine, start, end, 0.5, 12.0) < kInf) stage = std::max(stage, 2);
    if (scr_ratio(scr, start, end, base, 3.0) < kInf) stage = 3;
    if (scr_pairs(scr, start, end, 4.0) < kInf) stage = 3;
    if (urine_runs(urine, start, end, 0.3, 24.0) < kInf) stage = 3;
    if (urine_runs(urine, start, end, 0.01, 12.0) < kInf) stage = 3;
    if (rrt) stage = 3;
    t.stage = stage;
    return t;
}

Trajectory random_trajectory(Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto grid_time = [&](double lo, double hi) { return std::round((lo + (hi - lo) * unit(rng)) * 2.0) / 2.0; };
    Trajectory t;
    t.start = unit(rng) < 0.5 ? 24.0 : 48.0;
    t.end = t.start + 168.0;
    t.rrt = unit(rng) < 0.05;

    std::vector<double> times;
    const int n_scr = static_cast<int>(unit(rng) * 14);
    while (static_cast<int>(times.size()) < n_scr) {
        const double x = grid_time(0.0, t.end + 12.0);
        if (std::find(times.begin(), times.end(), x) == times.end()) times.push_back(x);
    }
    std::sort(times.begin(), times.end());
    t.scr.variable = "Creatinine";
    double level = 0.6 + 0.05 * std::floor(unit(rng) * 16);
    for (double x : times) {
        const double r = unit(rng);
        if (r < 0.3) level += 0.05 * std::floor(unit(rng) * 8);       // rise
        else if (r < 0.45) level -= 0.05 * std::floor(unit(rng) * 5);  // recovery
        else if (r < 0.5) level += 1.0 + 0.05 * std::floor(unit(rng) * 30);
        level = std::max(0.3, std::round(level * 20.0) / 20.0);
        t.scr.points.push_back({x, level});
    }

    t.urine_rate.variable = "Urine";
    const int n_u = static_cast<int>(unit(rng) * 40);
    const double levels[] = {0.005, 0.2, 0.29, 0.3, 0.45, 0.5, 0.8, 1.5};
    double x = grid_time(0.0, 6.0);
    double rate = levels[static_cast<int>(unit(rng) * 8)];
    for (int i = 0; i < n_u && x < t.end + 12.0; ++i) {
        if (unit(rng) < 0.3) rate = levels[static_cast<int>(unit(rng) * 8)];
        t.urine_rate.points.push_back({x, rate});
        const double gaps[] = {0.5, 1.0, 2.0, 3.0, 6.0, 12.0};
        x += gaps[static_cast<int>(unit(rng) * 6)];
    }
    return t;
}

// ---- metrics ---------------------------------------------------------------

double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
    unsigned long long twice_wins = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1) ++pos;
        else ++neg;
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            if (scores[i] > scores[j]) twice_wins += 2;
            else if (scores[i] == scores[j]) twice_wins += 1;
        }
    }
    return static_cast<double>(static_cast<long double>(twice_wins) / (2.0L * pos * neg));
}

// ---- statistics ------------------------------------------------------------

double anova_f(const std::vector<std::vector<double>>& groups) {
    std::size_t n = 0;
    double total = 0.0;
    for (const auto& g : groups)
        for (double v : g) {
            total += v;
            ++n;
        }
    const double grand = total / double(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double m = 0.0;
        for (double v : g) m += v;
        m /= double(g.size());
        ssb += double(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ssw += (v - m) * (v - m);
    }
    const double k = double(groups.size());
    return (ssb / (k - 1.0)) / (ssw / (double(n) - k));
}

namespace {

struct NestedDesign {
    Eigen::MatrixXd resid_full;     // I - P_full
    Eigen::MatrixXd resid_reduced;  // I - P_reduced
    int d1 = 0;
    int d2 = 0;
};

Eigen::MatrixXd residual_maker(const Eigen::MatrixXd& x) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
    return Eigen::MatrixXd::Identity(x.rows(), x.rows()) - q * q.transpose();
}

NestedDesign nested_design(const std::vector<int>& groups, const std::vector<double>& covariate) {
    std::vector<int> levels(groups);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const Eigen::Index n = static_cast<Eigen::Index>(groups.size());
    Eigen::MatrixXd reduced(n, 2), full(n, 1 + static_cast<Eigen::Index>(levels.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        reduced(i, 0) = full(i, 0) = 1.0;
        reduced(i, 1) = full(i, 1) = covariate[i];
        for (std::size_t l = 1; l < levels.size(); ++l)
            full(i, 1 + static_cast<Eigen::Index>(l)) = groups[i] == levels[l] ? 1.0 : 0.0;
    }
    NestedDesign d;
    d.resid_full = residual_maker(full);
    d.resid_reduced = residual_maker(reduced);
    d.d1 = static_cast<int>(levels.size()) - 1;
    d.d2 = static_cast<int>(n - full.cols());
    return d;
}

double nested_f(const NestedDesign& d, const Eigen::VectorXd& y) {
    const double rss_full = y.dot(d.resid_full * y);
    const double rss_red = y.dot(d.resid_reduced * y);
    return ((rss_red - rss_full) / d.d1) / (rss_full / d.d2);
}

double chi_square_draw(int dof, Rng& rng) {
    std::normal_distribution<double> z;
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
        const double v = z(rng);
        s += v * v;
    }
    return s;
}

}  // namespace

double ancova_f(const std::vector<double>& values, const std::vector<int>& groups,
                const std::vector<double>& covariate) {
    const auto d = nested_design(groups, covariate);
    return nested_f(d, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

double mc_chi_square_sf(double x, int dof, std::size_t draws, Rng& rng) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) hits += chi_square_draw(dof, rng) >= x;
    return double(hits) / double(draws);
}

double mc_f_sf(double f, int d1, int d2, std::size_t draws, Rng& rng) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double a = chi_square_draw(d1, rng) / d1;
        const double b = chi_square_draw(d2, rng) / d2;
        hits += a / b >= f;
    }
    return double(hits) / double(draws);
}

double mc_normal_cdf(double z, std::size_t draws, Rng& rng) {
    std::normal_distribution<double> g;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) hits += g(rng) <= z;
    return double(hits) / double(draws);
}

double mc_studentized_range_sf(double q, int k, int dof, std::size_t draws, Rng& rng) {
    std::normal_distribution<double> g;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        double lo = kInf, hi = -kInf;
        for (int j = 0; j < k; ++j) {
            const double v = g(rng);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double s = std::sqrt(chi_square_draw(dof, rng) / dof);
        hits += (hi - lo) / s >= q;
    }
    return double(hits) / double(draws);
}

double mc_anova_p(const std::vector<std::size_t>& sizes, double f_obs, std::size_t draws, Rng& rng) {
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> groups(sizes.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            groups[k].resize(sizes[k]);
            for (double& v : groups[k]) v = g(rng);
        }
        hits += anova_f(groups) >= f_obs;
    }
    return double(hits) / double(draws);
}

double mc_ancova_p(const std::vector<int>& groups, const std::vector<double>& covariate, double f_obs,
                   std::size_t draws, Rng& rng) {
    const auto d = nested_design(groups, covariate);
    std::normal_distribution<double> g;
    Eigen::VectorXd y(static_cast<Eigen::Index>(groups.size()));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        for (Eigen::Index r = 0; r < y.size(); ++r) y(r) = g(rng);
        hits += nested_f(d, y) >= f_obs;
    }
    return double(hits) / double(draws);
}

// ---- clustering ------------------------------------------------------------

namespace {

double partition_inertia(const numeric::Tensor& x, const std::vector<int>& labels, std::size_t k) {
    const std::size_t d = x.cols();
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> mean(d, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (labels[i] != int(c)) continue;
            ++count;
            for (std::size_t j = 0; j < d; ++j) mean[j] += x.at(i, j);
        }
        if (count == 0) return kInf;
        for (double& m : mean) m /= double(count);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (labels[i] != int(c)) continue;
            for (std::size_t j = 0; j < d; ++j) total += (x.at(i, j) - mean[j]) * (x.at(i, j) - mean[j]);
        }
    }
    return total;
}

}  // namespace

double exhaustive_min_inertia(const numeric::Tensor& x, std::size_t k) {
    const std::size_t n = x.rows();
    std::vector<int> labels(n, 0);
    double best = kInf;
    // odometer over k^n labelings
    while (true) {
        best = std::min(best, partition_inertia(x, labels, k));
        std::size_t i = 0;
        while (i < n && labels[i] == int(k) - 1) labels[i++] = 0;
        if (i == n) break;
        ++labels[i];
    }
    return best;
}

}  // namespace akisub::oracle

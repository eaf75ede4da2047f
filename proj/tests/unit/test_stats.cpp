#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "akisub/cohort/generator.hpp"
#include "akisub/error.hpp"
#include "akisub/stats/distributions.hpp"
#include "akisub/stats/report.hpp"
#include "akisub/stats/tests.hpp"
#include "oracles.hpp"

using namespace akisub;
using namespace akisub::stats;
using oracle::Rng;

namespace {

// Monte-Carlo references sit in the tails (p near 0.01 or 0.99) where the
// binomial SE of 100k draws is ~3e-4, so a 1e-3 band is over 3 SE.
constexpr std::size_t kDraws = 100000;

std::vector<Sample> noisy_groups(const std::vector<std::size_t>& sizes, double shift, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g;
    std::vector<Sample> out(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k)
        for (std::size_t i = 0; i < sizes[k]; ++i) out[k].push_back(g(rng) + shift * double(k));
    return out;
}

// Smallest planted shift whose ANOVA p drops to `target`.
double shift_for(const std::vector<std::size_t>& sizes, std::uint64_t seed, double target) {
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (one_way_anova(noisy_groups(sizes, mid, seed)).p_value > target ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("chi-square examples") {
    const auto zero = chi_square_test({{10, 20}, {10, 20}});
    CHECK(zero.statistic == doctest::Approx(0.0));
    CHECK(zero.p_value == doctest::Approx(1.0));

    const auto r = chi_square_test({{10, 20}, {20, 10}});
    CHECK(r.statistic == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
    CHECK(r.dof == 1.0);
    CHECK(std::abs(r.p_value - 0.0098) < 1e-4);

    CHECK(chi_square_test({{1, 2}, {3, 4}, {5, 6}}).dof == 2.0);
    CHECK_THROWS_AS(chi_square_test({{0, 0}, {1, 2}}), ArgumentError);
    CHECK_THROWS_AS(chi_square_test({{0, 3}, {0, 2}}), ArgumentError);
}

TEST_CASE("chi-square is invariant to row and column permutation") {
    const std::vector<std::vector<double>> t{{12, 5, 9}, {3, 14, 7}, {8, 8, 2}};
    const auto base = chi_square_test(t);
    std::vector<std::size_t> rows{0, 1, 2}, cols{0, 1, 2};
    do {
        do {
            std::vector<std::vector<double>> p(3, std::vector<double>(3));
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) p[i][j] = t[rows[i]][cols[j]];
            const auto r = chi_square_test(p);
            CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
            CHECK(r.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
        } while (std::next_permutation(cols.begin(), cols.end()));
    } while (std::next_permutation(rows.begin(), rows.end()));
}

TEST_CASE("anova examples") {
    const auto same = one_way_anova({{1, 2, 3}, {1, 2, 3}});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const auto far = one_way_anova({{1, 2, 3}, {101, 102, 103}});
    CHECK(far.statistic == doctest::Approx(15000.0).epsilon(1e-12));
    CHECK(far.p_value < 1e-6);
    CHECK(far.dof == 1.0);
    CHECK(far.dof2 == 4.0);

    CHECK(one_way_anova({{2, 2}, {2, 2}}).p_value == 1.0);
    CHECK_THROWS_AS(one_way_anova({{1, 2, 3}}), ArgumentError);
    CHECK_THROWS_AS(one_way_anova({{1, 2}, {3}}), ArgumentError);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto groups = noisy_groups({5, 8, 6, 4}, 0.4, seed);
        CHECK(one_way_anova(groups).statistic == doctest::Approx(oracle::anova_f(groups)).epsilon(1e-10));
    }
}

TEST_CASE("anova p against a Monte-Carlo null") {
    Rng rng(21);
    const std::vector<std::size_t> sizes{5, 7, 6};
    for (double target : {0.005, 0.01, 0.02}) {
        const auto groups = noisy_groups(sizes, shift_for(sizes, 3, target), 3);
        const auto r = one_way_anova(groups);
        const double mc = oracle::mc_anova_p(sizes, r.statistic, kDraws, rng);
        CAPTURE(target);
        CHECK(std::abs(r.p_value - mc) <= 1e-3);
    }
}

TEST_CASE("kruskal-wallis examples") {
    const auto r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
    CHECK(r.statistic == doctest::Approx(7.2).epsilon(1e-12));
    CHECK(std::abs(r.p_value - 0.0273) < 1e-4);
    CHECK(r.dof == 2.0);

    const auto flat = kruskal_wallis({{4, 4, 4}, {4, 4}});
    CHECK(flat.statistic == 0.0);
    CHECK(flat.p_value == 1.0);
    const auto same = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
    CHECK(same.statistic == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));

    const auto null = noisy_groups({40, 40, 40}, 0.0, 5);
    CHECK(kruskal_wallis(null).p_value > 0.05);
}

TEST_CASE("kruskal-wallis is invariant to monotone transforms") {
    auto groups = noisy_groups({7, 9, 5}, 0.5, 8);
    groups[1][2] = groups[0][0];  // a tie
    const auto base = kruskal_wallis(groups);
    for (auto f : {+[](double v) { return std::exp(v); }, +[](double v) { return v * v * v + 4.0 * v; },
                   +[](double v) { return -1.0 / (1.0 + std::exp(-v)); }}) {
        auto t = groups;
        for (auto& g : t)
            for (double& v : g) v = f(v);
        const auto r = kruskal_wallis(t);
        CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
    }
}

TEST_CASE("tukey hsd") {
    const auto r = tukey_hsd({{1, 2, 3}, {2, 3, 4}, {10, 11, 12}});
    REQUIRE(r.pairwise.size() == 3);
    for (const auto& p : r.pairwise) CHECK(p.significant == (p.group_j == 2 || p.group_i == 2));

    const auto same = tukey_hsd({{1, 2, 3}, {1, 2, 3}});
    REQUIRE(same.pairwise.size() == 1);
    CHECK_FALSE(same.pairwise[0].significant);

    CHECK(tukey_hsd(noisy_groups({4, 4, 4, 4, 4}, 0.1, 2)).pairwise.size() == 10);
    CHECK_THROWS_AS(tukey_hsd({{1, 2}, {3}}), ArgumentError);

    // seeded outlier group: exactly its two pairs
    auto groups = noisy_groups({10, 10, 10}, 0.0, 9);
    for (double& v : groups[1]) v += 25.0;
    for (const auto& p : tukey_hsd(groups).pairwise) CHECK(p.significant == (p.group_i == 1 || p.group_j == 1));

    // significant pairs always have a nonzero mean difference
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto g = noisy_groups({5, 5, 5, 5}, 0.8, seed);
        g[3] = g[0];
        for (const auto& p : tukey_hsd(g).pairwise)
            if (p.significant) CHECK(p.mean_difference != 0.0);
    }
}

TEST_CASE("ancova") {
    Rng rng(4);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> age(30, 90);

    SUBCASE("statistic matches a QR oracle") {
        for (int rep = 0; rep < 10; ++rep) {
            Sample v, c;
            std::vector<int> lab;
            for (int i = 0; i < 30; ++i) {
                lab.push_back(i % 3);
                c.push_back(age(rng));
                v.push_back(0.02 * c.back() + 0.3 * (i % 3) + g(rng));
            }
            CHECK(ancova_adjust(v, lab, c).statistic == doctest::Approx(oracle::ancova_f(v, lab, c)).epsilon(1e-9));
        }
    }
    SUBCASE("identical groups") {
        Sample v, c;
        std::vector<int> lab;
        for (int k = 0; k < 2; ++k)
            for (double a : {40.0, 55.0, 61.0, 73.0}) {
                lab.push_back(k);
                c.push_back(a);
                v.push_back(0.1 * a + (a == 55.0 ? 1.0 : 0.0));
            }
        const auto r = ancova_adjust(v, lab, c);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
    SUBCASE("uncorrelated covariate leaves the p close to anova") {
        Sample v, c;
        std::vector<int> lab;
        std::vector<Sample> groups(3);
        for (int i = 0; i < 90; ++i) {
            lab.push_back(i % 3);
            c.push_back(age(rng));
            v.push_back(0.35 * (i % 3) + g(rng));
            groups[i % 3].push_back(v.back());
        }
        CHECK(std::abs(ancova_adjust(v, lab, c).p_value - one_way_anova(groups).p_value) < 0.05);
    }
    SUBCASE("a planted age confounder") {
        Sample v, c;
        std::vector<int> lab;
        std::vector<Sample> groups(2);
        for (int i = 0; i < 80; ++i) {
            const int k = i % 2;
            lab.push_back(k);
            c.push_back((k ? 70.0 : 45.0) + 5.0 * g(rng));
            v.push_back(0.1 * c.back() + 0.5 * g(rng));
            groups[k].push_back(v.back());
        }
        CHECK(one_way_anova(groups).p_value < 0.01);
        CHECK(ancova_adjust(v, lab, c).p_value > 0.1);
    }
    SUBCASE("shuffled labels") {
        Sample v, c;
        std::vector<int> lab;
        for (int i = 0; i < 60; ++i) {
            lab.push_back(i % 3);
            c.push_back(age(rng));
            v.push_back(0.03 * c.back() + 0.6 * (i % 3) + g(rng));
        }
        std::vector<double> ps;
        for (int s = 0; s < 100; ++s) {
            std::shuffle(lab.begin(), lab.end(), rng);
            ps.push_back(ancova_adjust(v, lab, c).p_value);
        }
        std::nth_element(ps.begin(), ps.begin() + 50, ps.end());
        CHECK(ps[50] >= 0.25);
        CHECK(ps[50] <= 0.75);
    }
    SUBCASE("p against a Monte-Carlo null") {
        Sample c;
        std::vector<int> lab;
        for (int i = 0; i < 24; ++i) {
            lab.push_back(i % 3);
            c.push_back(age(rng));
        }
        Sample noise;
        for (int i = 0; i < 24; ++i) noise.push_back(g(rng));
        auto values_for = [&](double shift) {
            Sample v;
            for (int i = 0; i < 24; ++i) v.push_back(0.05 * c[i] + shift * lab[i] + noise[i]);
            return v;
        };
        for (double target : {0.005, 0.01, 0.02}) {
            double lo = 0.0, hi = 10.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (ancova_adjust(values_for(mid), lab, c).p_value > target ? lo : hi) = mid;
            }
            const auto r = ancova_adjust(values_for(hi), lab, c);
            CAPTURE(target);
            CHECK(std::abs(r.p_value - oracle::mc_ancova_p(lab, c, r.statistic, kDraws, rng)) <= 1e-3);
        }
    }
    SUBCASE("rank deficient design") {
        const Sample v{1, 2, 3, 4, 5, 6};
        const std::vector<int> lab{0, 0, 0, 1, 1, 1};
        const Sample c{0, 0, 0, 1, 1, 1};
        CHECK_THROWS_AS(ancova_adjust(v, lab, c), NumericalRankError);
    }
}

TEST_CASE("distribution tails against Monte-Carlo") {
    Rng rng(77);
    SUBCASE("chi-square") {
        const std::vector<std::pair<double, int>> pts{{6.635, 1}, {9.210, 2}, {0.115, 3}, {0.297, 4}, {15.086, 5}};
        for (auto [x, dof] : pts) {
            CAPTURE(x);
            CHECK(std::abs(chi_square_sf(x, dof) - oracle::mc_chi_square_sf(x, dof, kDraws, rng)) <= 1e-3);
        }
    }
    SUBCASE("F") {
        const std::vector<std::array<double, 3>> pts{
            {7.559, 2, 10}, {4.938, 3, 20}, {4.018, 4, 30}, {16.26, 1, 5}, {0.01005, 2, 10}};
        for (auto [f, a, b] : pts) {
            CAPTURE(f);
            CHECK(std::abs(f_sf(f, a, b) - oracle::mc_f_sf(f, int(a), int(b), kDraws, rng)) <= 1e-3);
        }
    }
    SUBCASE("normal") {
        for (double z : {-2.326, -2.576, 2.326, 3.0, -3.09}) {
            CAPTURE(z);
            CHECK(std::abs(normal_cdf(z) - oracle::mc_normal_cdf(z, kDraws, rng)) <= 1e-3);
        }
    }
    SUBCASE("studentized range critical values") {
        // the table sits at alpha = 0.05, where 100k draws only give an SE of
        // 7e-4; a million draws bring it to 2.2e-4
        const std::vector<std::pair<int, double>> pts{{2, 5}, {3, 10}, {5, 20}, {4, 60}, {3, 27}};
        for (auto [k, dof] : pts) {
            CAPTURE(k);
            CAPTURE(dof);
            const double q = tukey_q_critical(k, dof);
            CHECK(std::abs(oracle::mc_studentized_range_sf(q, k, int(dof), 10 * kDraws, rng) - 0.05) <= 1e-3);
        }
    }
    for (double x : {0.0, 0.5, 3.0, 40.0}) {
        CHECK(chi_square_sf(x, 2) >= 0.0);
        CHECK(chi_square_sf(x, 2) <= 1.0);
        CHECK(f_sf(x, 2, 7) <= 1.0);
    }
}

TEST_CASE("normality routing") {
    Rng rng(3);
    std::normal_distribution<double> g;
    Sample normal, lognormal;
    for (int i = 0; i < 500; ++i) {
        normal.push_back(g(rng));
        lognormal.push_back(std::exp(g(rng)));
    }
    CHECK(normality_route(normal) == Route::parametric);
    CHECK(normality_route(lognormal) == Route::nonparametric);
    CHECK(normality_route(Sample(50, 3.0)) == Route::nonparametric);
    CHECK(normality_route({1, 2, 3, 4}) == Route::nonparametric);

    const auto m = sample_moments({1, 2, 3, 4, 5});
    CHECK(m.skewness == doctest::Approx(0.0));
    CHECK(m.excess_kurtosis == doctest::Approx(-1.3));
}

TEST_CASE("subtype report") {
    cohort::CohortConfig cfg;
    cfg.n_stays = 300;
    cfg.case_fraction = 0.9;
    cfg.seed = 5;
    std::vector<cohort::IcuStay> cases;
    std::vector<int> clusters;
    for (auto& s : cohort::generate_cohort(cfg)) {
        if (!s.planted_subtype) continue;
        clusters.push_back(*s.planted_subtype - 1);
        cases.push_back(std::move(s));
    }
    REQUIRE(cases.size() > 100);

    const auto rep = build_subtype_report(cases, clusters);
    CHECK(rep.k == 3);
    CHECK(rep.rows.size() == report_variable_names().size());
    CHECK(std::accumulate(rep.cluster_sizes.begin(), rep.cluster_sizes.end(), std::size_t{0}) == cases.size());
    for (const auto& row : rep.rows) {
        if (row.p_unadjusted) {
            CHECK(*row.p_unadjusted >= 0.0);
            CHECK(*row.p_unadjusted <= 1.0);
        }
        if (row.variable == "age") CHECK_FALSE(row.p_adjusted.has_value());
        if (row.variable == "Creatinine" || row.variable == "eGFR") {
            CAPTURE(row.variable);
            REQUIRE(row.p_unadjusted);
            REQUIRE(row.p_adjusted);
            CHECK(*row.p_unadjusted < 0.001);
            CHECK(*row.p_adjusted < 0.001);
        }
    }

    const auto one = build_subtype_report(cases, std::vector<int>(cases.size(), 0));
    CHECK(one.k == 1);
    for (const auto& row : one.rows) {
        CHECK_FALSE(row.p_unadjusted.has_value());
        CHECK_FALSE(row.p_adjusted.has_value());
    }

    auto gap = clusters;
    for (int& c : gap) c = c == 1 ? 2 : c;
    CHECK_THROWS_AS(build_subtype_report(cases, gap), ArgumentError);
}

TEST_CASE("stage composition") {
    const std::vector<int> clusters{0, 0, 0, 1, 1, 2, 2, 2, 2};
    const std::vector<int> stages{1, 1, 2, 3, 3, 2, 2, 1, 3};
    const auto c = stage_composition(clusters, stages, 3);
    CHECK(c.counts[0] == std::array<std::size_t, 3>{2, 1, 0});
    CHECK(c.modal_stage == std::vector<int>{1, 3, 2});
    CHECK(c.modal_share[2] == doctest::Approx(0.5));
    for (const auto& row : c.percent) CHECK(row[0] + row[1] + row[2] == doctest::Approx(100.0).epsilon(1e-4));

    const auto single = stage_composition(std::vector<int>(4, 0), {1, 2, 2, 3}, 1);
    CHECK(single.counts[0][0] + single.counts[0][1] + single.counts[0][2] == 4);
    CHECK_THROWS_AS(stage_composition({0, 0}, {1, 4}, 1), DataError);
}

#include "akisub/stats/distributions.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "akisub/error.hpp"

namespace akisub::stats {

double chi_square_sf(double x, double dof) {
    if (!(dof > 0.0)) throw ArgumentError("chi-square degrees of freedom must be positive");
    if (std::isnan(x)) throw ArgumentError("chi-square statistic is NaN");
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double f_sf(double f, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw ArgumentError("F degrees of freedom must be positive");
    if (std::isnan(f)) throw ArgumentError("F statistic is NaN");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    // P(F >= f) = I_{d2 / (d2 + d1 f)}(d2 / 2, d1 / 2)
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

struct QRow {
    double dof;
    std::array<double, 9> q;  // k = 2..10
};

// alpha = 0.05 upper quantiles of the studentized range.
constexpr std::array<QRow, 25> kTable = {{
    {2, {6.0849, 8.3308, 9.7980, 10.8811, 11.7343, 12.4349, 13.0273, 13.5390, 13.9885}},
    {3, {4.5007, 5.9096, 6.8245, 7.5017, 8.0371, 8.4783, 8.8525, 9.1766, 9.4620}},
    {4, {3.9265, 5.0402, 5.7571, 6.2870, 6.7064, 7.0526, 7.3465, 7.6015, 7.8263}},
    {5, {3.6354, 4.6017, 5.2183, 5.6731, 6.0329, 6.3299, 6.5823, 6.8014, 6.9947}},
    {6, {3.4605, 4.3392, 4.8956, 5.3049, 5.6284, 5.8953, 6.1222, 6.3192, 6.4931}},
    {7, {3.3441, 4.1649, 4.6813, 5.0601, 5.3591, 5.6057, 5.8153, 5.9973, 6.1579}},
    {8, {3.2612, 4.0410, 4.5288, 4.8858, 5.1672, 5.3991, 5.5962, 5.7673, 5.9183}},
    {9, {3.1992, 3.9485, 4.4149, 4.7554, 5.0235, 5.2444, 5.4319, 5.5947, 5.7384}},
    {10, {3.1511, 3.8768, 4.3266, 4.6543, 4.9120, 5.1242, 5.3042, 5.4605, 5.5984}},
    {11, {3.1127, 3.8196, 4.2561, 4.5736, 4.8230, 5.0281, 5.2021, 5.3531, 5.4863}},
    {12, {3.0813, 3.7729, 4.1987, 4.5077, 4.7502, 4.9496, 5.1187, 5.2653, 5.3946}},
    {13, {3.0552, 3.7341, 4.1509, 4.4529, 4.6897, 4.8842, 5.0491, 5.1921, 5.3181}},
    {14, {3.0332, 3.7014, 4.1105, 4.4066, 4.6385, 4.8290, 4.9903, 5.1301, 5.2534}},
    {15, {3.0143, 3.6734, 4.0760, 4.3670, 4.5947, 4.7816, 4.9399, 5.0770, 5.1979}},
    {16, {2.9980, 3.6491, 4.0461, 4.3327, 4.5568, 4.7406, 4.8962, 5.0310, 5.1498}},
    {17, {2.9837, 3.6280, 4.0200, 4.3027, 4.5237, 4.7048, 4.8580, 4.9907, 5.1077}},
    {18, {2.9712, 3.6093, 3.9970, 4.2763, 4.4944, 4.6731, 4.8243, 4.9552, 5.0705}},
    {19, {2.9600, 3.5927, 3.9766, 4.2528, 4.4685, 4.6450, 4.7944, 4.9236, 5.0375}},
    {20, {2.9500, 3.5779, 3.9583, 4.2319, 4.4452, 4.6199, 4.7676, 4.8954, 5.0079}},
    {24, {2.9188, 3.5317, 3.9013, 4.1663, 4.3727, 4.5413, 4.6838, 4.8069, 4.9152}},
    {30, {2.8882, 3.4864, 3.8454, 4.1021, 4.3015, 4.4642, 4.6014, 4.7199, 4.8241}},
    {40, {2.8582, 3.4421, 3.7907, 4.0391, 4.2316, 4.3885, 4.5205, 4.6345, 4.7345}},
    {60, {2.8288, 3.3987, 3.7371, 3.9774, 4.1632, 4.3141, 4.4411, 4.5504, 4.6463}},
    {120, {2.8000, 3.3561, 3.6846, 3.9169, 4.0960, 4.2412, 4.3630, 4.4678, 4.5595}},
    {std::numeric_limits<double>::infinity(),
     {2.7718, 3.3145, 3.6332, 3.8577, 4.0301, 4.1696, 4.2863, 4.3865, 4.4741}},
}};

}  // namespace

double tukey_q_critical(std::size_t k, double dof) {
    if (k < 2 || k > 10) throw ArgumentError("Tukey table covers 2 to 10 groups");
    if (!(dof >= 2.0)) throw ArgumentError("Tukey table needs at least 2 error degrees of freedom");
    const std::size_t col = k - 2;
    const double inv = 1.0 / dof;  // 0 at infinity
    for (std::size_t r = 0; r + 1 < kTable.size(); ++r) {
        const double hi_inv = 1.0 / kTable[r].dof;       // larger 1/dof
        const double lo_inv = 1.0 / kTable[r + 1].dof;   // smaller 1/dof
        if (inv <= hi_inv && inv >= lo_inv) {
            const double t = (hi_inv - inv) / (hi_inv - lo_inv);
            return kTable[r].q[col] + t * (kTable[r + 1].q[col] - kTable[r].q[col]);
        }
    }
    return kTable.back().q[col];
}

}  // namespace akisub::stats

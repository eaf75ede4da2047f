#include "akisub/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"
#include "akisub/kdigo/kdigo.hpp"

namespace akisub::stats {

namespace {

using cohort::IcuStay;

constexpr double kAlpha = 0.05;

std::string fmt(double v, int precision = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1));
}

std::optional<double> window_mean(const IcuStay& stay, const std::string& variable, double window) {
    cohort::EventSeries s;
    if (variable == cohort::kUrine) {
        s = cohort::urine_rate_series(stay);
    } else if (const auto* p = stay.series(variable)) {
        s = *p;
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& pt : s.points) {
        if (pt.offset_hours >= 0.0 && pt.offset_hours < window) {
            sum += pt.value;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / double(n);
}

struct Level {
    std::string name;
    std::vector<int> indicator;  // per stay
};

ReportRow continuous_row(const std::string& name, const std::vector<std::optional<double>>& values,
                         const std::vector<int>& clusters, const std::vector<double>& age, std::size_t k,
                         bool adjust) {
    ReportRow row;
    row.variable = name;
    row.kind = RowKind::continuous;
    std::vector<Sample> groups(k);
    Sample pooled, cov;
    std::vector<int> labels;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) continue;
        groups[static_cast<std::size_t>(clusters[i])].push_back(*values[i]);
        pooled.push_back(*values[i]);
        cov.push_back(age[i]);
        labels.push_back(clusters[i]);
    }
    row.n_used = pooled.size();
    for (const auto& g : groups) {
        row.cluster_means.push_back(g.empty() ? std::nan("") : mean_of(g));
        row.cells.push_back(g.empty() ? "-" : fmt(mean_of(g)) + " (" + fmt(sd_of(g)) + ")");
    }
    if (k < 2) return row;
    const bool testable = std::all_of(groups.begin(), groups.end(), [](const Sample& g) { return g.size() >= 2; });
    if (!testable) return row;
    if (normality_route(pooled) == Route::parametric) {
        row.test = "anova";
        row.p_unadjusted = one_way_anova(groups).p_value;
    } else {
        row.test = "kruskal_wallis";
        row.p_unadjusted = kruskal_wallis(groups).p_value;
    }
    if (k <= 10) row.pairwise = tukey_hsd(groups).pairwise;
    if (adjust) {
        try {
            row.p_adjusted = ancova_adjust(pooled, labels, cov).p_value;
        } catch (const NumericalRankError&) {
        }
    }
    return row;
}

ReportRow discrete_row(const std::string& name, const std::vector<Level>& levels, const std::vector<int>& clusters,
                       const std::vector<double>& age, std::size_t k) {
    ReportRow row;
    row.variable = name;
    row.kind = RowKind::discrete;
    // binary flags report the positive level only
    const bool binary = levels.size() == 2 && levels[1].name == "yes";
    std::vector<std::vector<double>> table(k, std::vector<double>(levels.size(), 0.0));
    std::vector<double> size(k, 0.0);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const auto c = static_cast<std::size_t>(clusters[i]);
        size[c] += 1.0;
        for (std::size_t l = 0; l < levels.size(); ++l) table[c][l] += levels[l].indicator[i];
    }
    row.n_used = clusters.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::string cell;
        const std::size_t first = binary ? 1 : 0;
        for (std::size_t l = first; l < levels.size(); ++l) {
            const double pct = size[c] > 0 ? 100.0 * table[c][l] / size[c] : 0.0;
            if (!cell.empty()) cell += "; ";
            if (!binary) cell += levels[l].name + " ";
            cell += fmt(table[c][l], 0) + " (" + fmt(pct) + "%)";
        }
        row.cells.push_back(cell);
        row.cluster_means.push_back(size[c] > 0 ? table[c][first] / size[c] : 0.0);
    }
    if (k < 2) return row;
    row.test = "chi_square";
    try {
        row.p_unadjusted = chi_square_test(table).p_value;
    } catch (const ArgumentError&) {
        // a level never observed (zero column total): no test
        row.test.clear();
        return row;
    }
    std::vector<double> ps;
    const std::size_t first = binary ? 1 : 0;
    for (std::size_t l = first; l < levels.size(); ++l) {
        Sample y(levels[l].indicator.begin(), levels[l].indicator.end());
        try {
            ps.push_back(ancova_adjust(y, clusters, age).p_value);
        } catch (const NumericalRankError&) {
        }
    }
    if (!ps.empty()) {
        const double m = *std::min_element(ps.begin(), ps.end());
        row.p_adjusted = std::min(1.0, m * double(levels.size() - first));
    }
    return row;
}

}  // namespace

std::vector<std::string> report_variable_names() {
    std::vector<std::string> names{"age", "sex", "ethnicity"};
    for (auto m : cohort::kMedicationNames) names.emplace_back(m);
    for (auto c : cohort::kComorbidityNames) names.emplace_back(c);
    for (const auto& v : cohort::structured_variables()) names.emplace_back(v.name);
    names.emplace_back("eGFR");
    return names;
}

SubtypeReport build_subtype_report(const std::vector<IcuStay>& stays, const std::vector<int>& clusters,
                                   double window_hours) {
    if (stays.size() != clusters.size()) throw DimensionError("one cluster label per stay required");
    if (stays.empty()) throw ArgumentError("subtype report needs at least one stay");
    int kmax = -1;
    for (int c : clusters) {
        if (c < 0) throw ArgumentError("negative cluster label");
        kmax = std::max(kmax, c);
    }
    const std::size_t k = static_cast<std::size_t>(kmax + 1);
    SubtypeReport rep;
    rep.k = k;
    rep.cluster_sizes.assign(k, 0);
    for (int c : clusters) ++rep.cluster_sizes[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < k; ++c)
        if (rep.cluster_sizes[c] == 0) throw ArgumentError("cluster " + std::to_string(c) + " is empty");

    const std::size_t n = stays.size();
    std::vector<double> age(n);
    for (std::size_t i = 0; i < n; ++i) age[i] = stays[i].age;

    std::vector<std::optional<double>> age_vals(age.begin(), age.end());
    rep.rows.push_back(continuous_row("age", age_vals, clusters, age, k, false));

    auto binary_level = [&](auto pred) {
        Level no{"no", std::vector<int>(n)}, yes{"yes", std::vector<int>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            yes.indicator[i] = pred(stays[i]) ? 1 : 0;
            no.indicator[i] = 1 - yes.indicator[i];
        }
        return std::vector<Level>{no, yes};
    };
    {
        Level male{"male", std::vector<int>(n)}, female{"female", std::vector<int>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            female.indicator[i] = stays[i].sex == cohort::Sex::female;
            male.indicator[i] = 1 - female.indicator[i];
        }
        rep.rows.push_back(discrete_row("sex", {male, female}, clusters, age, k));
    }
    {
        std::vector<Level> eth;
        for (auto e : {cohort::Ethnicity::white, cohort::Ethnicity::black, cohort::Ethnicity::asian,
                       cohort::Ethnicity::other}) {
            Level l{cohort::to_string(e), std::vector<int>(n)};
            for (std::size_t i = 0; i < n; ++i) l.indicator[i] = stays[i].ethnicity == e;
            eth.push_back(std::move(l));
        }
        rep.rows.push_back(discrete_row("ethnicity", eth, clusters, age, k));
    }
    for (std::size_t m = 0; m < cohort::kMedicationNames.size(); ++m) {
        rep.rows.push_back(discrete_row(std::string(cohort::kMedicationNames[m]),
                                        binary_level([m](const IcuStay& s) { return s.med_flags[m]; }), clusters,
                                        age, k));
    }
    for (std::size_t c = 0; c < cohort::kComorbidityNames.size(); ++c) {
        rep.rows.push_back(discrete_row(std::string(cohort::kComorbidityNames[c]),
                                        binary_level([c](const IcuStay& s) { return s.comorbidity_flags[c]; }),
                                        clusters, age, k));
    }
    for (const auto& spec : cohort::structured_variables()) {
        const std::string name(spec.name);
        std::vector<std::optional<double>> vals(n);
        for (std::size_t i = 0; i < n; ++i) vals[i] = window_mean(stays[i], name, window_hours);
        rep.rows.push_back(continuous_row(name, vals, clusters, age, k, true));
    }
    {
        std::vector<std::optional<double>> vals(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto scr = window_mean(stays[i], std::string(cohort::kCreatinine), window_hours);
            if (scr && *scr > 0.0) {
                vals[i] = kdigo::egfr_mdrd(*scr, stays[i].age, stays[i].sex, stays[i].ethnicity);
            }
        }
        rep.rows.push_back(continuous_row("eGFR", vals, clusters, age, k, true));
    }
    return rep;
}

StageComposition stage_composition(const std::vector<int>& clusters, const std::vector<int>& stages,
                                   std::size_t k) {
    if (clusters.size() != stages.size()) throw DimensionError("one stage per clustered stay required");
    StageComposition comp;
    comp.counts.assign(k, {0, 0, 0});
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (stages[i] < 1 || stages[i] > 3) throw DataError("case without a KDIGO stage in composition table");
        if (clusters[i] < 0 || static_cast<std::size_t>(clusters[i]) >= k) {
            throw ArgumentError("cluster label out of range");
        }
        ++comp.counts[static_cast<std::size_t>(clusters[i])][static_cast<std::size_t>(stages[i] - 1)];
    }
    for (const auto& row : comp.counts) {
        const double total = double(row[0] + row[1] + row[2]);
        std::array<double, 3> pct{};
        for (int s = 0; s < 3; ++s) pct[s] = total > 0 ? 100.0 * double(row[s]) / total : 0.0;
        comp.percent.push_back(pct);
        const auto arg = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        comp.modal_stage.push_back(static_cast<int>(arg) + 1);
        comp.modal_share.push_back(total > 0 ? double(row[arg]) / total : 0.0);
    }
    return comp;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::string p_text(const std::optional<double>& p) {
    if (!p) return "-";
    if (*p < 0.001) return "<0.001";
    return fmt(*p, 3);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace

void write_report_csv(const SubtypeReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "variable,kind";
    for (std::size_t c = 0; c < report.k; ++c) out << ",cluster_" << c + 1 << " (n=" << report.cluster_sizes[c] << ")";
    out << ",test,p_unadjusted,p_adjusted,significant_pairs\n";
    out << std::setprecision(10);
    for (const auto& r : report.rows) {
        out << r.variable << ',' << (r.kind == RowKind::continuous ? "continuous" : "discrete");
        for (const auto& cell : r.cells) out << ',' << csv_quote(cell);
        out << ',' << r.test << ',';
        if (r.p_unadjusted) out << *r.p_unadjusted;
        out << ',';
        if (r.p_adjusted) out << *r.p_adjusted;
        std::string pairs;
        for (const auto& p : r.pairwise) {
            if (!p.significant) continue;
            if (!pairs.empty()) pairs += ' ';
            pairs += std::to_string(p.group_i + 1) + "-" + std::to_string(p.group_j + 1);
        }
        out << ',' << pairs << '\n';
    }
}

void write_report_table(const SubtypeReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << std::left << std::setw(22) << "Variable";
    for (std::size_t c = 0; c < report.k; ++c) {
        out << std::setw(26) << ("Cluster " + std::to_string(c + 1) + " (n=" + std::to_string(report.cluster_sizes[c]) + ")");
    }
    out << std::setw(10) << "p" << std::setw(10) << "adj. p" << '\n';
    for (const auto& r : report.rows) {
        out << std::setw(22) << r.variable;
        for (const auto& cell : r.cells) out << std::setw(26) << cell;
        out << std::setw(10) << p_text(r.p_unadjusted) << std::setw(10) << p_text(r.p_adjusted) << '\n';
    }
}

void write_heatmap_csv(const SubtypeReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "variable";
    for (std::size_t c = 0; c < report.k; ++c) out << ",cluster_" << c + 1;
    out << '\n' << std::setprecision(10);
    for (const auto& r : report.rows) {
        if (r.kind != RowKind::continuous || !r.p_unadjusted || *r.p_unadjusted >= kAlpha) continue;
        std::vector<double> m = r.cluster_means;
        const double mu = mean_of(m);
        const double sd = sd_of(m);
        out << r.variable;
        for (double v : m) out << ',' << (sd > 0.0 ? (v - mu) / sd : 0.0);
        out << '\n';
    }
}

void write_stage_composition_csv(const StageComposition& comp, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "cluster,stage1,stage2,stage3,stage1_pct,stage2_pct,stage3_pct,modal_stage,modal_share\n";
    for (std::size_t c = 0; c < comp.counts.size(); ++c) {
        out << c + 1;
        for (auto v : comp.counts[c]) out << ',' << v;
        for (auto v : comp.percent[c]) out << ',' << fmt(v);
        out << ',' << comp.modal_stage[c] << ',' << fmt(comp.modal_share[c], 4) << '\n';
    }
}

}  // namespace akisub::stats

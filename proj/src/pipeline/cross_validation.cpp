#include "akisub/pipeline/cross_validation.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <random>

#include "akisub/error.hpp"

namespace akisub::pipeline {

std::vector<int> stratified_group_folds(const std::vector<int>& labels, const std::vector<std::string>& groups,
                                        std::size_t n_folds, std::uint64_t seed) {
    if (labels.size() != groups.size()) throw FoldError("labels and groups differ in length");
    if (n_folds < 2) throw FoldError("need at least two folds");
    struct Group {
        std::vector<std::size_t> members;
        double cases = 0.0;
    };
    std::map<std::string, std::size_t> index;
    std::vector<Group> gs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = index.emplace(groups[i], gs.size());
        if (inserted) gs.emplace_back();
        gs[it->second].members.push_back(i);
        gs[it->second].cases += labels[i];
    }
    std::size_t with_case = 0, without_case = 0;
    for (const auto& g : gs) (g.cases > 0 ? with_case : without_case)++;
    if (with_case < n_folds || without_case < n_folds) {
        throw FoldError("cannot stratify " + std::to_string(labels.size()) + " samples into " +
                        std::to_string(n_folds) + " folds: " + std::to_string(with_case) + " case groups, " +
                        std::to_string(without_case) + " control-only groups");
    }
    std::vector<std::size_t> order(gs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gs[a].cases != gs[b].cases) return gs[a].cases > gs[b].cases;
        return gs[a].members.size() > gs[b].members.size();
    });
    double total_cases = 0.0;
    for (const auto& g : gs) total_cases += g.cases;
    const double target_cases = total_cases / double(n_folds);
    const double target_size = double(labels.size()) / double(n_folds);
    std::vector<double> fold_cases(n_folds, 0.0), fold_size(n_folds, 0.0);
    std::vector<int> fold(labels.size(), -1);
    for (std::size_t gi : order) {
        const Group& g = gs[gi];
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < n_folds; ++f) {
            const double c = (fold_cases[f] + g.cases) / std::max(target_cases, 1.0);
            const double s = (fold_size[f] + double(g.members.size())) / target_size;
            const double cost = (g.cases > 0 ? c : 0.0) + s;
            if (cost < best_cost) best_cost = cost, best = f;
        }
        fold_cases[best] += g.cases;
        fold_size[best] += double(g.members.size());
        for (auto m : g.members) fold[m] = static_cast<int>(best);
    }
    return fold;
}

namespace {

std::vector<std::size_t> pick(const std::vector<std::size_t>& from, const std::vector<int>& fold, int f, bool in) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < from.size(); ++k)
        if ((fold[k] == f) == in) out.push_back(from[k]);
    return out;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

namespace {

struct OuterOutcome {
    MetricRecord record;
    std::string chosen;
};

OuterOutcome run_outer(const CvModel& model, int f, const std::vector<int>& labels,
                       const std::vector<std::string>& groups, const std::vector<int>& outer,
                       const CvOptions& options) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), 0);
    const auto train = pick(all, outer, f, false);
    const auto test = pick(all, outer, f, true);
    const std::string outer_id = "outer" + std::to_string(f);
    std::size_t best = 0;
    if (model.grid.size() > 1) {
        const auto inner = stratified_group_folds(gather(labels, train), gather(groups, train), options.inner_folds,
                                                  options.seed + 1000 + static_cast<std::uint64_t>(f));
        double best_auc = -1.0;
        for (std::size_t c = 0; c < model.grid.size(); ++c) {
            double sum = 0.0;
            for (int g = 0; g < static_cast<int>(options.inner_folds); ++g) {
                const auto itrain = pick(train, inner, g, false);
                const auto itest = pick(train, inner, g, true);
                const auto scores =
                    model.fit_predict(itrain, itest, model.grid[c], outer_id + "/inner" + std::to_string(g));
                sum += auc(scores, gather(labels, itest));
            }
            const double mean = sum / double(options.inner_folds);
            if (mean > best_auc) best_auc = mean, best = c;
        }
    }
    const auto scores = model.fit_predict(train, test, model.grid[best], outer_id);
    const auto y = gather(labels, test);
    const auto pr = precision_recall(scores, y);
    OuterOutcome out{{model.id, f, auc(scores, y), pr.precision, pr.recall, pr.precision_undefined}, {}};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s fold %d: lr x%.2f, L=%zu", model.id.c_str(), f, model.grid[best].lr_multiplier,
                  model.grid[best].hops);
    out.chosen = buf;
    return out;
}

}  // namespace

CvResult nested_cv(const std::vector<int>& labels, const std::vector<std::string>& groups,
                   const std::vector<CvModel>& models, const CvOptions& options) {
    const auto outer = stratified_group_folds(labels, groups, options.outer_folds, options.seed);
    CvResult result;
    const int folds = static_cast<int>(options.outer_folds);
    for (const auto& model : models) {
        if (model.grid.empty()) throw ConfigError("model '" + model.id + "' has an empty tuning grid");
        std::vector<OuterOutcome> outcomes;
        if (options.jobs <= 1) {
            for (int f = 0; f < folds; ++f) outcomes.push_back(run_outer(model, f, labels, groups, outer, options));
        } else {
            for (int f0 = 0; f0 < folds; f0 += static_cast<int>(options.jobs)) {
                std::vector<std::future<OuterOutcome>> running;
                for (int f = f0; f < std::min(folds, f0 + static_cast<int>(options.jobs)); ++f) {
                    running.push_back(std::async(std::launch::async, run_outer, std::cref(model), f, std::cref(labels),
                                                 std::cref(groups), std::cref(outer), std::cref(options)));
                }
                for (auto& r : running) outcomes.push_back(r.get());
            }
        }
        for (auto& o : outcomes) {
            result.records.push_back(o.record);
            result.chosen.push_back(o.chosen);
        }
    }
    result.summary = summarize(result.records);
    return result;
}

}  // namespace akisub::pipeline

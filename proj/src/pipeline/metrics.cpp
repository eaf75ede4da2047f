#include "akisub/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "akisub/error.hpp"

namespace akisub::pipeline {

namespace {

void check(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw MetricError("labels must be 0 or 1");
        if (std::isnan(scores[i])) throw MetricError("NaN score");
        (labels[i] ? pos : neg) = true;
    }
    if (!pos || !neg) throw MetricError("metric needs both classes");
}

void mean_sd_of(const std::vector<double>& v, double& mean, double& sd) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    sd = 0.0;
    if (v.size() > 1) {
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = std::sqrt(sd / double(v.size() - 1));
    }
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // twice the rank sum keeps tie averages integral
    long double rank2_pos = 0.0L;
    double n_pos = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const long double avg2 = static_cast<long double>(i + 1 + j + 1);
        for (std::size_t m = i; m <= j; ++m)
            if (labels[order[m]]) rank2_pos += avg2;
        i = j + 1;
    }
    for (int y : labels) n_pos += y;
    const double n_neg = double(n) - n_pos;
    const long double u = rank2_pos / 2.0L - static_cast<long double>(n_pos) * (n_pos + 1.0) / 2.0L;
    return static_cast<double>(u / (static_cast<long double>(n_pos) * n_neg));
}

PrecisionRecall precision_recall(const std::vector<double>& scores, const std::vector<int>& labels, double cutoff) {
    check(scores, labels);
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= cutoff;
        if (pred && labels[i]) ++tp;
        else if (pred) ++fp;
        else if (labels[i]) ++fn;
    }
    PrecisionRecall pr;
    pr.recall = tp / (tp + fn);
    if (tp + fp == 0) {
        pr.precision_undefined = true;
    } else {
        pr.precision = tp / (tp + fp);
    }
    return pr;
}

std::vector<MetricSummary> summarize(const std::vector<MetricRecord>& records) {
    std::vector<std::string> models;
    for (const auto& r : records)
        if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    std::vector<MetricSummary> out;
    for (const auto& m : models) {
        std::vector<double> a, p, r;
        for (const auto& rec : records) {
            if (rec.model != m) continue;
            a.push_back(rec.auc);
            p.push_back(rec.precision);
            r.push_back(rec.recall);
        }
        MetricSummary s;
        s.model = m;
        s.folds = a.size();
        mean_sd_of(a, s.auc_mean, s.auc_sd);
        mean_sd_of(p, s.precision_mean, s.precision_sd);
        mean_sd_of(r, s.recall_mean, s.recall_sd);
        out.push_back(s);
    }
    return out;
}

std::string mean_sd(double mean, double sd) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f ± %.4f", mean, sd);
    return buf;
}

}  // namespace akisub::pipeline

#pragma once

#include <string>
#include <vector>

namespace akisub::pipeline {

/// Mann-Whitney AUC: P(score of a random positive > a random negative), ties
/// counted 1/2. Throws MetricError unless both classes occur.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;  // no predicted positives; precision reported as 0
};

/// Predicted positive iff score >= cutoff.
PrecisionRecall precision_recall(const std::vector<double>& scores, const std::vector<int>& labels,
                                 double cutoff = 0.5);

struct MetricRecord {
    std::string model;
    int fold = 0;
    double auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;
};

struct MetricSummary {
    std::string model;
    double auc_mean = 0.0, auc_sd = 0.0;
    double precision_mean = 0.0, precision_sd = 0.0;
    double recall_mean = 0.0, recall_sd = 0.0;
    std::size_t folds = 0;
};

/// One summary per model in first-appearance order; sd uses n - 1.
std::vector<MetricSummary> summarize(const std::vector<MetricRecord>& records);

std::string mean_sd(double mean, double sd);

}  // namespace akisub::pipeline

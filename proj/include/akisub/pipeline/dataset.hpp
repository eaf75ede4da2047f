#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "akisub/features/features.hpp"
#include "akisub/kdigo/kdigo.hpp"
#include "akisub/model/memnet.hpp"

namespace akisub::pipeline {

/// Unscaled per-stay features over the observation window [0, t1).
struct StayRecord {
    std::string stay_id;
    std::string patient_id;
    int label = 0;
    std::optional<int> stage;
    std::optional<int> planted_subtype;  // generator truth, evaluation only
    features::StayTensor tensor;
    std::vector<double> static_features;
    features::BaselineFeatures summary;
    features::NoteTokens notes;

    friend bool operator==(const StayRecord& a, const StayRecord& b);
};

struct Dataset {
    double t1_hours = 24.0;
    std::vector<StayRecord> stays;

    std::vector<int> labels() const;
    std::vector<std::string> groups() const;
    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Stage comes from stage_aki for cases (KDIGO over the prediction window).
Dataset build_dataset(const std::vector<kdigo::LabeledStay>& labeled, double t1_hours, double t2_days = 7.0);

/// Files in `dir`: stays.csv, sequences.csv (empty cell = unobserved),
/// mask.csv, static.csv, summary.csv, notes.csv.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);
std::vector<std::string> dataset_files();

/// Vocabulary counted over the notes of `rows` only.
features::Vocabulary fit_vocabulary(const Dataset& data, const std::vector<std::size_t>& rows,
                                    std::size_t min_count);
features::ScalingStats fit_scaling(const Dataset& data, const std::vector<std::size_t>& rows,
                                   const std::string& split_id);
/// Scaled model inputs. `stats` must carry `split_id`.
std::vector<model::StayInput> make_inputs(const Dataset& data, const std::vector<std::size_t>& rows,
                                          const features::ScalingStats& stats, const std::string& split_id,
                                          const features::Vocabulary& vocab, std::size_t max_note_len);

}  // namespace akisub::pipeline

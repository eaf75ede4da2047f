#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"

namespace akisub::cohort {

/// Synthetic cohort settings. Case stays belong to one of three planted
/// sub-phenotypes whose first-24h physiology follows the archetype targets
/// and whose creatinine/urine trajectories reach KDIGO stage 1 (I),
/// stage 3 (II) or stage 2 (III) inside the prediction window.
struct CohortConfig {
    std::size_t n_stays = 500;
    double case_fraction = 0.2;
    std::array<double, 3> subtype_mixture = {0.5946, 0.0878, 0.3176};
    std::size_t vocab_size = 80;
    /// Scales between-patient spread (as a fraction of the archetype SD) and
    /// measurement noise.
    double noise_scale = 0.3;
    std::uint64_t seed = 1;
    /// 0: every case shows its full signal in both modalities. 1: each case
    /// splits a unit of signal between structured data and notes at random.
    double complementarity = 0.0;
    /// Per-token probability that a case note carries a sub-phenotype term.
    double note_signal = 0.35;
    /// Independent drop probability of each scheduled observation.
    double missing_rate = 0.15;

    friend bool operator==(const CohortConfig&, const CohortConfig&) = default;
};

/// Throws ConfigError when a field is outside its documented range.
void validate(const CohortConfig& config);

/// Deterministic in `config`. Each stay is drawn from its own derived seed.
std::vector<IcuStay> generate_cohort(const CohortConfig& config);

/// Dictionary words of the synthetic note vocabulary (no special tokens).
std::vector<std::string> synthetic_vocabulary(std::size_t vocab_size);

/// KDIGO stage planted for each sub-phenotype (1-based subtype).
int planted_stage_for_subtype(int subtype);

inline constexpr double kDefaultLosHours = 220.0;

}  // namespace akisub::cohort

#pragma once

#include "ffr/env/observe.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ffr::policy {

inline constexpr int kDefaultFeatureDim = 256;
inline constexpr std::uint64_t kDefaultHashSeed = 0;
/// Per-option evidence readings with a fixed slot each: seen, indirect.
inline constexpr int kEvidenceKinds = 2;
inline constexpr int kMinFeatureDim = 16;

/// Layout of the feature vector:
///   [0]                     bias
///   [1, 1 + P)              one-hot of the previous token (id mod P)
///   [1 + P, 1 + 2P)         one-hot of the token before that
///   [1 + 2P, 1 + 2P + 8)    per-option evidence (seen x4, indirect x4)
///   [1 + 2P + 8, F)         hashed question and patch features
/// with P = min(V, (F - 1) / 4).
struct FeatureSpec {
    int dim = kDefaultFeatureDim;
    std::uint64_t hash_seed = kDefaultHashSeed;

    int prefix_block() const;
    int evidence_begin() const { return 1 + 2 * prefix_block(); }
    int hashed_begin() const { return evidence_begin() + kEvidenceKinds * env::kNumOptions; }
    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Names of the active observation features, e.g. "scn:counting",
/// "slot:target=book", "ev:seen:2", "patch:present".
std::vector<std::string> observation_feature_names(const env::Observation& obs);

/// Observation part of the feature vector (bias set, prefix block zero).
/// Computed once per observation and reused for every decoding step.
std::vector<double> observation_features(const env::Observation& obs, const FeatureSpec& spec);

/// Writes the prefix one-hots for `prefix` into a copy of `base`.
void set_prefix(std::span<double> phi, std::span<const double> base, std::span<const int> prefix,
                const FeatureSpec& spec);

std::vector<double> feature_map(const env::Observation& obs, std::span<const int> prefix,
                                const FeatureSpec& spec = {});

}  // namespace ffr::policy

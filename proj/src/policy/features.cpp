#include "ffr/policy/features.hpp"

#include "ffr/env/evidence.hpp"
#include "ffr/errors.hpp"
#include "ffr/policy/vocab.hpp"
#include "ffr/rng.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string_view>

namespace ffr::policy {

namespace {

// "ev:<kind>:<j>" lands at kind * 4 + j inside the evidence block.
std::optional<int> evidence_slot(std::string_view name) {
    static constexpr std::array<std::string_view, kEvidenceKinds> kinds = {"ev:seen:", "ev:indirect:"};
    for (int k = 0; k < kEvidenceKinds; ++k) {
        const auto prefix = kinds[static_cast<std::size_t>(k)];
        if (name.size() == prefix.size() + 1 && name.substr(0, prefix.size()) == prefix) {
            const int j = name.back() - '0';
            if (j >= 0 && j < env::kNumOptions) return k * env::kNumOptions + j;
        }
    }
    return std::nullopt;
}

}  // namespace

int FeatureSpec::prefix_block() const { return std::min(kVocabSize, (dim - 1) / 4); }

std::vector<std::string> observation_feature_names(const env::Observation& obs) {
    std::vector<std::string> names;
    names.push_back("scn:" + std::string(env::to_string(obs.scenario)));
    for (const auto& [k, v] : obs.question.slots) names.push_back("slot:" + k + "=" + v);

    const auto ev = env::read_evidence(obs);
    for (int j = 0; j < env::kNumOptions; ++j) {
        const auto& e = ev[static_cast<std::size_t>(j)];
        const std::string idx = std::to_string(j);
        // The student notices that option j was involved in some interaction
        // but cannot tell a decisive one from an incidental one, whether the
        // frame was sampled or came with a patch.
        if (e.direct || e.loose || e.patch_direct || e.patch_loose) names.push_back("ev:seen:" + idx);
        if (e.indirect) names.push_back("ev:indirect:" + idx);
    }
    if (obs.has_patch()) {
        names.push_back("patch:present");
        if (obs.patch_error) names.push_back("patch:type:" + std::string(teacher::to_string(*obs.patch_error)));
    }
    return names;
}

std::vector<double> observation_features(const env::Observation& obs, const FeatureSpec& spec) {
    if (spec.dim < kMinFeatureDim)
        throw ConfigError("feature dimension must be at least " + std::to_string(kMinFeatureDim));
    std::vector<double> phi(static_cast<std::size_t>(spec.dim), 0.0);
    phi[0] = 1.0;
    const int begin = spec.hashed_begin();
    const auto span = static_cast<std::uint64_t>(spec.dim - begin);
    for (const auto& name : observation_feature_names(obs)) {
        if (auto slot = evidence_slot(name)) {
            phi[static_cast<std::size_t>(spec.evidence_begin() + *slot)] = 1.0;
            continue;
        }
        phi[static_cast<std::size_t>(begin) + hash_string(name, spec.hash_seed) % span] += 1.0;
    }
    return phi;
}

void set_prefix(std::span<double> phi, std::span<const double> base, std::span<const int> prefix,
                const FeatureSpec& spec) {
    std::copy(base.begin(), base.end(), phi.begin());
    const int p = spec.prefix_block();
    const std::size_t n = prefix.size();
    if (n >= 1) phi[static_cast<std::size_t>(1 + prefix[n - 1] % p)] += 1.0;
    if (n >= 2) phi[static_cast<std::size_t>(1 + p + prefix[n - 2] % p)] += 1.0;
}

std::vector<double> feature_map(const env::Observation& obs, std::span<const int> prefix,
                                const FeatureSpec& spec) {
    const auto base = observation_features(obs, spec);
    std::vector<double> phi(base.size());
    set_prefix(phi, base, prefix, spec);
    return phi;
}

}  // namespace ffr::policy

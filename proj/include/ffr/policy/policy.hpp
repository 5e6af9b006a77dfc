#pragma once

#include "ffr/env/observe.hpp"
#include "ffr/policy/features.hpp"
#include "ffr/policy/vocab.hpp"
#include "ffr/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ffr::policy {

enum class Role : std::uint8_t { current, sampling_snapshot, reference };
std::string_view to_string(Role r);

/// Linear-softmax autoregressive policy: logits = W phi(obs, prefix), with W
/// a V x F row-major matrix.
struct PolicyParams {
    int vocab = kVocabSize;
    FeatureSpec spec;
    Role role = Role::current;
    std::vector<double> weights;

    static PolicyParams zeros(const FeatureSpec& spec = {}, Role role = Role::current);

    /// Bigram prior that emits well-formed <think>..</think><answer>X</answer>
    /// sequences (about two content tokens on average, option uniform), plus
    /// N(0, noise^2) on the bias and prefix columns. Observation columns are zero.
    static PolicyParams format_prior(const FeatureSpec& spec, std::uint64_t seed, double strength = 10.0,
                                     double noise = 0.01);

    /// Deep copy under a new role.
    PolicyParams snapshot(Role r) const;

    int dim() const { return spec.dim; }
    double* row(int v) { return weights.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(spec.dim); }
    const double* row(int v) const {
        return weights.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(spec.dim);
    }
    std::uint64_t checksum() const;
    bool all_finite() const;
};

struct SamplingConfig {
    double temperature = 1.0;
    double top_p = 0.95;
    int max_len = kMaxTrajectoryLength;
    friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

/// Observation features computed once, plus the digest used to check that
/// paired scoring calls see the same observation.
struct PreparedObs {
    std::vector<double> base;
    std::uint64_t digest = 0;
};

PreparedObs prepare(const env::Observation& obs, const FeatureSpec& spec);

/// Softmax of W phi / temperature into `probs`. `logits` receives the
/// tempered logits.
void distribution(const PolicyParams& params, std::span<const double> phi, double temperature,
                  std::span<double> logits, std::span<double> probs);

std::vector<double> step_distribution(const PolicyParams& params, const env::Observation& obs,
                                      std::span<const int> prefix, double temperature);

/// Draws one trajectory. Nucleus truncation applies to sampling only; the
/// recorded log-probabilities are from the full temperature-1 softmax.
Trajectory sample_trajectory(const PolicyParams& params, const PreparedObs& obs, const SamplingConfig& cfg,
                             Rng& rng);

/// G trajectories; trajectory i uses the stream seeded with seed ^ i.
/// Throws ConfigError when G < 2.
std::vector<Trajectory> sample_rollouts(const PolicyParams& params_old, const env::Observation& obs, int G,
                                        const SamplingConfig& cfg, std::uint64_t seed);
std::vector<Trajectory> sample_rollouts(const PolicyParams& params_old, const PreparedObs& obs, int G,
                                        const SamplingConfig& cfg, std::uint64_t seed);

/// Per-token natural-log probabilities at temperature 1.
std::vector<double> logprob(const PolicyParams& params, const env::Observation& obs, std::span<const int> tokens);
std::vector<double> logprob(const PolicyParams& params, const PreparedObs& obs, std::span<const int> tokens);

/// d log pi(tokens[t] | prefix) / dW as a V x F row-major matrix.
std::vector<double> grad_logprob(const PolicyParams& params, const env::Observation& obs,
                                 std::span<const int> tokens, int t);

/// Argmax decoding (lowest token id on ties) until EOS or max_len.
std::vector<int> greedy_decode(const PolicyParams& params, const PreparedObs& obs,
                               int max_len = kMaxTrajectoryLength);

}  // namespace ffr::policy

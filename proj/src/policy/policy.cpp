#include "ffr/policy/policy.hpp"

#include "ffr/errors.hpp"
#include "ffr/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace ffr::policy {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::current: return "current";
        case Role::sampling_snapshot: return "sampling_snapshot";
        case Role::reference: return "reference";
    }
    return "current";
}

PolicyParams PolicyParams::zeros(const FeatureSpec& spec, Role role) {
    PolicyParams p;
    p.spec = spec;
    p.role = role;
    p.weights.assign(static_cast<std::size_t>(kVocabSize) * static_cast<std::size_t>(spec.dim), 0.0);
    return p;
}

PolicyParams PolicyParams::format_prior(const FeatureSpec& spec, std::uint64_t seed, double strength,
                                        double noise) {
    PolicyParams p = zeros(spec);
    using Logits = std::array<double, kVocabSize>;
    // Target logits after each previous token; index kVocabSize is "no prefix".
    std::vector<Logits> target(kVocabSize + 1);
    for (auto& l : target) l.fill(0.0);
    target[kVocabSize][THINK_OPEN] = strength;
    for (int c = 0; c < kVocabSize; ++c) {
        if (c == THINK_OPEN) {
            for (int t = 0; t < kVocabSize; ++t)
                if (is_content(t)) target[c][static_cast<std::size_t>(t)] = strength;
        } else if (is_content(c)) {
            for (int t = 0; t < kVocabSize; ++t)
                if (is_content(t)) target[c][static_cast<std::size_t>(t)] = strength;
            // Closing is as likely as continuing with any content token.
            target[c][THINK_CLOSE] = strength + std::log(static_cast<double>(kNumContent));
        } else if (c == THINK_CLOSE) {
            target[c][ANSWER_OPEN] = strength;
        } else if (c == ANSWER_OPEN) {
            for (int o = 0; o < 4; ++o) target[c][static_cast<std::size_t>(OPT_A + o)] = strength;
        } else if (is_option(c)) {
            target[c][ANSWER_CLOSE] = strength;
        } else {
            target[c][EOS] = strength;
        }
    }
    const int pb = spec.prefix_block();
    for (int v = 0; v < kVocabSize; ++v) {
        double* w = p.row(v);
        w[0] = target[kVocabSize][static_cast<std::size_t>(v)];
        for (int c = 0; c < kVocabSize; ++c)
            w[1 + c % pb] += target[static_cast<std::size_t>(c)][static_cast<std::size_t>(v)] -
                             target[kVocabSize][static_cast<std::size_t>(v)];
    }
    // Observation columns start at zero: an untrained student has no reading
    // of the evidence, so its answers cannot correlate with gold.
    Rng rng(derive_seed(seed, 0x1a1f));
    const int structural = spec.evidence_begin();
    for (int v = 0; v < kVocabSize; ++v)
        for (int f = 0; f < structural; ++f) p.row(v)[f] += noise * rng.normal();
    return p;
}

PolicyParams PolicyParams::snapshot(Role r) const {
    PolicyParams p = *this;
    p.role = r;
    return p;
}

std::uint64_t PolicyParams::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void* data, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    feed(&vocab, sizeof vocab);
    feed(&spec.dim, sizeof spec.dim);
    feed(&spec.hash_seed, sizeof spec.hash_seed);
    feed(weights.data(), weights.size() * sizeof(double));
    return mix64(h);
}

bool PolicyParams::all_finite() const {
    return std::all_of(weights.begin(), weights.end(), [](double x) { return std::isfinite(x); });
}

PreparedObs prepare(const env::Observation& obs, const FeatureSpec& spec) {
    return {observation_features(obs, spec), env::digest(obs)};
}

void distribution(const PolicyParams& params, std::span<const double> phi, double temperature,
                  std::span<double> logits, std::span<double> probs) {
    const auto& k = simd::kernels();
    k.gemv(params.weights.data(), static_cast<std::size_t>(params.vocab), phi.size(), phi.data(), logits.data());
    double m = -INFINITY;
    for (auto& z : logits) {
        z /= temperature;
        m = std::max(m, z);
    }
    double s = 0.0;
    for (std::size_t v = 0; v < logits.size(); ++v) {
        probs[v] = std::exp(logits[v] - m);
        s += probs[v];
    }
    for (auto& p : probs) p /= s;
}

std::vector<double> step_distribution(const PolicyParams& params, const env::Observation& obs,
                                      std::span<const int> prefix, double temperature) {
    if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
    const auto phi = feature_map(obs, prefix, params.spec);
    std::vector<double> logits(static_cast<std::size_t>(params.vocab)), probs(logits.size());
    distribution(params, phi, temperature, logits, probs);
    return probs;
}

namespace {

/// Inverse-CDF draw; with top_p < 1 only the smallest high-probability set
/// reaching top_p is eligible.
int draw(std::span<const double> probs, double top_p, Rng& rng) {
    const double u = rng.unit();
    if (top_p >= 1.0) {
        double c = 0.0;
        for (std::size_t v = 0; v < probs.size(); ++v) {
            c += probs[v];
            if (u < c) return static_cast<int>(v);
        }
        return static_cast<int>(probs.size()) - 1;
    }
    std::array<int, kVocabSize> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    });
    double mass = 0.0;
    std::size_t keep = 0;
    while (keep < order.size() && mass < top_p) mass += probs[static_cast<std::size_t>(order[keep++])];
    const double target = u * mass;
    double c = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        c += probs[static_cast<std::size_t>(order[i])];
        if (target < c) return order[i];
    }
    return order[keep - 1];
}

}  // namespace

Trajectory sample_trajectory(const PolicyParams& params, const PreparedObs& obs, const SamplingConfig& cfg,
                             Rng& rng) {
    const auto V = static_cast<std::size_t>(params.vocab);
    std::vector<double> phi(obs.base.size()), logits(V), probs(V), scored(V);
    Trajectory tr;
    while (static_cast<int>(tr.tokens.size()) < cfg.max_len) {
        set_prefix(phi, obs.base, tr.tokens, params.spec);
        distribution(params, phi, 1.0, logits, scored);
        const std::vector<double>* sample_from = &scored;
        if (cfg.temperature != 1.0) {
            distribution(params, phi, cfg.temperature, logits, probs);
            sample_from = &probs;
        }
        const int tok = draw(*sample_from, cfg.top_p, rng);
        tr.tokens.push_back(tok);
        tr.logprobs_old.push_back(std::log(scored[static_cast<std::size_t>(tok)]));
        if (tok == EOS) break;
    }
    return tr;
}

std::vector<Trajectory> sample_rollouts(const PolicyParams& params_old, const PreparedObs& obs, int G,
                                        const SamplingConfig& cfg, std::uint64_t seed) {
    if (G < 2) throw ConfigError("group size G must be at least 2, got " + std::to_string(G));
    if (!(cfg.temperature > 0.0)) throw ConfigError("temperature must be positive");
    if (!(cfg.top_p > 0.0 && cfg.top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(G));
    for (int i = 0; i < G; ++i) {
        Rng rng(seed ^ static_cast<std::uint64_t>(i));
        out.push_back(sample_trajectory(params_old, obs, cfg, rng));
    }
    return out;
}

std::vector<Trajectory> sample_rollouts(const PolicyParams& params_old, const env::Observation& obs, int G,
                                        const SamplingConfig& cfg, std::uint64_t seed) {
    return sample_rollouts(params_old, prepare(obs, params_old.spec), G, cfg, seed);
}

std::vector<double> logprob(const PolicyParams& params, const PreparedObs& obs, std::span<const int> tokens) {
    const auto V = static_cast<std::size_t>(params.vocab);
    std::vector<double> phi(obs.base.size()), logits(V), probs(V), out;
    out.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        set_prefix(phi, obs.base, tokens.first(t), params.spec);
        distribution(params, phi, 1.0, logits, probs);
        out.push_back(std::log(probs[static_cast<std::size_t>(tokens[t])]));
    }
    return out;
}

std::vector<double> logprob(const PolicyParams& params, const env::Observation& obs, std::span<const int> tokens) {
    return logprob(params, prepare(obs, params.spec), tokens);
}

std::vector<double> grad_logprob(const PolicyParams& params, const env::Observation& obs,
                                 std::span<const int> tokens, int t) {
    if (t < 0 || t >= static_cast<int>(tokens.size())) throw RangeError("position outside trajectory");
    const auto V = static_cast<std::size_t>(params.vocab);
    const auto phi = feature_map(obs, tokens.first(static_cast<std::size_t>(t)), params.spec);
    std::vector<double> logits(V), probs(V);
    distribution(params, phi, 1.0, logits, probs);
    std::vector<double> coeff(V);
    for (std::size_t v = 0; v < V; ++v) coeff[v] = (static_cast<int>(v) == tokens[static_cast<std::size_t>(t)] ? 1.0 : 0.0) - probs[v];
    std::vector<double> grad(params.weights.size(), 0.0);
    simd::kernels().rank1(grad.data(), V, phi.size(), coeff.data(), phi.data());
    return grad;
}

std::vector<int> greedy_decode(const PolicyParams& params, const PreparedObs& obs, int max_len) {
    const auto V = static_cast<std::size_t>(params.vocab);
    std::vector<double> phi(obs.base.size()), logits(V), probs(V);
    std::vector<int> tokens;
    while (static_cast<int>(tokens.size()) < max_len) {
        set_prefix(phi, obs.base, tokens, params.spec);
        distribution(params, phi, 1.0, logits, probs);
        const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
        tokens.push_back(static_cast<int>(best));
        if (best == EOS) break;
    }
    return tokens;
}

}  // namespace ffr::policy

#include "ffr/trainer/trainer.hpp"

#include "ffr/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ffr::trainer {

double rir_scalar(int z, double R, double R_fmt, double R_star, double R_star_fmt, double kappa) {
    const double zz = z ? 1.0 : 0.0;
    return zz * (R + R_fmt) + (1.0 - zz) * (R_star + R_star_fmt - kappa);
}

std::vector<double> advantages(const std::vector<double>& rirs, double delta) {
    std::vector<double> out(rirs.size(), 0.0);
    if (rirs.empty()) return out;
    if (std::all_of(rirs.begin(), rirs.end(), [&](double x) { return x == rirs.front(); })) return out;
    const double n = static_cast<double>(rirs.size());
    const double mean = std::accumulate(rirs.begin(), rirs.end(), 0.0) / n;
    double var = 0.0;
    for (double x : rirs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    for (std::size_t i = 0; i < rirs.size(); ++i) out[i] = (rirs[i] - mean) / (sd + delta);
    return out;
}

double clip_term(double r, double A, double epsilon) {
    const double clamped = std::clamp(r, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(r * A, clamped * A);
}

namespace {

struct Scratch {
    std::vector<double> phi, logits, probs, logp, logp_old, logp_ref, coeff;
    explicit Scratch(const policy::PolicyParams& p)
        : phi(static_cast<std::size_t>(p.spec.dim)),
          logits(static_cast<std::size_t>(p.vocab)),
          probs(logits.size()),
          logp(logits.size()),
          logp_old(logits.size()),
          logp_ref(logits.size()),
          coeff(logits.size()) {}
};

void log_softmax(const policy::PolicyParams& params, std::span<const double> phi, std::span<double> logits,
                 std::span<double> out) {
    simd::kernels().gemv(params.weights.data(), static_cast<std::size_t>(params.vocab), phi.size(), phi.data(),
                         logits.data());
    const double m = *std::max_element(logits.begin(), logits.end());
    double s = 0.0;
    for (double z : logits) s += std::exp(z - m);
    const double lse = m + std::log(s);
    for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - lse;
}

struct TokenTerms {
    double clip = 0.0;
    double kl = 0.0;
};

/// One visited state: clip term of the realized token and the exact KL to
/// the reference. Adds scale * d(clip - beta * kl)/dW into `grad`.
TokenTerms token_terms(const policy::PolicyParams& params, const policy::PolicyParams& params_old,
                       const policy::PolicyParams& params_ref, const policy::PreparedObs& ctx,
                       const std::vector<int>& tokens, std::size_t t, double A, double epsilon, double beta,
                       double scale, std::vector<double>& grad, Scratch& s) {
    policy::set_prefix(s.phi, ctx.base, std::span<const int>(tokens).first(t), params.spec);
    log_softmax(params, s.phi, s.logits, s.logp);
    log_softmax(params_old, s.phi, s.logits, s.logp_old);
    log_softmax(params_ref, s.phi, s.logits, s.logp_ref);
    const auto a = static_cast<std::size_t>(tokens[t]);
    const double r = std::exp(s.logp[a] - s.logp_old[a]);
    const double clamped = std::clamp(r, 1.0 - epsilon, 1.0 + epsilon);
    // On a tie the unclipped branch is taken.
    const bool unclipped = r * A <= clamped * A;
    TokenTerms out;
    out.clip = clip_term(r, A, epsilon);
    for (std::size_t k = 0; k < s.logp.size(); ++k) {
        s.probs[k] = std::exp(s.logp[k]);
        out.kl += s.probs[k] * (s.logp[k] - s.logp_ref[k]);
    }
    const double g = unclipped ? A * r : 0.0;
    for (std::size_t k = 0; k < s.logp.size(); ++k) {
        const double onehot = k == a ? 1.0 : 0.0;
        const double dkl = s.probs[k] * (s.logp[k] - s.logp_ref[k] - out.kl);
        s.coeff[k] = scale * (g * (onehot - s.probs[k]) - beta * dkl);
    }
    simd::kernels().rank1(grad.data(), s.coeff.size(), s.phi.size(), s.coeff.data(), s.phi.data());
    return out;
}

}  // namespace

ObjectiveResult ffr_objective(const policy::PolicyParams& params, const policy::PolicyParams& params_old,
                              const policy::PolicyParams& params_ref, const std::vector<Group>& batch,
                              const TrainerConfig& cfg) {
    ObjectiveResult res;
    res.gradient.assign(params.weights.size(), 0.0);
    Scratch s(params);
    for (const auto& group : batch) {
        long tokens = 0;
        for (const auto& item : group.items) tokens += item.chosen().length();
        if (tokens == 0) continue;
        const double inv_t = 1.0 / static_cast<double>(tokens);
        double clip_sum = 0.0, kl_sum = 0.0;
        for (const auto& item : group.items) {
            const auto& chosen = item.chosen();
            const auto& ctx = *item.chosen_context;
            // Ratios must compare both policies under the context the rollout
            // was drawn in (the patched one for repaired items).
            if (ctx.digest != item.sampled_digest)
                throw std::logic_error("chosen rollout scored under a different observation than it was sampled in");
            for (std::size_t t = 0; t < chosen.tokens.size(); ++t) {
                const auto tt = token_terms(params, params_old, params_ref, ctx, chosen.tokens, t, item.advantage,
                                            cfg.epsilon, cfg.beta, inv_t, res.gradient, s);
                clip_sum += tt.clip;
                kl_sum += tt.kl;
            }
        }
        res.value += clip_sum * inv_t - cfg.beta * (kl_sum * inv_t);
        res.kl += kl_sum * inv_t;
    }
    if (!batch.empty()) res.kl /= static_cast<double>(batch.size());
    return res;
}

ObjectiveResult vanilla_grpo_objective(const policy::PolicyParams& params, const policy::PolicyParams& params_old,
                                       const policy::PolicyParams& params_ref, const std::vector<Group>& batch,
                                       const TrainerConfig& cfg) {
    ObjectiveResult res;
    res.gradient.assign(params.weights.size(), 0.0);
    Scratch s(params);
    for (const auto& group : batch) {
        std::vector<double> rewards;
        long tokens = 0;
        for (const auto& item : group.items) {
            rewards.push_back(item.reward_first.accuracy + item.reward_first.format);
            tokens += item.first_pass.length();
        }
        if (tokens == 0) continue;
        const auto adv = advantages(rewards, cfg.delta);
        const double inv_t = 1.0 / static_cast<double>(tokens);
        double clip_sum = 0.0, kl_sum = 0.0;
        for (std::size_t i = 0; i < group.items.size(); ++i) {
            const auto& tr = group.items[i].first_pass;
            for (std::size_t t = 0; t < tr.tokens.size(); ++t) {
                const auto tt = token_terms(params, params_old, params_ref, *group.base, tr.tokens, t, adv[i],
                                            cfg.epsilon, cfg.beta, inv_t, res.gradient, s);
                clip_sum += tt.clip;
                kl_sum += tt.kl;
            }
        }
        res.value += clip_sum * inv_t - cfg.beta * (kl_sum * inv_t);
        res.kl += kl_sum * inv_t;
    }
    if (!batch.empty()) res.kl /= static_cast<double>(batch.size());
    return res;
}

}  // namespace ffr::trainer

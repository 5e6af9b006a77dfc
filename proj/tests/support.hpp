#pragma once

// Fixtures shared by the unit and acceptance binaries.

#include "ffr/env/observe.hpp"
#include "ffr/env/task.hpp"
#include "ffr/policy/policy.hpp"
#include "ffr/rng.hpp"
#include "ffr/trainer/trainer.hpp"
#include "ffr/verifier/verifier.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ffr::testing {

/// First task (scanning seeds from `start`) that satisfies `pred`.
inline env::Task find_task(env::ScenarioType scenario, const env::EnvConfig& cfg,
                           const std::function<bool(const env::Task&)>& pred, std::uint64_t start = 0) {
    for (std::uint64_t s = start; s < start + 200000; ++s) {
        auto t = env::generate_task(s, scenario, cfg);
        if (pred(t)) return t;
    }
    throw std::runtime_error("no task matches the fixture predicate");
}

/// Well-formed trajectory citing `cite` (if any) and answering option `answer`.
inline policy::Trajectory answer_trajectory(int answer, std::optional<int> cite = std::nullopt) {
    policy::Trajectory t;
    t.tokens = {policy::THINK_OPEN};
    if (cite) t.tokens.push_back(policy::CITE_FRAME_0 + *cite);
    t.tokens.push_back(policy::FILLER_0);
    t.tokens.insert(t.tokens.end(),
                    {policy::THINK_CLOSE, policy::ANSWER_OPEN, policy::OPT_A + answer, policy::ANSWER_CLOSE, policy::EOS});
    t.logprobs_old.assign(t.tokens.size(), 0.0);
    return t;
}

inline policy::PolicyParams random_params(const policy::FeatureSpec& spec, std::uint64_t seed, double scale,
                                          policy::Role role = policy::Role::current) {
    auto p = policy::PolicyParams::zeros(spec, role);
    Rng rng(seed);
    for (auto& w : p.weights) w = scale * rng.normal();
    return p;
}

inline policy::PolicyParams perturbed(const policy::PolicyParams& base, std::uint64_t seed, double scale,
                                      policy::Role role) {
    auto p = base.snapshot(role);
    Rng rng(seed);
    for (auto& w : p.weights) w += scale * rng.normal();
    return p;
}

inline double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    const double denom = std::max(std::sqrt(na), std::sqrt(nb));
    return denom > 0 ? std::sqrt(diff) / denom : std::sqrt(diff);
}

/// Central differences of f over every weight.
inline std::vector<double> numeric_gradient(policy::PolicyParams params,
                                            const std::function<double(const policy::PolicyParams&)>& f,
                                            double h = 1e-5) {
    std::vector<double> g(params.weights.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = params.weights[i];
        params.weights[i] = w + h;
        const double up = f(params);
        params.weights[i] = w - h;
        const double down = f(params);
        params.weights[i] = w;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

}  // namespace ffr::testing

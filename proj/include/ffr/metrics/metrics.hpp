#pragma once

#include "ffr/env/observe.hpp"
#include "ffr/metrics/blind.hpp"
#include "ffr/metrics/records.hpp"
#include "ffr/policy/policy.hpp"
#include "ffr/teacher/teacher.hpp"

#include <functional>
#include <map>
#include <span>

namespace ffr::metrics {

/// Sum of interventions over sum of groups x G. Throws RangeError on an
/// empty window.
double intervention_ratio(std::span<const StepRecord> window);

struct FixRates {
    std::map<teacher::ErrorType, double> per_type;  // types with zero attempts omitted
    std::optional<double> overall;
    std::map<teacher::ErrorType, FixCount> counts;
};
FixRates fix_success_rate(std::span<const StepRecord> records);

/// First and last thirds of a run (by record position).
std::pair<std::span<const StepRecord>, std::span<const StepRecord>> early_late(std::span<const StepRecord> records);

/// Deterministic reader that answers from direct evidence only (sampled
/// frames or patch). Without any, it guesses from the observation digest.
env::AnswerIndex rule_solver(const env::Observation& obs);

/// Produces an answer for a task under a given observation; nullopt means
/// no parseable answer.
using Decoder = std::function<std::optional<env::AnswerIndex>(const env::Task&, const env::Observation&)>;

struct EvalResult {
    long n = 0;
    long correct = 0;
    std::array<long, env::kNumScenarios> n_by_scenario{};
    std::array<long, env::kNumScenarios> correct_by_scenario{};

    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
    std::optional<double> accuracy(env::ScenarioType s) const;
};

/// Evaluates `decode` over the taskset. With `with_patch`, each task is
/// observed through the oracle teacher's with_gold patch for a blank answer.
EvalResult eval_with_decoder(const std::vector<env::Task>& tasks, int budget, bool with_patch, const Decoder& decode);

/// Greedy decoding accuracy of `params`.
EvalResult eval_accuracy(const policy::PolicyParams& params, const std::vector<env::Task>& tasks, int budget,
                         bool with_patch = false);

/// Binomial standard error of a proportion.
double standard_error(double p, long n);

}  // namespace ffr::metrics

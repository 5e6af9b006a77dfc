#pragma once

#include "ffr/cli/config.hpp"
#include "ffr/metrics/metrics.hpp"
#include "ffr/teacher/teacher.hpp"

#include <json.hpp>

#include <iosfwd>

namespace ffr::cli {

/// Tasks seen at training step `step`; independent of the held-out stream.
std::vector<env::Task> training_batch(const env::EnvConfig& env, long step, int n);
/// Held-out evaluation tasks. `hidden_only` restricts to dependency-hidden tasks.
std::vector<env::Task> heldout_tasks(const env::EnvConfig& env, int n, bool hidden_only);

policy::PolicyParams initial_policy(const ExperimentConfig& cfg);

struct RunCallbacks {
    std::function<void(const metrics::StepRecord&)> on_record;
    /// Called after each evaluation step and at the end with the current weights.
    std::function<void(long step, const policy::PolicyParams&)> on_checkpoint;
};

struct RunResult {
    policy::PolicyParams final_params;
    std::vector<metrics::StepRecord> records;
};

/// The training loop behind `train`: `steps` updates, held-out accuracy
/// every `eval_every` steps and at the last step.
RunResult run_training(const ExperimentConfig& cfg, const teacher::Teacher& teacher, const RunCallbacks& cb = {});

struct AuditReport {
    long failures = 0;
    long unavailable = 0;  // diagnoses the teacher declined
    long direct = 0;
    long partial = 0;
    long compliant = 0;
    long blind_correct = 0;  // compliant patches the blind decoder answers correctly
    std::array<metrics::FixCount, teacher::kNumErrorTypes> fixes{};
    std::map<std::string, long> rules;  // violations per rule id

    nlohmann::json to_json() const;
};

/// Collects `n_failures` incorrect first-pass rollouts of the initial policy,
/// then diagnoses and leakage-checks each one and resamples under the
/// compliant patches. Throws ConfigError when n_failures < 100.
AuditReport leakage_audit(const ExperimentConfig& cfg, long n_failures, const teacher::Teacher& teacher);

struct SweepRow {
    double kappa = 0.0;
    std::optional<double> final_accuracy;
    std::optional<double> final_intervention_ratio;
    std::string error_kind;  // set when the cell failed
    std::string error_message;
};

/// One training run plus evaluation per kappa, all sharing the config seeds.
/// Outputs land in out_dir/kappa_<value>. Throws ConfigError for fewer than
/// two values; failures inside a cell are recorded and the sweep continues.
std::vector<SweepRow> sweep_kappa(const ExperimentConfig& cfg, const std::vector<double>& kappas);

/// Writes {"kind", "message"} as one JSON line.
void emit_error(std::ostream& err, const std::string& kind, const std::string& message);

// Command entry points. Results go to `out` as JSON; errors to `err`.
int cmd_train(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_eval(const std::filesystem::path& ckpt, int n_tasks, std::uint64_t seed, int budget, bool hidden_only,
             bool with_patch, std::ostream& out, std::ostream& err);
int cmd_sweep_kappa(const std::filesystem::path& config, const std::vector<double>& kappas, std::ostream& out,
                    std::ostream& err);
int cmd_leakage_audit(const std::filesystem::path& config, long n, bool adversarial, std::ostream& out,
                      std::ostream& err);
int cmd_export_tasks(const std::filesystem::path& config, int n, const std::filesystem::path& dest,
                     std::ostream& out, std::ostream& err);

}  // namespace ffr::cli

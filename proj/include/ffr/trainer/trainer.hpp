#pragma once

#include "ffr/env/observe.hpp"
#include "ffr/metrics/records.hpp"
#include "ffr/policy/policy.hpp"
#include "ffr/teacher/teacher.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace ffr::trainer {

enum class Algorithm : std::uint8_t { ffr, grpo };
std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);

struct TrainerConfig {
    int G = 8;
    double epsilon = 0.2;
    double beta = 0.04;
    double kappa = 0.3;
    double delta = 1e-8;
    double lr = 0.1;
    std::string lr_schedule = "cosine";  // cosine | constant
    double max_grad_norm = 5.0;
    double lambda_fmt = 0.5;
    teacher::TeacherMode teacher_mode = teacher::TeacherMode::with_gold;
    Algorithm algorithm = Algorithm::ffr;
    int batch_tasks = 8;  // questions per step
    friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

/// Throws ConfigError.
void validate(const TrainerConfig& cfg);

struct Rewards {
    double accuracy = 0.0;
    double format = 0.0;
};

struct GroupItem {
    int task_index = 0;
    policy::Trajectory first_pass;
    int z = 0;
    Rewards reward_first;
    std::optional<teacher::EvidencePatch> patch;
    std::optional<policy::Trajectory> repaired;
    std::optional<Rewards> reward_repaired;
    bool unrepaired = false;
    int leak_direct = 0;
    int leak_partial = 0;
    double rir = 0.0;
    double advantage = 0.0;

    /// Observation the chosen rollout was sampled under (patched iff repaired).
    std::shared_ptr<const policy::PreparedObs> chosen_context;
    std::uint64_t sampled_digest = 0;

    const policy::Trajectory& chosen() const { return repaired ? *repaired : first_pass; }
};

/// One question with its G rollouts.
struct Group {
    const env::Task* task = nullptr;
    std::shared_ptr<const policy::PreparedObs> base;
    env::Observation observation;
    std::vector<GroupItem> items;
};

// Per-item reward algebra.
double rir_scalar(int z, double R, double R_fmt, double R_star, double R_star_fmt, double kappa);
/// (x - mean) / (population std + delta); exact zeros when all x are equal.
std::vector<double> advantages(const std::vector<double>& rirs, double delta);
double clip_term(double r, double A, double epsilon);

struct ObjectiveResult {
    double value = 0.0;
    double kl = 0.0;  // mean per-state KL, averaged over groups
    std::vector<double> gradient;  // V x F, d value / d W
};

/// Clipped surrogate over each item's chosen rollout, scored under the
/// context it was sampled in, normalized per group by its token count, minus
/// beta times the mean exact KL to the reference at the visited states.
/// Groups are summed.
ObjectiveResult ffr_objective(const policy::PolicyParams& params, const policy::PolicyParams& params_old,
                              const policy::PolicyParams& params_ref, const std::vector<Group>& batch,
                              const TrainerConfig& cfg);

/// Plain GRPO: first-pass rollouts on the base observation, advantages from
/// first-pass rewards. Kept separate from ffr_objective on purpose.
ObjectiveResult vanilla_grpo_objective(const policy::PolicyParams& params, const policy::PolicyParams& params_old,
                                       const policy::PolicyParams& params_ref, const std::vector<Group>& batch,
                                       const TrainerConfig& cfg);

/// Samples G rollouts from params_old on the base observation and scores them.
Group first_pass(const policy::PolicyParams& params_old, const env::Task& task, int task_index, int budget,
                 const TrainerConfig& cfg, const policy::SamplingConfig& sampling, std::uint64_t seed);

/// Diagnose, leakage-check, re-observe and resample each failed item once.
/// A rejected patch is re-diagnosed once; a second rejection or an
/// unavailable diagnosis leaves the item unrepaired.
void repair(Group& group, const teacher::Teacher& teacher, const policy::PolicyParams& params_old, int budget,
            const TrainerConfig& cfg, const policy::SamplingConfig& sampling, std::uint64_t seed);

/// Fills rir and advantage for every item.
void score_group(Group& group, const TrainerConfig& cfg);

struct TrainerState {
    policy::PolicyParams current;
    policy::PolicyParams snapshot;
    policy::PolicyParams reference;
    long step = 0;
};

TrainerState init_state(const policy::PolicyParams& initial);

double scheduled_lr(const TrainerConfig& cfg, long step, long total_steps);

struct StepResult {
    metrics::StepRecord record;
    std::vector<Group> groups;
    std::vector<double> update;  // applied parameter delta
};

/// snapshot <- current; first pass, repair (FFR only), objective, one
/// clipped gradient-ascent update of current. Throws NonFiniteGradient
/// without touching the parameters. Verifies that the snapshot and
/// reference are unchanged by the step.
StepResult train_step(TrainerState& state, const std::vector<env::Task>& tasks, int budget,
                      const TrainerConfig& cfg, const policy::SamplingConfig& sampling,
                      const teacher::Teacher& teacher, std::uint64_t seed, long total_steps);

}  // namespace ffr::trainer

#include "ffr/trainer/trainer.hpp"

#include "ffr/errors.hpp"
#include "ffr/simd/kernels.hpp"
#include "ffr/teacher/leakage.hpp"
#include "ffr/verifier/verifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ffr::trainer {

std::string_view to_string(Algorithm a) { return a == Algorithm::ffr ? "ffr" : "grpo"; }

std::optional<Algorithm> parse_algorithm(std::string_view s) {
    if (s == "ffr") return Algorithm::ffr;
    if (s == "grpo") return Algorithm::grpo;
    return std::nullopt;
}

void validate(const TrainerConfig& c) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    need(c.G >= 2, "G must be at least 2");
    need(c.epsilon > 0.0, "epsilon must be positive");
    need(c.kappa >= 0.0, "kappa must be non-negative");
    need(c.delta > 0.0, "delta must be positive");
    need(c.beta >= 0.0, "beta must be non-negative");
    need(c.lr > 0.0 && std::isfinite(c.lr), "lr must be positive");
    need(c.lr_schedule == "cosine" || c.lr_schedule == "constant", "lr_schedule must be cosine or constant");
    need(c.max_grad_norm > 0.0, "max_grad_norm must be positive");
    need(c.lambda_fmt >= 0.0, "lambda_fmt must be non-negative");
    need(c.batch_tasks >= 1, "batch_tasks must be at least 1");
}

Group first_pass(const policy::PolicyParams& params_old, const env::Task& task, int task_index, int budget,
                 const TrainerConfig& cfg, const policy::SamplingConfig& sampling, std::uint64_t seed) {
    Group g;
    g.task = &task;
    g.observation = env::observe(task, budget);
    g.base = std::make_shared<const policy::PreparedObs>(policy::prepare(g.observation, params_old.spec));
    auto rollouts = policy::sample_rollouts(params_old, *g.base, cfg.G, sampling, seed);
    for (auto& tr : rollouts) {
        GroupItem item;
        item.task_index = task_index;
        const auto parsed = verifier::parse_answer(tr, task);
        item.reward_first = {static_cast<double>(verifier::accuracy_reward(parsed, task.gold)),
                             verifier::format_reward(parsed, cfg.lambda_fmt)};
        item.z = verifier::accuracy_reward(parsed, task.gold);
        item.first_pass = std::move(tr);
        item.chosen_context = g.base;
        item.sampled_digest = g.base->digest;
        g.items.push_back(std::move(item));
    }
    return g;
}

void repair(Group& group, const teacher::Teacher& teacher, const policy::PolicyParams& params_old, int budget,
            const TrainerConfig& cfg, const policy::SamplingConfig& sampling, std::uint64_t seed) {
    const env::Task& task = *group.task;
    for (std::size_t i = 0; i < group.items.size(); ++i) {
        GroupItem& item = group.items[i];
        if (item.z == 1) continue;
        for (int attempt = 0; attempt < 2 && !item.repaired; ++attempt) {
            teacher::Diagnosis diag;
            try {
                diag = teacher.diagnose(task, group.observation, item.first_pass, cfg.teacher_mode, attempt);
            } catch (const DiagnosisUnavailable&) {
                break;
            }
            const auto verdict = teacher::leakage_check(diag.patch, task);
            if (!verdict.passed) {
                (*verdict.violation_kind == teacher::ViolationKind::direct ? item.leak_direct : item.leak_partial)++;
                continue;
            }
            const auto patched = env::observe_with_patch(task, budget, diag.patch);
            auto ctx = std::make_shared<const policy::PreparedObs>(policy::prepare(patched, params_old.spec));
            Rng rng(seed ^ static_cast<std::uint64_t>(i));
            auto tr = policy::sample_trajectory(params_old, *ctx, sampling, rng);
            tr.patched = true;
            tr.patch_id = teacher::patch_digest(diag.patch);
            const auto parsed = verifier::parse_answer(tr, task);
            item.reward_repaired = Rewards{static_cast<double>(verifier::accuracy_reward(parsed, task.gold)),
                                           verifier::format_reward(parsed, cfg.lambda_fmt)};
            item.patch = std::move(diag.patch);
            item.repaired = std::move(tr);
            item.chosen_context = std::move(ctx);
            item.sampled_digest = item.chosen_context->digest;
        }
        item.unrepaired = !item.repaired;
    }
}

void score_group(Group& group, const TrainerConfig& cfg) {
    std::vector<double> rirs;
    for (auto& item : group.items) {
        const auto& first = item.reward_first;
        if (item.z == 1) {
            item.rir = rir_scalar(1, first.accuracy, first.format, 0.0, 0.0, cfg.kappa);
        } else if (item.repaired) {
            item.rir = rir_scalar(0, first.accuracy, first.format, item.reward_repaired->accuracy,
                                  item.reward_repaired->format, cfg.kappa);
        } else {
            // No patch consumed: the failed first pass stands in, untaxed.
            item.rir = rir_scalar(0, first.accuracy, first.format, first.accuracy, first.format, 0.0);
        }
        rirs.push_back(item.rir);
    }
    const auto adv = advantages(rirs, cfg.delta);
    for (std::size_t i = 0; i < group.items.size(); ++i) group.items[i].advantage = adv[i];
}

TrainerState init_state(const policy::PolicyParams& initial) {
    TrainerState s;
    s.current = initial.snapshot(policy::Role::current);
    s.snapshot = initial.snapshot(policy::Role::sampling_snapshot);
    s.reference = initial.snapshot(policy::Role::reference);
    return s;
}

double scheduled_lr(const TrainerConfig& cfg, long step, long total_steps) {
    if (cfg.lr_schedule == "constant" || total_steps <= 0) return cfg.lr;
    const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(total_steps));
    return cfg.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

StepResult train_step(TrainerState& state, const std::vector<env::Task>& tasks, int budget,
                      const TrainerConfig& cfg, const policy::SamplingConfig& sampling,
                      const teacher::Teacher& teacher, std::uint64_t seed, long total_steps) {
    state.snapshot = state.current.snapshot(policy::Role::sampling_snapshot);
    const auto snapshot_sum = state.snapshot.checksum();
    const auto reference_sum = state.reference.checksum();

    StepResult res;
    const bool use_teacher = cfg.algorithm == Algorithm::ffr && cfg.teacher_mode != teacher::TeacherMode::off;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        const std::uint64_t task_seed = derive_seed(seed, k);
        Group g = first_pass(state.snapshot, tasks[k], static_cast<int>(k), budget, cfg, sampling,
                             derive_seed(task_seed, 1));
        if (use_teacher) repair(g, teacher, state.snapshot, budget, cfg, sampling, derive_seed(task_seed, 2));
        score_group(g, cfg);
        res.groups.push_back(std::move(g));
    }

    const auto obj = cfg.algorithm == Algorithm::ffr
                         ? ffr_objective(state.current, state.snapshot, state.reference, res.groups, cfg)
                         : vanilla_grpo_objective(state.current, state.snapshot, state.reference, res.groups, cfg);
    const auto& k = simd::kernels();
    const double norm = std::sqrt(k.sum_squares(obj.gradient.data(), obj.gradient.size()));
    if (!std::isfinite(norm) || !std::isfinite(obj.value))
        throw NonFiniteGradient("non-finite gradient at step " + std::to_string(state.step));
    const double lr = scheduled_lr(cfg, state.step, total_steps);
    const double scale = norm > cfg.max_grad_norm ? cfg.max_grad_norm / norm : 1.0;
    res.update.assign(obj.gradient.size(), 0.0);
    k.axpy(lr * scale, obj.gradient.data(), res.update.data(), res.update.size());
    k.axpy(1.0, res.update.data(), state.current.weights.data(), res.update.size());

    if (state.snapshot.checksum() != snapshot_sum || state.reference.checksum() != reference_sum)
        throw std::logic_error("training step mutated a frozen policy role");

    auto& r = res.record;
    r.step = state.step;
    r.groups = static_cast<long>(res.groups.size());
    r.G = cfg.G;
    long correct = 0, items = 0;
    double adv_sum = 0.0;
    for (const auto& g : res.groups)
        for (const auto& item : g.items) {
            ++items;
            correct += item.z;
            adv_sum += item.advantage;
            if (item.z == 0) ++r.interventions;
            if (use_teacher && item.unrepaired && item.z == 0) ++r.unrepaired;
            r.leakage_direct += item.leak_direct;
            r.leakage_partial += item.leak_partial;
            if (item.repaired) {
                auto& fc = r.fixes_by_type[static_cast<std::size_t>(item.patch->error_classification)];
                ++fc.attempts;
                if (item.reward_repaired->accuracy == 1.0) ++fc.successes;
            }
        }
    r.train_accuracy = items ? static_cast<double>(correct) / static_cast<double>(items) : 0.0;
    r.mean_advantage = items ? adv_sum / static_cast<double>(items) : 0.0;
    r.objective = obj.value;
    r.loss = -obj.value;
    r.kl = obj.kl;
    r.grad_norm = norm;
    r.lr = lr;
    ++state.step;
    return res;
}

}  // namespace ffr::trainer

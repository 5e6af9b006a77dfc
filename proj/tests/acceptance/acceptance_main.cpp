// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include "../support.hpp"

#include "ffr/cli/commands.hpp"
#include "ffr/env/observe.hpp"
#include "ffr/metrics/metrics.hpp"
#include "ffr/policy/checkpoint.hpp"
#include "ffr/teacher/leakage.hpp"
#include "ffr/teacher/teacher.hpp"
#include "ffr/verifier/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#ifndef FFR_CLI_PATH
#error "FFR_CLI_PATH must name the ffr executable"
#endif

using namespace ffr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;
std::set<int> selected;  // empty: every criterion

bool wanted(int id) { return selected.empty() || selected.count(id); }

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    if (!wanted(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path work_dir() {
    auto p = fs::temp_directory_path() / "ffr_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- criterion 1

Outcome formula_fixtures() {
    using namespace trainer;
    struct Fix {
        double got, want;
    };
    std::vector<Fix> f;
    // Reward scalar.
    f.push_back({rir_scalar(1, 1, 0.5, 0, 0, 0.3), 1.5});
    f.push_back({rir_scalar(0, 0, 0, 1, 0.5, 0.3), 1.2});
    f.push_back({rir_scalar(0, 0, 0, 0, 0, 0.3), -0.3});
    f.push_back({rir_scalar(1, 0, 0.5, 1, 0.5, 0.3), 0.5});
    f.push_back({rir_scalar(1, 0, 0, 0, 0, 1.0), 0.0});
    f.push_back({rir_scalar(0, 0, 0.5, 1, 0, 0.3), 0.7});
    f.push_back({rir_scalar(0, 0, 0, 0, 0.5, 1.0), -0.5});
    f.push_back({rir_scalar(0, 0, 0, 1, 0.5, 0.0), 1.5});
    f.push_back({rir_scalar(0, 1, 0.5, 0, 0.5, 0.7), -0.2});
    f.push_back({rir_scalar(0, 0, 0, 1, 1.0, 0.3), 1.7});
    // Clipped surrogate.
    f.push_back({clip_term(1.5, 1, 0.2), 1.2});
    f.push_back({clip_term(1.0, 0.37, 0.2), 0.37});
    f.push_back({clip_term(1.0, -2.5, 0.2), -2.5});
    f.push_back({clip_term(0.5, -1, 0.2), -0.8});
    f.push_back({clip_term(0.5, 1, 0.2), 0.5});
    f.push_back({clip_term(1.5, -1, 0.2), -1.5});
    f.push_back({clip_term(0.9, 2, 0.2), 1.8});
    f.push_back({clip_term(1.1, -2, 0.2), -2.2});
    f.push_back({clip_term(0.7, 0, 0.2), 0.0});
    f.push_back({clip_term(1.3, 2, 0.1), 2.2});
    f.push_back({clip_term(0.85, -1, 0.1), -0.9});
    f.push_back({clip_term(1.2, 1, 0.2), 1.2});
    // Group standardization.
    auto push_adv = [&](const std::vector<double>& x, double delta, const std::vector<double>& want) {
        const auto a = advantages(x, delta);
        for (std::size_t i = 0; i < a.size(); ++i) f.push_back({a[i], want[i]});
    };
    push_adv({1, 1, 1, 1}, 1e-8, {0, 0, 0, 0});
    push_adv({0, 2}, 1e-8, {-1 / (1 + 1e-8), 1 / (1 + 1e-8)});
    push_adv({1, 3}, 0.0, {-1, 1});
    push_adv({0, 0, 3, 3}, 0.0, {-1, -1, 1, 1});
    push_adv({2, 4, 4, 4, 5, 5, 7, 9}, 0.0, {-1.5, -0.5, -0.5, -0.5, 0, 0, 1, 2});
    push_adv({1.5, -0.3}, 0.0, {1, -1});
    push_adv({0, 0, 0, 1}, 1e-8,
             {-0.25 / (0.4330127018922193 + 1e-8), -0.25 / (0.4330127018922193 + 1e-8),
              -0.25 / (0.4330127018922193 + 1e-8), 0.75 / (0.4330127018922193 + 1e-8)});

    double worst = 0.0;
    for (const auto& x : f) worst = std::max(worst, std::abs(x.got - x.want));
    return {f.size() >= 20 && worst <= 1e-12, fmt("%zu fixtures, max abs error %.3g", f.size(), worst)};
}

// ---------------------------------------------------------------- criterion 2

// A chosen rollout of up to 8 tokens: usually well-formed with a random
// answer, sometimes arbitrary tokens.
std::vector<int> random_rollout(Rng& rng) {
    if (rng.bernoulli(0.75)) {
        std::optional<int> cite;
        if (rng.bernoulli(0.5)) cite = static_cast<int>(rng.below(32));
        return testing::answer_trajectory(static_cast<int>(rng.below(4)), cite).tokens;
    }
    std::vector<int> t(1 + rng.below(8));
    for (auto& x : t) x = static_cast<int>(rng.below(policy::kVocabSize));
    return t;
}

trainer::Rewards rewards_of(const std::vector<int>& tokens, const env::Task& task, double lambda_fmt) {
    const auto parsed = verifier::parse_answer(tokens, task.options);
    return {static_cast<double>(verifier::accuracy_reward(parsed, task.gold)),
            verifier::format_reward(parsed, lambda_fmt)};
}

// Sampling from a small-F policy rarely yields well-formed output, so the
// chosen rollouts are redrawn; contexts and patches stay as produced.
void randomize_rollouts(trainer::Group& g, Rng& rng, double lambda_fmt) {
    for (auto& item : g.items) {
        if (item.repaired) {
            item.repaired->tokens = random_rollout(rng);
            item.reward_repaired = rewards_of(item.repaired->tokens, *g.task, lambda_fmt);
        } else {
            item.first_pass.tokens = random_rollout(rng);
            item.reward_first = rewards_of(item.first_pass.tokens, *g.task, lambda_fmt);
            item.z = item.reward_first.accuracy == 1.0;
            item.unrepaired = !item.z;
        }
    }
}

Outcome gradient_fidelity() {
    const policy::FeatureSpec spec{32};
    trainer::TrainerConfig cfg;
    cfg.G = 4;
    policy::SamplingConfig sampling;
    sampling.max_len = 8;
    env::EnvConfig ecfg;
    ecfg.hidden_fraction = 0.5;
    const teacher::OracleTeacher oracle;

    int accepted = 0, rejected = 0, with_repairs = 0, with_clipping = 0, with_signal = 0;
    double worst = 0.0;
    for (std::uint64_t c = 0; accepted < 100; ++c) {
        if (c > 1000) return {false, "could not assemble 100 kink-free instances"};
        Rng rng(derive_seed(0xfd, c));
        std::vector<env::Task> tasks;
        const int n_tasks = 1;
        for (int k = 0; k < n_tasks; ++k) tasks.push_back(env::generate_task(rng.next_u64(), ecfg));
        const auto old = testing::random_params(spec, rng.next_u64(), 0.3, policy::Role::sampling_snapshot);
        const auto cur = testing::perturbed(old, rng.next_u64(), 0.05 + 0.6 * rng.unit(), policy::Role::current);
        const auto ref = testing::perturbed(old, rng.next_u64(), 0.1, policy::Role::reference);
        cfg.beta = rng.bernoulli(0.5) ? 0.04 : 0.5;
        std::vector<trainer::Group> batch;
        for (int k = 0; k < n_tasks; ++k) {
            batch.push_back(trainer::first_pass(old, tasks[k], k, ecfg.budget, cfg, sampling, rng.next_u64()));
            trainer::repair(batch.back(), oracle, old, ecfg.budget, cfg, sampling, rng.next_u64());
            randomize_rollouts(batch.back(), rng, cfg.lambda_fmt);
            trainer::score_group(batch.back(), cfg);
        }
        // Reject instances with a ratio near a clip boundary, where the
        // surrogate has a kink and central differences are meaningless.
        bool kink = false, clipped = false, repaired = false, signal = false;
        for (const auto& g : batch)
            for (const auto& item : g.items) {
                repaired |= item.repaired.has_value();
                signal |= item.advantage != 0;
                const auto& tr = item.chosen();
                const auto lp = policy::logprob(cur, *item.chosen_context, tr.tokens);
                const auto lo = policy::logprob(old, *item.chosen_context, tr.tokens);
                for (std::size_t t = 0; t < lp.size(); ++t) {
                    const double r = std::exp(lp[t] - lo[t]);
                    kink |= std::abs(r - (1 - cfg.epsilon)) < 1e-3 || std::abs(r - (1 + cfg.epsilon)) < 1e-3;
                    clipped |= item.advantage != 0 && (r < 1 - cfg.epsilon || r > 1 + cfg.epsilon);
                }
            }
        if (kink) {
            ++rejected;
            continue;
        }
        const auto analytic = trainer::ffr_objective(cur, old, ref, batch, cfg);
        const auto fd = testing::numeric_gradient(cur, [&](const policy::PolicyParams& p) {
            return trainer::ffr_objective(p, old, ref, batch, cfg).value;
        });
        worst = std::max(worst, testing::rel_error(analytic.gradient, fd));
        ++accepted;
        with_repairs += repaired;
        with_clipping += clipped;
        with_signal += signal;
    }
    return {worst < 1e-5 && with_repairs > 0 && with_clipping > 0,
            fmt("%d instances (%d with nonzero advantages, %d with repaired items, %d with clipped tokens, "
                "%d rejected near kinks), max relative error %.3g",
                accepted, with_signal, with_repairs, with_clipping, rejected, worst)};
}

// ---------------------------------------------------------------- criterion 3

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

Outcome grpo_reduction() {
    const teacher::OracleTeacher oracle;
    const int budget = 8;
    std::vector<std::string> problems;
    int steps_checked = 0;

    // Teacher off against the vanilla path, on tasks that do fail.
    {
        env::EnvConfig e;
        e.hidden_fraction = 0.5;
        const auto init = policy::PolicyParams::format_prior({}, 11);
        trainer::TrainerConfig off;
        off.teacher_mode = teacher::TeacherMode::off;
        trainer::TrainerConfig van;
        van.algorithm = trainer::Algorithm::grpo;
        auto a = trainer::init_state(init), b = trainer::init_state(init);
        long failures = 0;
        for (int s = 0; s < 5; ++s) {
            const auto tasks = cli::training_batch(e, s, 8);
            const auto ra = trainer::train_step(a, tasks, budget, off, {}, oracle, 700 + s, 5);
            const auto rb = trainer::train_step(b, tasks, budget, van, {}, oracle, 700 + s, 5);
            failures += ra.record.interventions;
            const auto oa = trainer::ffr_objective(a.current, a.snapshot, a.reference, ra.groups, off);
            const auto ob = trainer::vanilla_grpo_objective(b.current, b.snapshot, b.reference, rb.groups, van);
            if (!same_bits(ra.record.objective, rb.record.objective)) problems.push_back("teacher-off value");
            if (!same_bits(ra.update, rb.update)) problems.push_back("teacher-off update");
            if (!same_bits(oa.gradient, ob.gradient) || !same_bits(oa.value, ob.value))
                problems.push_back("teacher-off gradient");
            if (!same_bits(a.current.weights, b.current.weights)) problems.push_back("teacher-off parameters");
            ++steps_checked;
        }
        if (failures == 0) problems.push_back("teacher-off batches never failed");
    }

    // Batches in which every first pass is correct, with the teacher on.
    {
        env::EnvConfig e;
        e.hidden_fraction = 0.0;
        e.decoy_visible_rate = 0.0;
        auto init = policy::PolicyParams::format_prior({}, 12, 60.0);
        // Read the seen-evidence slot: on visible tasks only gold is seen.
        for (int j = 0; j < 4; ++j) init.row(policy::OPT_A + j)[init.spec.evidence_begin() + j] += 20.0;
        trainer::TrainerConfig ffr;
        trainer::TrainerConfig van;
        van.algorithm = trainer::Algorithm::grpo;
        auto a = trainer::init_state(init), b = trainer::init_state(init);
        for (int s = 0; s < 5; ++s) {
            // Only questions whose sampled frames already show the answer.
            std::vector<env::Task> tasks;
            for (long k = 100 * (s + 1); tasks.size() < 4; ++k)
                for (auto& t : cli::training_batch(e, k, 1))
                    if (metrics::rule_solver(env::observe(t, budget)) == t.gold) tasks.push_back(std::move(t));
            const auto ra = trainer::train_step(a, tasks, budget, ffr, {}, oracle, 800 + s, 5);
            const auto rb = trainer::train_step(b, tasks, budget, van, {}, oracle, 800 + s, 5);
            if (ra.record.interventions != 0) {
                problems.push_back("all-correct batch had failures");
                break;
            }
            const auto oa = trainer::ffr_objective(a.current, a.snapshot, a.reference, ra.groups, ffr);
            const auto ob = trainer::vanilla_grpo_objective(b.current, b.snapshot, b.reference, rb.groups, van);
            if (!same_bits(ra.record.objective, rb.record.objective)) problems.push_back("all-correct value");
            if (!same_bits(ra.update, rb.update)) problems.push_back("all-correct update");
            if (!same_bits(oa.gradient, ob.gradient) || !same_bits(oa.value, ob.value))
                problems.push_back("all-correct gradient");
            if (!same_bits(a.current.weights, b.current.weights)) problems.push_back("all-correct parameters");
            ++steps_checked;
        }
    }
    std::string detail = fmt("%d paired steps compared bitwise", steps_checked);
    for (const auto& p : problems) detail += "; mismatch: " + p;
    return {problems.empty(), detail};
}

// ---------------------------------------------------------------- criterion 4

Outcome advantage_normalization() {
    Rng rng(0xad);
    const std::vector<double> levels = {1.5, 1.0, 0.5, 0.0, 1.2, 0.7, 0.2, -0.3};
    double worst = 0.0;
    long zero_var = 0, zero_var_bad = 0;
    for (int g = 0; g < 10000; ++g) {
        const int G = 2 + static_cast<int>(rng.below(15));
        std::vector<double> x(static_cast<std::size_t>(G));
        const int kind = static_cast<int>(rng.below(3));
        for (auto& v : x) {
            if (kind == 0) v = levels[rng.below(levels.size())];
            else if (kind == 1) v = 10 * rng.normal();
            else v = levels[rng.below(2)];
        }
        if (rng.bernoulli(0.1)) std::fill(x.begin(), x.end(), x[0]);
        const auto a = trainer::advantages(x, 1e-8);
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
            ++zero_var;
            zero_var_bad += std::any_of(a.begin(), a.end(), [](double v) { return v != 0.0; });
        }
        worst = std::max(worst, std::abs(std::accumulate(a.begin(), a.end(), 0.0) / G));
    }
    return {worst <= 1e-9 && zero_var > 0 && zero_var_bad == 0,
            fmt("10000 groups, max |mean A| %.3g, %ld zero-variance groups (%ld nonzero)", worst, zero_var,
                zero_var_bad)};
}

// ---------------------------------------------------------------- criterion 5

Outcome leakage_audit(cli::AuditReport& kept) {
    cli::ExperimentConfig cfg;
    const auto rep = cli::leakage_audit(cfg, 2000, teacher::OracleTeacher{});
    kept = rep;
    const double blind = rep.compliant ? double(rep.blind_correct) / double(rep.compliant) : 0.0;
    const double band = 3 * metrics::standard_error(0.25, rep.compliant);

    const auto adv = cli::leakage_audit(cfg, 400, teacher::AdversarialTeacher{});

    // The literal bad strings from the constraint table, on a counting task.
    const auto t = testing::find_task(env::ScenarioType::counting, {},
                                      [](const env::Task& t) { return t.option_values[t.gold] == "3"; });
    const std::vector<std::string> bad = {"There are exactly 3 people in frame 15.", "The answer is B.",
                                          "You should select 3.", "The count is 3 because someone enters."};
    int caught = 0;
    for (const auto& s : bad) {
        teacher::EvidencePatch p;
        p.content = {"free_text", {{"text", s}}};
        p.key_frames = teacher::frame_span(14, 16);
        const auto v = teacher::leakage_check(p, t);
        caught += !v.passed && v.violation_kind == teacher::ViolationKind::direct;
    }
    teacher::EvidencePatch good;
    good.content = {"free_text", {{"text", "Recount the subjects within the frame range [13, 17]"}}};
    good.key_frames = teacher::frame_span(13, 17);
    const bool good_passes = teacher::leakage_check(good, t).passed;

    const bool ok = rep.failures >= 2000 && rep.compliant >= 2000 && rep.direct == 0 && rep.partial == 0 &&
                    adv.direct == adv.failures && caught == static_cast<int>(bad.size()) && good_passes &&
                    std::abs(blind - 0.25) <= band;
    return {ok, fmt("oracle: %ld failures, %ld direct, %ld partial, blind-decode %.4f (chance band +/-%.4f); "
                    "adversarial: %ld/%ld direct; literal bad strings %d/%zu flagged",
                    rep.failures, rep.direct, rep.partial, blind, band, adv.direct, adv.failures, caught, bad.size())};
}

// ---------------------------------------------------------- criteria 6, 7, 10

struct PairedRun {
    std::uint64_t seed;
    cli::RunResult ffr, vanilla;
};

cli::ExperimentConfig default_config(std::uint64_t seed, trainer::Algorithm alg) {
    cli::ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.env.seed = seed;
    cfg.trainer.algorithm = alg;
    return cfg;
}

double mean_heldout(std::span<const metrics::StepRecord> window) {
    double s = 0.0;
    int n = 0;
    for (const auto& r : window)
        if (r.heldout_accuracy) s += *r.heldout_accuracy, ++n;
    return n ? s / n : std::nan("");
}

Outcome mechanism(const std::vector<PairedRun>& runs) {
    int passed = 0;
    std::string detail;
    for (const auto& pr : runs) {
        const auto [early, late] = metrics::early_late(pr.ffr.records);
        const double ie = metrics::intervention_ratio(early), il = metrics::intervention_ratio(late);
        const double drop = 1.0 - il / ie;
        const double ae = mean_heldout(early), al = mean_heldout(late);
        const bool ok = drop >= 0.30 && al > ae;
        passed += ok;
        detail += fmt("%sseed %llu: ratio %.3f -> %.3f (%.0f%% drop), held-out %.3f -> %.3f%s", detail.empty() ? "" : "; ",
                      static_cast<unsigned long long>(pr.seed), ie, il, 100 * drop, ae, al, ok ? "" : " (miss)");
    }
    return {passed * 2 > static_cast<int>(runs.size()), fmt("%d/%zu seeds; ", passed, runs.size()) + detail};
}

Outcome ffr_beats_vanilla(const std::vector<PairedRun>& runs) {
    int wins = 0;
    std::string detail;
    for (const auto& pr : runs) {
        env::EnvConfig e;
        e.seed = pr.seed;
        const auto hidden = cli::heldout_tasks(e, 2000, true);
        const double f = metrics::eval_accuracy(pr.ffr.final_params, hidden, e.budget).accuracy();
        const double v = metrics::eval_accuracy(pr.vanilla.final_params, hidden, e.budget).accuracy();
        const bool ok = f - v >= 0.03;
        wins += ok;
        detail += fmt("%sseed %llu: ffr %.3f vs vanilla %.3f", detail.empty() ? "" : "; ",
                      static_cast<unsigned long long>(pr.seed), f, v);
    }
    return {wins >= 2, fmt("%d/%zu pairs ahead by >= 3 points on 2000 hidden tasks; ", wins, runs.size()) + detail};
}

Outcome fix_rates(const std::vector<PairedRun>& runs, const cli::AuditReport& audit) {
    bool ok = true;
    std::string detail;
    auto check = [&](const std::string& label, const std::array<metrics::FixCount, 3>& counts) {
        long a = 0, s = 0;
        double weighted = 0.0;
        std::string rates;
        for (int e = 0; e < 3; ++e) {
            const auto& c = counts[static_cast<std::size_t>(e)];
            ok &= c.successes >= 0 && c.successes <= c.attempts;
            a += c.attempts;
            s += c.successes;
            if (c.attempts) {
                const double rate = double(c.successes) / double(c.attempts);
                weighted += rate * double(c.attempts);
                rates += fmt(" %s %.3f (%ld)", std::string(teacher::to_string(static_cast<teacher::ErrorType>(e))).c_str(),
                             rate, c.attempts);
            }
        }
        if (a > 0) {
            const double overall = double(s) / double(a);
            ok &= std::abs(overall - weighted / double(a)) <= 1e-12;
            detail += fmt("%s%s:", detail.empty() ? "" : "; ", label.c_str()) + rates + fmt(" overall %.3f", overall);
        }
    };
    for (const auto& pr : runs) {
        const auto f = metrics::fix_success_rate(pr.ffr.records);
        std::array<metrics::FixCount, 3> counts{};
        for (const auto& [type, c] : f.counts) counts[static_cast<std::size_t>(type)] = c;
        // The library's overall must equal the attempt-weighted mean too.
        if (f.overall) {
            double w = 0.0;
            long a = 0;
            for (const auto& [type, c] : f.counts) w += f.per_type.at(type) * c.attempts, a += c.attempts;
            ok &= std::abs(*f.overall - w / double(a)) <= 1e-12;
        }
        check(fmt("train seed %llu", static_cast<unsigned long long>(pr.seed)), counts);
    }
    check("audit", audit.fixes);
    return {ok, detail};
}

// ---------------------------------------------------------------- criterion 8

Outcome kappa_sweep(const fs::path& dir) {
    const std::vector<double> kappas = {0.1, 0.3, 0.5, 0.7, 1.0};
    cli::ExperimentConfig cfg;
    cfg.steps = 200;  // smoke mode
    cfg.eval_every = 100;
    cfg.eval_tasks = 200;
    cfg.out_dir = dir / "sweep";
    fs::create_directories(cfg.out_dir);
    std::ostringstream ini_text;
    ini_text << cli::serialize_config(cfg);
    std::ofstream(dir / "sweep.ini") << ini_text.str();
    std::ostringstream out, err;
    std::vector<std::string> argv;
    const int rc = cli::cmd_sweep_kappa(dir / "sweep.ini", kappas, out, err);
    const auto table = nlohmann::json::parse(out.str().empty() ? "{}" : out.str());
    const bool table_ok = rc == 0 && table.contains("sweep") && table["sweep"].size() == kappas.size() &&
                          fs::exists(cfg.out_dir / "sweep.csv");

    // Per item, over repaired and first-pass items alike.
    const auto p = policy::PolicyParams::format_prior({}, 5);
    env::EnvConfig e;
    e.hidden_fraction = 0.5;
    const auto tasks = cli::training_batch(e, 0, 32);
    const teacher::OracleTeacher oracle;
    std::vector<std::vector<trainer::GroupItem>> by_kappa;
    for (double k : kappas) {
        trainer::TrainerConfig c;
        c.kappa = k;
        std::vector<trainer::GroupItem> items;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            auto g = trainer::first_pass(p, tasks[i], static_cast<int>(i), e.budget, c, {}, derive_seed(3, i));
            trainer::repair(g, oracle, p, e.budget, c, {}, derive_seed(4, i));
            trainer::score_group(g, c);
            items.insert(items.end(), g.items.begin(), g.items.end());
        }
        by_kappa.push_back(std::move(items));
    }
    long repaired = 0, untouched = 0, bad = 0;
    for (std::size_t i = 0; i < by_kappa[0].size(); ++i) {
        const bool rep = by_kappa[0][i].repaired.has_value();
        (rep ? repaired : untouched)++;
        for (std::size_t j = 1; j < kappas.size(); ++j) {
            const double prev = by_kappa[j - 1][i].rir, cur = by_kappa[j][i].rir;
            bad += rep ? !(cur < prev) : !(cur == prev);
        }
    }
    std::string rows;
    if (table.contains("sweep"))
        for (const auto& r : table["sweep"])
            rows += fmt(" k=%.1f acc=%.3f ratio=%.3f;", r.value("kappa", 0.0), r.value("final_accuracy", -1.0),
                        r.value("final_intervention_ratio", -1.0));
    return {table_ok && bad == 0 && repaired > 0,
            fmt("smoke sweep (200 steps) table:", 0) + rows +
                fmt(" reward scalar monotone on %ld repaired and constant on %ld other items (%ld violations)", repaired,
                    untouched, bad)};
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism(const fs::path& dir, const PairedRun& in_process) {
    std::vector<std::string> ckpt, metrics_log;
    for (const char* sub : {"run_a", "run_b"}) {
        auto cfg = default_config(in_process.seed, trainer::Algorithm::ffr);
        cfg.out_dir = dir / sub;
        std::ofstream(dir / (std::string(sub) + ".ini")) << cli::serialize_config(cfg);
        const std::string cmd = std::string(FFR_CLI_PATH) + " train --config " + (dir / (std::string(sub) + ".ini")).string() +
                                " > " + (dir / (std::string(sub) + ".out")).string() + " 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, std::string("train process failed: ") + slurp(dir / (std::string(sub) + ".out"))};
        ckpt.push_back(slurp(cfg.out_dir / "final.bin"));
        metrics_log.push_back(slurp(cfg.out_dir / "metrics.jsonl"));
    }
    const auto a = policy::load_checkpoint(dir / "run_a" / "final.bin").checksum();
    const auto b = policy::load_checkpoint(dir / "run_b" / "final.bin").checksum();
    const auto c = in_process.ffr.final_params.checksum();
    const bool ok = ckpt[0] == ckpt[1] && metrics_log[0] == metrics_log[1] && !metrics_log[0].empty() && a == b && a == c;
    return {ok, fmt("two separate processes: checksums %016llx / %016llx (in-process %016llx), metrics logs %s",
                    static_cast<unsigned long long>(a), static_cast<unsigned long long>(b),
                    static_cast<unsigned long long>(c), metrics_log[0] == metrics_log[1] ? "identical" : "differ")};
}

}  // namespace

// Optional arguments restrict the run to the listed criterion numbers.
int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    const auto dir = work_dir();
    report(1, "formula exactness", formula_fixtures);
    report(2, "gradient fidelity", gradient_fidelity);
    report(3, "GRPO reduction", grpo_reduction);
    report(4, "advantage normalization", advantage_normalization);
    cli::AuditReport audit;
    report(5, "leakage audit", [&] { return leakage_audit(audit); });

    std::vector<PairedRun> runs;
    const teacher::OracleTeacher oracle;
    const bool need_runs = wanted(6) || wanted(7) || wanted(9) || wanted(10);
    const auto t_runs = std::chrono::steady_clock::now();
    for (std::uint64_t seed : {1, 2, 3}) {
        if (!need_runs) break;
        PairedRun pr{seed, {}, {}};
        pr.ffr = cli::run_training(default_config(seed, trainer::Algorithm::ffr), oracle);
        pr.vanilla = cli::run_training(default_config(seed, trainer::Algorithm::grpo), oracle);
        runs.push_back(std::move(pr));
    }
    if (need_runs)
        std::printf("info: 3 paired default runs (2000 steps each, FFR and vanilla) took %.1fs\n",
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t_runs).count());
    report(6, "intervention ratio falls while accuracy rises", [&] { return mechanism(runs); });
    report(7, "FFR beats vanilla GRPO on hidden tasks", [&] { return ffr_beats_vanilla(runs); });
    report(8, "patch-tax sweep", [&] { return kappa_sweep(dir); });
    report(9, "determinism", [&] { return determinism(dir, runs.front()); });
    report(10, "fix-rate reporting", [&] { return fix_rates(runs, audit); });

    fs::remove_all(dir);
    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}

#include "ffr/cli/commands.hpp"

#include "ffr/env/serialize.hpp"
#include "ffr/errors.hpp"
#include "ffr/policy/checkpoint.hpp"
#include "ffr/teacher/leakage.hpp"
#include "ffr/verifier/verifier.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ffr::cli {
namespace {

// Stream salts keep training, held-out, audit and export tasks disjoint.
constexpr std::uint64_t kTrainStream = 0x7a5c;
constexpr std::uint64_t kHeldoutStream = 0x4e1d;
constexpr std::uint64_t kAuditStream = 0xa0d1;
constexpr std::uint64_t kExportStream = 0xe4c0;
constexpr std::uint64_t kInitStream = 0x1417;

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

std::string kappa_label(double k) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, k);
    return std::string(buf, res.ptr);
}

/// Exclusive ownership of an output directory for one command.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f) throw Error("out_dir_locked", "another command holds " + path_.string());
        std::fclose(f);
    }
    ~DirLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path path_;
};

void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("io_error", "cannot create " + dir.string() + ": " + ec.message());
}

std::optional<double> last_third_ratio(const std::vector<metrics::StepRecord>& records) {
    if (records.empty()) return std::nullopt;
    const auto late = metrics::early_late(records).second;
    if (late.empty()) return std::nullopt;
    return metrics::intervention_ratio(late);
}

nlohmann::json fix_json(const metrics::FixRates& f) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [type, c] : f.counts) {
        nlohmann::json row = {{"attempts", c.attempts}, {"successes", c.successes}};
        if (auto it = f.per_type.find(type); it != f.per_type.end()) row["rate"] = it->second;
        j[std::string(teacher::to_string(type))] = row;
    }
    if (f.overall) j["overall"] = *f.overall;
    return j;
}

nlohmann::json eval_json(const metrics::EvalResult& r) {
    nlohmann::json per = nlohmann::json::object();
    for (auto s : env::kAllScenarios) {
        const auto i = static_cast<std::size_t>(s);
        if (r.n_by_scenario[i] == 0) continue;
        per[std::string(env::to_string(s))] = {{"n", r.n_by_scenario[i]}, {"accuracy", *r.accuracy(s)}};
    }
    return {{"n", r.n},
            {"accuracy", r.accuracy()},
            {"standard_error", metrics::standard_error(r.accuracy(), r.n)},
            {"per_scenario", per}};
}

/// Training run that writes its artifacts into cfg.out_dir.
RunResult train_into(const ExperimentConfig& cfg, const teacher::Teacher& teacher) {
    prepare_dir(cfg.out_dir);
    DirLock lock(cfg.out_dir);
    {
        std::ofstream c(cfg.out_dir / "config.ini", std::ios::trunc);
        c << serialize_config(cfg);
    }
    metrics::RecordSink sink(cfg.out_dir / "metrics.jsonl");
    RunCallbacks cb;
    cb.on_record = [&](const metrics::StepRecord& r) { sink.append(r); };
    cb.on_checkpoint = [&](long step, const policy::PolicyParams& p) {
        policy::save_checkpoint(cfg.out_dir / ("ckpt_" + std::to_string(step) + ".bin"), p);
    };
    auto res = run_training(cfg, teacher, cb);
    policy::save_checkpoint(cfg.out_dir / "final.bin", res.final_params);
    metrics::write_summary_csv(cfg.out_dir / "summary.csv", res.records);
    return res;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
    } catch (const nlohmann::json::exception& e) {
        emit_error(err, "malformed_input", e.what());
    } catch (const std::exception& e) {
        emit_error(err, "internal_error", e.what());
    }
    return 2;
}

}  // namespace

std::vector<env::Task> training_batch(const env::EnvConfig& env, long step, int n) {
    std::vector<env::Task> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out.push_back(env::generate_task(
            derive_seed(env.seed, kTrainStream, static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(n) + k),
            env));
    return out;
}

std::vector<env::Task> heldout_tasks(const env::EnvConfig& env, int n, bool hidden_only) {
    env::EnvConfig c = env;
    if (hidden_only) c.hidden_fraction = 1.0;
    std::vector<env::Task> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; static_cast<int>(out.size()) < n; ++i) {
        auto t = env::generate_task(derive_seed(env.seed, kHeldoutStream, i), c);
        if (!hidden_only || t.hidden) out.push_back(std::move(t));
    }
    return out;
}

policy::PolicyParams initial_policy(const ExperimentConfig& cfg) {
    return policy::PolicyParams::format_prior(cfg.policy.features, derive_seed(cfg.seed, kInitStream),
                                              cfg.policy.prior_strength, cfg.policy.prior_noise);
}

RunResult run_training(const ExperimentConfig& cfg, const teacher::Teacher& teacher, const RunCallbacks& cb) {
    validate(cfg);
    const auto heldout = heldout_tasks(cfg.env, cfg.eval_tasks, false);
    auto state = trainer::init_state(initial_policy(cfg));
    RunResult res;
    for (long s = 0; s < cfg.steps; ++s) {
        const auto batch = training_batch(cfg.env, s, cfg.trainer.batch_tasks);
        auto step = trainer::train_step(state, batch, cfg.env.budget, cfg.trainer, cfg.sampling, teacher,
                                        derive_seed(cfg.seed, static_cast<std::uint64_t>(s)), cfg.steps);
        const bool eval_now = (s + 1) % cfg.eval_every == 0 || s + 1 == cfg.steps;
        if (eval_now)
            step.record.heldout_accuracy = metrics::eval_accuracy(state.current, heldout, cfg.env.budget).accuracy();
        if (cb.on_record) cb.on_record(step.record);
        res.records.push_back(step.record);
        if (eval_now && cb.on_checkpoint) cb.on_checkpoint(s + 1, state.current);
    }
    if (cfg.steps == 0 && cb.on_checkpoint) cb.on_checkpoint(0, state.current);
    res.final_params = state.current;
    return res;
}

nlohmann::json AuditReport::to_json() const {
    const auto rate = [](long a, long b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    const long checked = failures - unavailable;
    nlohmann::json fx = nlohmann::json::object();
    long att = 0, suc = 0;
    for (int e = 0; e < teacher::kNumErrorTypes; ++e) {
        const auto& c = fixes[static_cast<std::size_t>(e)];
        att += c.attempts;
        suc += c.successes;
        nlohmann::json row = {{"attempts", c.attempts}, {"successes", c.successes}};
        if (c.attempts) row["rate"] = rate(c.successes, c.attempts);
        fx[std::string(teacher::to_string(static_cast<teacher::ErrorType>(e)))] = row;
    }
    if (att) fx["overall"] = rate(suc, att);
    const double blind = rate(blind_correct, compliant);
    return {{"failures", failures},
            {"unavailable", unavailable},
            {"checked", checked},
            {"direct", direct},
            {"partial", partial},
            {"direct_rate", rate(direct, checked)},
            {"partial_rate", rate(partial, checked)},
            {"total_rate", rate(direct + partial, checked)},
            {"rules", rules},
            {"compliant", compliant},
            {"blind_accuracy", blind},
            {"blind_standard_error", metrics::standard_error(blind, compliant)},
            {"fix_success", fx}};
}

AuditReport leakage_audit(const ExperimentConfig& cfg, long n_failures, const teacher::Teacher& teacher) {
    if (n_failures < 100) throw ConfigError("leakage audit needs at least 100 failures");
    validate(cfg);
    const auto mode = cfg.trainer.teacher_mode == teacher::TeacherMode::off ? teacher::TeacherMode::with_gold
                                                                              : cfg.trainer.teacher_mode;
    const auto params = initial_policy(cfg);
    const int budget = cfg.env.budget;
    AuditReport rep;
    for (std::uint64_t i = 0; rep.failures < n_failures; ++i) {
        const auto task = env::generate_task(derive_seed(cfg.env.seed, kAuditStream, i), cfg.env);
        const auto obs = env::observe(task, budget);
        const auto prepared = policy::prepare(obs, params.spec);
        std::optional<policy::Trajectory> failure;
        for (int g = 0; g < cfg.trainer.G && !failure; ++g) {
            Rng rng(derive_seed(cfg.seed, i, static_cast<std::uint64_t>(g)));
            auto traj = policy::sample_trajectory(params, prepared, cfg.sampling, rng);
            if (verifier::accuracy_reward(verifier::parse_answer(traj, task), task.gold) == 0) failure = std::move(traj);
        }
        if (!failure) continue;
        ++rep.failures;

        teacher::Diagnosis d;
        try {
            d = teacher.diagnose(task, obs, *failure, mode);
        } catch (const DiagnosisUnavailable&) {
            ++rep.unavailable;
            continue;
        }
        const auto verdict = teacher::leakage_check(d.patch, task);
        if (!verdict.passed) {
            if (verdict.violation_kind == teacher::ViolationKind::direct) ++rep.direct;
            else ++rep.partial;
            ++rep.rules[verdict.detail];
            continue;
        }
        ++rep.compliant;
        if (metrics::blind_decode(d.patch, task.options) == task.gold) ++rep.blind_correct;

        const auto patched = policy::prepare(env::observe_with_patch(task, budget, d.patch), params.spec);
        Rng rng(derive_seed(cfg.seed, i, 0xf1));
        const auto retry = policy::sample_trajectory(params, patched, cfg.sampling, rng);
        auto& fc = rep.fixes[static_cast<std::size_t>(d.patch.error_classification)];
        ++fc.attempts;
        if (verifier::accuracy_reward(verifier::parse_answer(retry, task), task.gold) == 1) ++fc.successes;
    }
    return rep;
}

std::vector<SweepRow> sweep_kappa(const ExperimentConfig& cfg, const std::vector<double>& kappas) {
    if (kappas.size() < 2) throw ConfigError("kappa sweep needs at least two values");
    const teacher::OracleTeacher oracle;
    std::vector<SweepRow> rows;
    for (double k : kappas) {
        SweepRow row;
        row.kappa = k;
        try {
            ExperimentConfig cell = cfg;
            cell.trainer.kappa = k;
            cell.out_dir = cfg.out_dir / ("kappa_" + kappa_label(k));
            validate(cell);
            const auto res = train_into(cell, oracle);
            row.final_accuracy =
                metrics::eval_accuracy(res.final_params, heldout_tasks(cell.env, cell.eval_tasks, false), cell.env.budget)
                    .accuracy();
            row.final_intervention_ratio = last_third_ratio(res.records);
        } catch (const Error& e) {
            row.error_kind = e.kind();
            row.error_message = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << nlohmann::json{{"kind", kind}, {"message", message}}.dump() << std::endl;
}

int cmd_train(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const teacher::OracleTeacher oracle;
        const auto res = train_into(cfg, oracle);
        nlohmann::json summary = {{"steps", cfg.steps},
                                  {"out_dir", cfg.out_dir.string()},
                                  {"final_checksum", hex64(res.final_params.checksum())}};
        if (!res.records.empty()) {
            const auto [early, late] = metrics::early_late(res.records);
            if (!early.empty()) summary["early_intervention_ratio"] = metrics::intervention_ratio(early);
            if (!late.empty()) summary["late_intervention_ratio"] = metrics::intervention_ratio(late);
            if (res.records.back().heldout_accuracy)
                summary["final_heldout_accuracy"] = *res.records.back().heldout_accuracy;
            summary["fix_success"] = fix_json(metrics::fix_success_rate(res.records));
        }
        out << summary.dump() << std::endl;
        return 0;
    });
}

int cmd_eval(const std::filesystem::path& ckpt, int n_tasks, std::uint64_t seed, int budget, bool hidden_only,
             bool with_patch, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (n_tasks < 1) throw ConfigError("--tasks must be positive");
        if (!std::filesystem::exists(ckpt)) throw Error("checkpoint_not_found", "no checkpoint at " + ckpt.string());
        const auto params = policy::load_checkpoint(ckpt);
        env::EnvConfig env;
        env.seed = seed;
        env.budget = budget;
        env::validate(env);
        const auto tasks = heldout_tasks(env, n_tasks, hidden_only);
        auto report = eval_json(metrics::eval_accuracy(params, tasks, budget, with_patch));
        report["checkpoint"] = ckpt.string();
        report["checksum"] = hex64(params.checksum());
        report["hidden_only"] = hidden_only;
        report["with_patch"] = with_patch;
        out << report.dump() << std::endl;
        return 0;
    });
}

int cmd_sweep_kappa(const std::filesystem::path& config, const std::vector<double>& kappas, std::ostream& out,
                    std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const auto rows = sweep_kappa(cfg, kappas);
        prepare_dir(cfg.out_dir);
        std::ofstream csv(cfg.out_dir / "sweep.csv", std::ios::trunc);
        csv << "kappa,final_accuracy,final_intervention_ratio,error\n";
        nlohmann::json table = nlohmann::json::array();
        int failed = 0;
        for (const auto& r : rows) {
            nlohmann::json j = {{"kappa", r.kappa}};
            csv << r.kappa << ',';
            if (r.final_accuracy) j["final_accuracy"] = *r.final_accuracy, csv << *r.final_accuracy;
            csv << ',';
            if (r.final_intervention_ratio)
                j["final_intervention_ratio"] = *r.final_intervention_ratio, csv << *r.final_intervention_ratio;
            csv << ',' << r.error_kind << '\n';
            if (!r.error_kind.empty()) {
                ++failed;
                j["error"] = {{"kind", r.error_kind}, {"message", r.error_message}};
                emit_error(err, r.error_kind, "kappa " + kappa_label(r.kappa) + ": " + r.error_message);
            }
            table.push_back(j);
        }
        out << nlohmann::json{{"sweep", table}}.dump() << std::endl;
        return failed ? 1 : 0;
    });
}

int cmd_leakage_audit(const std::filesystem::path& config, long n, bool adversarial, std::ostream& out,
                      std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const teacher::OracleTeacher oracle;
        const teacher::AdversarialTeacher stub;
        auto report = leakage_audit(cfg, n, adversarial ? static_cast<const teacher::Teacher&>(stub) : oracle);
        auto j = report.to_json();
        j["teacher"] = adversarial ? "adversarial" : "oracle";
        out << j.dump() << std::endl;
        return 0;
    });
}

int cmd_export_tasks(const std::filesystem::path& config, int n, const std::filesystem::path& dest,
                     std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (n < 1) throw ConfigError("--n must be positive");
        const auto cfg = load_config(config);
        std::vector<env::Task> tasks;
        tasks.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            tasks.push_back(env::generate_task(derive_seed(cfg.env.seed, kExportStream, static_cast<std::uint64_t>(i)),
                                               cfg.env));
        if (dest.has_parent_path()) prepare_dir(dest.parent_path());
        std::ofstream f(dest, std::ios::trunc);
        if (!f) throw Error("io_error", "cannot write " + dest.string());
        env::write_tasks(f, tasks);
        out << nlohmann::json{{"exported", n}, {"path", dest.string()}}.dump() << std::endl;
        return 0;
    });
}

}  // namespace ffr::cli

#include "../support.hpp"

#include "ffr/errors.hpp"
#include "ffr/metrics/metrics.hpp"
#include "ffr/teacher/teacher.hpp"

#include <doctest.h>

#include <numeric>

using namespace ffr;
using namespace ffr::trainer;

namespace {

/// Independent evaluation of the surrogate value straight from logprob().
double reference_value(const policy::PolicyParams& p, const policy::PolicyParams& old,
                       const policy::PolicyParams& ref, const std::vector<Group>& batch, const TrainerConfig& cfg) {
    double total = 0.0;
    for (const auto& g : batch) {
        double clip = 0.0, kl = 0.0;
        long T = 0;
        for (const auto& item : g.items) {
            const auto& tr = item.chosen();
            const auto& ctx = *item.chosen_context;
            const auto lp = policy::logprob(p, ctx, tr.tokens);
            const auto lo = policy::logprob(old, ctx, tr.tokens);
            for (std::size_t t = 0; t < tr.tokens.size(); ++t) {
                const double r = std::exp(lp[t] - lo[t]);
                clip += std::min(r * item.advantage,
                                 std::clamp(r, 1 - cfg.epsilon, 1 + cfg.epsilon) * item.advantage);
                std::vector<double> phi(ctx.base.size()), lg(policy::kVocabSize), pp(policy::kVocabSize),
                    pr(policy::kVocabSize);
                policy::set_prefix(phi, ctx.base, std::span<const int>(tr.tokens).first(t), p.spec);
                policy::distribution(p, phi, 1.0, lg, pp);
                policy::distribution(ref, phi, 1.0, lg, pr);
                for (int v = 0; v < policy::kVocabSize; ++v) kl += pp[v] * std::log(pp[v] / pr[v]);
            }
            T += tr.length();
        }
        total += clip / T - cfg.beta * kl / T;
    }
    return total;
}

std::vector<env::Task> tasks_for(std::uint64_t seed, int n, double hidden = 0.25) {
    env::EnvConfig cfg;
    cfg.hidden_fraction = hidden;
    std::vector<env::Task> out;
    for (int i = 0; i < n; ++i) out.push_back(env::generate_task(derive_seed(seed, static_cast<std::uint64_t>(i)), cfg));
    return out;
}

std::vector<Group> make_batch(const policy::PolicyParams& old, const std::vector<env::Task>& tasks,
                              const TrainerConfig& cfg, const policy::SamplingConfig& s, std::uint64_t seed) {
    const teacher::OracleTeacher oracle;
    std::vector<Group> batch;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        batch.push_back(first_pass(old, tasks[k], static_cast<int>(k), 8, cfg, s, derive_seed(seed, k, 1)));
        repair(batch.back(), oracle, old, 8, cfg, s, derive_seed(seed, k, 2));
        score_group(batch.back(), cfg);
    }
    return batch;
}

}  // namespace

TEST_CASE("reward scalar") {
    CHECK(rir_scalar(1, 1, 0.5, 0, 0, 0.3) == 1.5);
    CHECK(std::abs(rir_scalar(0, 0, 0, 1, 0.5, 0.3) - 1.2) <= 1e-12);
    CHECK(std::abs(rir_scalar(0, 0, 0, 0, 0, 0.3) + 0.3) <= 1e-12);
    // Patch tax only touches repaired items.
    for (double k : {0.0, 0.1, 0.7}) CHECK(rir_scalar(1, 1, 0.5, 0, 0, k) == 1.5);
    double prev = rir_scalar(0, 0, 0, 1, 0.5, 0.0);
    for (double k : {0.1, 0.3, 0.5, 0.7, 1.0}) {
        const double v = rir_scalar(0, 0, 0, 1, 0.5, k);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("advantages") {
    CHECK(advantages({1, 1, 1, 1}, 1e-8) == std::vector<double>{0, 0, 0, 0});
    const auto a = advantages({0, 2}, 1e-8);
    CHECK(std::abs(a[0] + 1) <= 1e-6);
    CHECK(std::abs(a[1] - 1) <= 1e-6);
    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> x(2 + rng.below(10));
        for (auto& v : x) v = rng.normal() * 3;
        const auto A = advantages(x, 1e-8);
        CHECK(std::abs(std::accumulate(A.begin(), A.end(), 0.0) / A.size()) <= 1e-9);
    }
}

TEST_CASE("clip term") {
    CHECK(std::abs(clip_term(1.5, 1, 0.2) - 1.2) <= 1e-12);
    for (double A : {-2.0, -0.5, 0.0, 0.7, 3.0}) CHECK(clip_term(1.0, A, 0.2) == A);
    CHECK(std::abs(clip_term(0.5, -1, 0.2) + 0.8) <= 1e-12);
    // Continuous at the boundary.
    CHECK(std::abs(clip_term(1.2 - 1e-12, 1, 0.2) - clip_term(1.2 + 1e-12, 1, 0.2)) <= 1e-11);
    CHECK(std::abs(clip_term(1.2, 1, 0.2) - 1.2) <= 1e-15);
}

TEST_CASE("objective value against an independent evaluation") {
    const policy::FeatureSpec spec{32};
    TrainerConfig cfg;
    cfg.G = 4;
    policy::SamplingConfig s;
    s.max_len = 8;
    const auto tasks = tasks_for(5, 3, 0.5);
    for (int c = 0; c < 5; ++c) {
        const auto base = testing::random_params(spec, 50 + c, 0.3);
        const auto old = testing::perturbed(base, 60 + c, 0.05, policy::Role::sampling_snapshot);
        const auto ref = testing::perturbed(base, 70 + c, 0.05, policy::Role::reference);
        const auto batch = make_batch(old, tasks, cfg, s, 80 + c);
        const auto r = ffr_objective(base, old, ref, batch, cfg);
        CHECK(std::abs(r.value - reference_value(base, old, ref, batch, cfg)) <= 1e-12);
        CHECK(r.kl >= 0.0);
    }
}

TEST_CASE("objective at identical policies") {
    const policy::FeatureSpec spec{32};
    TrainerConfig cfg;
    cfg.G = 4;
    policy::SamplingConfig s;
    s.max_len = 8;
    const auto p = testing::random_params(spec, 1, 0.3);
    const auto batch = make_batch(p, tasks_for(6, 3, 0.5), cfg, s, 3);
    const auto r = ffr_objective(p, p, p, batch, cfg);
    double want = 0.0;
    for (const auto& g : batch) {
        double num = 0.0, T = 0.0;
        for (const auto& item : g.items) num += item.chosen().length() * item.advantage, T += item.chosen().length();
        want += num / T;
    }
    CHECK(std::abs(r.value - want) <= 1e-12);
    CHECK(r.kl == 0.0);

    // Equal rewards give zero advantages, leaving only the KL penalty.
    auto flat = batch;
    for (auto& g : flat)
        for (auto& item : g.items) item.reward_first = {1.0, 0.5};
    const auto ref = testing::perturbed(p, 2, 0.1, policy::Role::reference);
    const auto z = vanilla_grpo_objective(p, p, ref, flat, cfg);
    CHECK(z.kl > 0.0);
    CHECK(std::abs(z.value + cfg.beta * z.kl * static_cast<double>(batch.size())) <= 1e-12);
}

TEST_CASE("objective gradient matches central differences") {
    const policy::FeatureSpec spec{32};
    TrainerConfig cfg;
    cfg.G = 4;
    policy::SamplingConfig s;
    s.max_len = 8;
    for (int c = 0; c < 6; ++c) {
        const auto tasks = tasks_for(100 + c, 2, 0.5);
        const auto old = testing::random_params(spec, 200 + c, 0.3, policy::Role::sampling_snapshot);
        const auto p = testing::perturbed(old, 300 + c, 0.02, policy::Role::current);
        const auto ref = testing::perturbed(old, 400 + c, 0.05, policy::Role::reference);
        const auto batch = make_batch(old, tasks, cfg, s, 500 + c);
        const auto r = ffr_objective(p, old, ref, batch, cfg);
        const auto fd = testing::numeric_gradient(
            p, [&](const policy::PolicyParams& q) { return ffr_objective(q, old, ref, batch, cfg).value; });
        CHECK(testing::rel_error(r.gradient, fd) < 1e-5);
    }
}

TEST_CASE("patched items are scored under their own observation") {
    TrainerConfig cfg;
    cfg.G = 8;
    env::EnvConfig ecfg;
    ecfg.hidden_fraction = 1.0;
    const auto t = testing::find_task(env::ScenarioType::temporal, ecfg, [](const env::Task& t) { return t.hidden; });
    const auto p = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 1);
    auto g = first_pass(p, t, 0, 8, cfg, {}, 4);
    const auto before = g.items;
    repair(g, teacher::OracleTeacher{}, p, 8, cfg, {}, 5);
    score_group(g, cfg);
    int repaired = 0;
    for (std::size_t i = 0; i < g.items.size(); ++i) {
        const auto& item = g.items[i];
        if (item.z == 1) {
            CHECK(!item.patch);
            CHECK(!item.repaired);
            CHECK(item.first_pass == before[i].first_pass);
            CHECK(&item.chosen() == &item.first_pass);
            continue;
        }
        REQUIRE(item.repaired);
        ++repaired;
        CHECK(item.repaired->patched);
        const auto patched = env::observe_with_patch(t, 8, *item.patch);
        CHECK(item.chosen_context->digest == env::digest(patched));
        CHECK(item.sampled_digest == item.chosen_context->digest);
        // The patch carries what a rule reader needs.
        CHECK(metrics::rule_solver(patched) == t.gold);
        CHECK(item.rir == rir_scalar(0, 0, item.reward_first.format, item.reward_repaired->accuracy,
                                     item.reward_repaired->format, cfg.kappa));
    }
    CHECK(repaired > 0);

    auto broken = std::vector<Group>{g};
    for (auto& item : broken[0].items)
        if (item.repaired) item.sampled_digest ^= 1;
    CHECK_THROWS_AS(ffr_objective(p, p, p, broken, cfg), std::logic_error);
}

TEST_CASE("reward scalars fall with the patch tax per item") {
    const auto p = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 1);
    const auto tasks = tasks_for(9, 4, 1.0);
    std::vector<std::vector<double>> rir_by_kappa;
    for (double k : {0.1, 0.3, 0.5, 0.7, 1.0}) {
        TrainerConfig cfg;
        cfg.kappa = k;
        std::vector<double> rirs;
        for (const auto& g : make_batch(p, tasks, cfg, {}, 3))
            for (const auto& item : g.items) rirs.push_back(item.rir);
        rir_by_kappa.push_back(rirs);
    }
    const auto batch = make_batch(p, tasks, TrainerConfig{}, {}, 3);
    std::size_t idx = 0;
    for (const auto& g : batch)
        for (const auto& item : g.items) {
            for (std::size_t j = 1; j < rir_by_kappa.size(); ++j) {
                if (item.repaired) CHECK(rir_by_kappa[j][idx] < rir_by_kappa[j - 1][idx]);
                else CHECK(rir_by_kappa[j][idx] == rir_by_kappa[j - 1][idx]);
            }
            ++idx;
        }
}

TEST_CASE("teacher off reduces to the vanilla step bit for bit") {
    const auto init = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 7);
    const auto tasks = tasks_for(12, 4, 0.5);
    const teacher::OracleTeacher oracle;
    TrainerConfig off;
    off.teacher_mode = teacher::TeacherMode::off;
    TrainerConfig van;
    van.algorithm = Algorithm::grpo;
    auto a = init_state(init), b = init_state(init);
    for (int step = 0; step < 3; ++step) {
        const auto ra = train_step(a, tasks, 8, off, {}, oracle, 40 + step, 3);
        const auto rb = train_step(b, tasks, 8, van, {}, oracle, 40 + step, 3);
        CHECK(ra.record.objective == rb.record.objective);
        CHECK(ra.update == rb.update);
        CHECK(a.current.weights == b.current.weights);
        CHECK(ra.record.unrepaired == 0);
        for (const auto& g : ra.groups)
            for (const auto& item : g.items) CHECK(!item.repaired);
    }
}

TEST_CASE("frozen roles stay frozen and runs replay") {
    const auto init = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 7);
    const auto tasks = tasks_for(13, 4, 0.5);
    const teacher::OracleTeacher oracle;
    TrainerConfig cfg;
    auto a = init_state(init), b = init_state(init);
    const auto ref_sum = a.reference.checksum();
    for (int step = 0; step < 4; ++step) {
        const auto before = a.current.checksum();
        train_step(a, tasks, 8, cfg, {}, oracle, 90 + step, 4);
        train_step(b, tasks, 8, cfg, {}, oracle, 90 + step, 4);
        CHECK(a.snapshot.checksum() == before);
        CHECK(a.reference.checksum() == ref_sum);
        CHECK(a.snapshot.role == policy::Role::sampling_snapshot);
    }
    CHECK(a.current.checksum() == b.current.checksum());
    CHECK(a.step == 4);
}

TEST_CASE("update respects the gradient-norm clip") {
    const auto init = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 2);
    TrainerConfig cfg;
    cfg.max_grad_norm = 1e-3;
    cfg.lr_schedule = "constant";
    auto st = init_state(init);
    const auto r = train_step(st, tasks_for(14, 4, 1.0), 8, cfg, {}, teacher::OracleTeacher{}, 1, 1);
    double n2 = 0.0;
    for (double u : r.update) n2 += u * u;
    CHECK(std::sqrt(n2) <= cfg.lr * cfg.max_grad_norm * (1 + 1e-12));
    CHECK(r.record.interventions <= r.record.groups * r.record.G);
}

TEST_CASE("non-finite gradients abort without touching parameters") {
    auto init = policy::PolicyParams::format_prior(policy::FeatureSpec{}, 2);
    init.weights[3] = std::numeric_limits<double>::infinity();
    auto st = init_state(init);
    const auto sum = st.current.checksum();
    CHECK_THROWS_AS(train_step(st, tasks_for(15, 2), 8, TrainerConfig{}, {}, teacher::OracleTeacher{}, 1, 1),
                    NonFiniteGradient);
    CHECK(st.current.checksum() == sum);
}

TEST_CASE("learning-rate schedule") {
    TrainerConfig cfg;
    CHECK(scheduled_lr(cfg, 0, 100) == cfg.lr);
    CHECK(std::abs(scheduled_lr(cfg, 50, 100) - cfg.lr / 2) <= 1e-15);
    CHECK(scheduled_lr(cfg, 100, 100) <= 1e-18);
    cfg.lr_schedule = "constant";
    CHECK(scheduled_lr(cfg, 70, 100) == cfg.lr);
}

TEST_CASE("config validation") {
    TrainerConfig c;
    CHECK_NOTHROW(validate(c));
    for (auto bad : std::vector<std::function<void(TrainerConfig&)>>{
             [](TrainerConfig& c) { c.G = 1; }, [](TrainerConfig& c) { c.epsilon = 0; },
             [](TrainerConfig& c) { c.kappa = -0.1; }, [](TrainerConfig& c) { c.delta = 0; },
             [](TrainerConfig& c) { c.lr_schedule = "step"; }}) {
        TrainerConfig x;
        bad(x);
        CHECK_THROWS_AS(validate(x), ConfigError);
    }
}

#include "ffr/metrics/metrics.hpp"

#include "ffr/env/evidence.hpp"
#include "ffr/errors.hpp"
#include "ffr/teacher/leakage.hpp"
#include "ffr/verifier/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ffr::metrics {
namespace {

const std::set<std::string, std::less<>>& stopwords() {
    static const std::set<std::string, std::less<>> s = {
        "the", "and", "for", "was", "were", "with", "that", "this", "from", "into", "then", "than",
        "what", "which", "its", "are", "has", "had", "have", "not", "but", "any", "all", "one"};
    return s;
}

}  // namespace

std::set<std::string> content_words(std::string_view text) {
    std::set<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 3 && !stopwords().count(cur)) out.insert(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::array<int, env::kNumOptions> blind_scores(const teacher::EvidencePatch& patch,
                                               const std::array<std::string, env::kNumOptions>& options) {
    const auto patch_words = content_words(teacher::patch_text(patch));
    std::array<int, env::kNumOptions> scores{};
    for (int i = 0; i < env::kNumOptions; ++i)
        for (const auto& w : content_words(options[static_cast<std::size_t>(i)]))
            scores[static_cast<std::size_t>(i)] += patch_words.count(w) ? 1 : 0;
    return scores;
}

env::AnswerIndex blind_decode(const teacher::EvidencePatch& patch,
                              const std::array<std::string, env::kNumOptions>& options) {
    const auto s = blind_scores(patch, options);
    return static_cast<env::AnswerIndex>(std::max_element(s.begin(), s.end()) - s.begin());
}

double intervention_ratio(std::span<const StepRecord> window) {
    if (window.empty()) throw RangeError("intervention ratio over an empty window");
    double num = 0.0, den = 0.0;
    for (const auto& r : window) {
        num += static_cast<double>(r.interventions);
        den += static_cast<double>(r.groups) * r.G;
    }
    return den > 0.0 ? num / den : 0.0;
}

FixRates fix_success_rate(std::span<const StepRecord> records) {
    FixRates out;
    FixCount total;
    for (int e = 0; e < teacher::kNumErrorTypes; ++e) {
        FixCount c;
        for (const auto& r : records) {
            c.attempts += r.fixes_by_type[static_cast<std::size_t>(e)].attempts;
            c.successes += r.fixes_by_type[static_cast<std::size_t>(e)].successes;
        }
        if (c.attempts == 0) continue;
        const auto type = static_cast<teacher::ErrorType>(e);
        out.counts[type] = c;
        out.per_type[type] = static_cast<double>(c.successes) / static_cast<double>(c.attempts);
        total.attempts += c.attempts;
        total.successes += c.successes;
    }
    if (total.attempts > 0) out.overall = static_cast<double>(total.successes) / static_cast<double>(total.attempts);
    return out;
}

std::pair<std::span<const StepRecord>, std::span<const StepRecord>> early_late(std::span<const StepRecord> records) {
    const std::size_t third = records.size() / 3;
    return {records.first(third), records.last(third)};
}

env::AnswerIndex rule_solver(const env::Observation& obs) {
    const auto ev = env::read_evidence(obs);
    for (int j = 0; j < env::kNumOptions; ++j)
        if (ev[static_cast<std::size_t>(j)].patch_direct) return j;
    for (int j = 0; j < env::kNumOptions; ++j)
        if (ev[static_cast<std::size_t>(j)].direct) return j;
    return static_cast<env::AnswerIndex>(env::digest(obs) % env::kNumOptions);
}

std::optional<double> EvalResult::accuracy(env::ScenarioType s) const {
    const auto i = static_cast<std::size_t>(s);
    if (n_by_scenario[i] == 0) return std::nullopt;
    return static_cast<double>(correct_by_scenario[i]) / static_cast<double>(n_by_scenario[i]);
}

EvalResult eval_with_decoder(const std::vector<env::Task>& tasks, int budget, bool with_patch, const Decoder& decode) {
    if (tasks.empty()) throw RangeError("evaluation over an empty taskset");
    EvalResult res;
    const teacher::OracleTeacher oracle;
    for (const auto& task : tasks) {
        env::Observation obs = env::observe(task, budget);
        if (with_patch) {
            policy::Trajectory blank;
            blank.tokens = {policy::EOS};
            const auto d = oracle.diagnose(task, obs, blank, teacher::TeacherMode::with_gold);
            obs = env::observe_with_patch(task, budget, d.patch);
        }
        const auto answer = decode(task, obs);
        const auto s = static_cast<std::size_t>(task.scenario);
        ++res.n;
        ++res.n_by_scenario[s];
        if (answer && *answer == task.gold) {
            ++res.correct;
            ++res.correct_by_scenario[s];
        }
    }
    return res;
}

EvalResult eval_accuracy(const policy::PolicyParams& params, const std::vector<env::Task>& tasks, int budget,
                         bool with_patch) {
    return eval_with_decoder(tasks, budget, with_patch,
                             [&](const env::Task& task, const env::Observation& obs) {
                                 const auto tokens = policy::greedy_decode(params, policy::prepare(obs, params.spec));
                                 return verifier::parse_answer(tokens, task.options).answer;
                             });
}

double standard_error(double p, long n) {
    return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

}  // namespace ffr::metrics

#include "ffr/verifier/verifier.hpp"

#include <cctype>

namespace ffr::verifier {
namespace {

std::string lower_trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out(s.substr(b, e - b));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::optional<env::AnswerIndex> parse_answer_text(std::string_view text,
                                                  const std::array<std::string, env::kNumOptions>& options) {
    const std::string t = lower_trim(text);
    if (t.empty()) return std::nullopt;
    std::optional<env::AnswerIndex> hit;
    int hits = 0;
    for (int i = 0; i < env::kNumOptions; ++i) {
        const std::string letter(1, static_cast<char>('a' + i));
        if (t == letter || t == lower_trim(options[static_cast<std::size_t>(i)])) {
            if (!hit || *hit != i) ++hits;
            hit = i;
        }
    }
    if (hits != 1) return std::nullopt;
    return hit;
}

ParsedOutput parse_answer(const std::vector<int>& tokens,
                          const std::array<std::string, env::kNumOptions>& options) {
    using namespace policy;
    ParsedOutput out;
    std::size_t i = 0;
    const std::size_t n = tokens.size();
    if (i < n && tokens[i] == THINK_OPEN) {
        std::size_t j = i + 1;
        while (j < n && is_content(tokens[j])) ++j;
        if (j < n && tokens[j] == THINK_CLOSE) {
            out.has_think_block = true;
            i = j + 1;
        }
    }
    if (i < n && tokens[i] == ANSWER_OPEN) {
        std::size_t j = i + 1;
        while (j < n && (is_option(tokens[j]) || is_content(tokens[j]))) ++j;
        if (j < n && tokens[j] == ANSWER_CLOSE && j > i + 1) {
            out.has_answer_block = true;
            out.raw_answer_text = render(std::vector<int>(tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                                          tokens.begin() + static_cast<std::ptrdiff_t>(j)));
            out.answer = parse_answer_text(out.raw_answer_text, options);
        }
    }
    return out;
}

ParsedOutput parse_answer(const policy::Trajectory& trajectory, const env::Task& task) {
    return parse_answer(trajectory.tokens, task.options);
}

int accuracy_reward(const ParsedOutput& parsed, env::AnswerIndex gold) {
    return parsed.answer && *parsed.answer == gold ? 1 : 0;
}

double format_reward(const ParsedOutput& parsed, double lambda_fmt) {
    return parsed.has_think_block && parsed.has_answer_block ? lambda_fmt : 0.0;
}

}  // namespace ffr::verifier

#pragma once

#include "ffr/env/task.hpp"
#include "ffr/policy/vocab.hpp"

#include <optional>
#include <string>

namespace ffr::verifier {

inline constexpr double kDefaultFormatWeight = 0.5;

struct ParsedOutput {
    bool has_think_block = false;
    bool has_answer_block = false;
    std::optional<env::AnswerIndex> answer;
    std::string raw_answer_text;
    friend bool operator==(const ParsedOutput&, const ParsedOutput&) = default;
};

/// Case-insensitive exact match of `text` (trimmed) against the option
/// letters A-D and the full option strings. Ambiguous or unknown text maps
/// to nothing.
std::optional<env::AnswerIndex> parse_answer_text(std::string_view text,
                                                  const std::array<std::string, env::kNumOptions>& options);

/// Expects <think> content </think> then <answer> x </answer>. Total:
/// malformed input yields flags off and no answer.
ParsedOutput parse_answer(const policy::Trajectory& trajectory, const env::Task& task);
ParsedOutput parse_answer(const std::vector<int>& tokens,
                          const std::array<std::string, env::kNumOptions>& options);

/// 1 iff an answer was parsed and equals gold.
int accuracy_reward(const ParsedOutput& parsed, env::AnswerIndex gold);

/// lambda_fmt iff both blocks are well formed, else 0.
double format_reward(const ParsedOutput& parsed, double lambda_fmt = kDefaultFormatWeight);

}  // namespace ffr::verifier

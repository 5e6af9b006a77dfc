#pragma once

#include "ffr/env/task.hpp"
#include "ffr/teacher/patch.hpp"

#include <array>
#include <set>
#include <string>

namespace ffr::metrics {

/// Lower-cased alphanumeric words of length >= 3 that are not stopwords.
std::set<std::string> content_words(std::string_view text);

/// Per-option count of option content words present in the patch text.
std::array<int, env::kNumOptions> blind_scores(const teacher::EvidencePatch& patch,
                                               const std::array<std::string, env::kNumOptions>& options);

/// Best guess from the patch alone: highest overlap, lowest index on ties.
env::AnswerIndex blind_decode(const teacher::EvidencePatch& patch,
                              const std::array<std::string, env::kNumOptions>& options);

}  // namespace ffr::metrics

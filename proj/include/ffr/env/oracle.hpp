#pragma once

#include "ffr/env/task.hpp"

namespace ffr::env {

/// Replays the whole world and tests every option against the question.
/// Throws InconsistentTaskError unless exactly one option holds.
AnswerIndex gold_answer(const Task& task);

/// Per-option truth values from the same replay (test hook).
std::array<bool, kNumOptions> consistent_options(const Task& task);

}  // namespace ffr::env

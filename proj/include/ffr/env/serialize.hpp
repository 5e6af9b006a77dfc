#pragma once

#include "ffr/env/task.hpp"

#include <json.hpp>

#include <iosfwd>

namespace ffr::env {

nlohmann::json to_json(const Task& task);
/// Throws ConfigError on a malformed record.
Task task_from_json(const nlohmann::json& j);

/// One JSON object per line.
void write_tasks(std::ostream& out, const std::vector<Task>& tasks);
std::vector<Task> read_tasks(std::istream& in);

}  // namespace ffr::env

#pragma once

#include "ffr/env/world.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ffr::env {

enum class ScenarioType : std::uint8_t { counting, dynamics, temporal, spatial, attribute, logic };
inline constexpr int kNumScenarios = 6;
inline constexpr std::array<ScenarioType, kNumScenarios> kAllScenarios = {
    ScenarioType::counting, ScenarioType::dynamics, ScenarioType::temporal,
    ScenarioType::spatial,  ScenarioType::attribute, ScenarioType::logic};

std::string_view to_string(ScenarioType s);
std::optional<ScenarioType> parse_scenario(std::string_view s);

/// Failure style a scenario mostly provokes; also the bucket used by the
/// "paper" scenario mix.
enum class ScenarioStyle : std::uint8_t { temporal, spatial, misconception };
ScenarioStyle style_of(ScenarioType s);

enum class ScenarioMix : std::uint8_t { uniform, paper };
std::string_view to_string(ScenarioMix m);
std::optional<ScenarioMix> parse_mix(std::string_view s);

using AnswerIndex = int;
inline constexpr int kNumOptions = 4;

struct Question {
    std::string text;
    /// Ordered slot fillers, e.g. {"target", "book"}, {"region", "top-left"}.
    std::vector<std::pair<std::string, std::string>> slots;

    std::optional<std::string> slot(std::string_view key) const;
    friend bool operator==(const Question&, const Question&) = default;
};

struct Task {
    World world;
    ScenarioType scenario = ScenarioType::counting;
    Question question;
    std::array<std::string, kNumOptions> options;        // display strings
    std::array<std::string, kNumOptions> option_values;  // canonical values
    AnswerIndex gold = 0;
    int budget = 0;  // observation budget the task was generated against
    bool hidden = false;  // decisive event outside the budget subsample
    int decisive_frame = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const Task&, const Task&) = default;
};

struct EnvConfig {
    int num_frames = 32;
    int grid_w = 4;
    int grid_h = 4;
    int budget = 8;
    int num_objects = 5;
    ScenarioMix scenario_mix = ScenarioMix::paper;
    double hidden_fraction = 0.25;
    /// Probability that the salient distractor interaction lands on a sampled
    /// frame in tasks whose decisive event is itself visible. In
    /// dependency-hidden tasks it is always visible.
    double decoy_visible_rate = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

/// Throws ConfigError on out-of-range fields.
void validate(const EnvConfig& config);

/// Uniform-stride frame subsample starting at 0; budget 1 takes the middle frame.
std::vector<int> sample_frames(int num_frames, int budget);

ScenarioType draw_scenario(std::uint64_t seed, ScenarioMix mix);

/// Deterministic in (seed, scenario, config). Throws ConfigError when the
/// grid or clip cannot host the scenario.
Task generate_task(std::uint64_t seed, ScenarioType scenario, const EnvConfig& config);

/// Draws the scenario from config.scenario_mix, then generates.
Task generate_task(std::uint64_t seed, const EnvConfig& config);

}  // namespace ffr::env

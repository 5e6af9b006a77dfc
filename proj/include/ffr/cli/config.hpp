#pragma once

#include "ffr/env/task.hpp"
#include "ffr/policy/features.hpp"
#include "ffr/policy/policy.hpp"
#include "ffr/trainer/trainer.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace ffr::cli {

struct PolicyInit {
    policy::FeatureSpec features;
    double prior_strength = 10.0;
    double prior_noise = 0.01;
    friend bool operator==(const PolicyInit&, const PolicyInit&) = default;
};

struct ExperimentConfig {
    env::EnvConfig env;
    trainer::TrainerConfig trainer;
    policy::SamplingConfig sampling;
    PolicyInit policy;
    long steps = 2000;
    long eval_every = 200;
    int eval_tasks = 500;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "runs/default";
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Looks up an environment variable; empty optional when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// INI text with sections [env] [trainer] [sampling] [policy] [experiment].
/// Keys absent from the text keep their defaults; unknown keys are errors.
/// `FFR_<SECTION>_<KEY>` variables (upper case) override file values.
ExperimentConfig parse_config(std::istream& in, const EnvLookup& lookup = {});
/// Throws Error("config_not_found") when the file does not exist.
ExperimentConfig load_config(const std::filesystem::path& path, const EnvLookup& lookup = process_env());

/// Every key, values printed so that parsing restores them exactly.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace ffr::cli

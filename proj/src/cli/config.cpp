#include "ffr/cli/config.hpp"

#include "ffr/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ffr::cli {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("bad value for " + key + ": '" + s + "'");
    return v;
}

struct Key {
    const char* section;
    const char* name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T, typename Field>
Key numeric(const char* section, const char* name, Field field) {
    return {section, name,
            [field](const ExperimentConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return fmt_double(field(const_cast<ExperimentConfig&>(c)));
                else return std::to_string(field(const_cast<ExperimentConfig&>(c)));
            },
            [field, section, name](ExperimentConfig& c, const std::string& s) {
                field(c) = parse_number<T>(std::string(section) + "." + name, s);
            }};
}

template <typename Field, typename Print, typename Parse>
Key enumerated(const char* section, const char* name, Field field, Print print, Parse parse) {
    return {section, name,
            [field, print](const ExperimentConfig& c) {
                return std::string(print(field(const_cast<ExperimentConfig&>(c))));
            },
            [field, parse, section, name](ExperimentConfig& c, const std::string& s) {
                auto v = parse(s);
                if (!v) throw ConfigError(std::string("bad value for ") + section + "." + name + ": '" + s + "'");
                field(c) = *v;
            }};
}

#define FIELD(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        numeric<int>("env", "num_frames", FIELD(env.num_frames)),
        numeric<int>("env", "grid_w", FIELD(env.grid_w)),
        numeric<int>("env", "grid_h", FIELD(env.grid_h)),
        numeric<int>("env", "budget", FIELD(env.budget)),
        numeric<int>("env", "num_objects", FIELD(env.num_objects)),
        enumerated("env", "scenario_mix", FIELD(env.scenario_mix),
                   [](env::ScenarioMix m) { return env::to_string(m); },
                   [](std::string_view s) { return env::parse_mix(s); }),
        numeric<double>("env", "hidden_fraction", FIELD(env.hidden_fraction)),
        numeric<double>("env", "decoy_visible_rate", FIELD(env.decoy_visible_rate)),
        numeric<std::uint64_t>("env", "seed", FIELD(env.seed)),

        numeric<int>("trainer", "G", FIELD(trainer.G)),
        numeric<double>("trainer", "epsilon", FIELD(trainer.epsilon)),
        numeric<double>("trainer", "beta", FIELD(trainer.beta)),
        numeric<double>("trainer", "kappa", FIELD(trainer.kappa)),
        numeric<double>("trainer", "delta", FIELD(trainer.delta)),
        numeric<double>("trainer", "lr", FIELD(trainer.lr)),
        {"trainer", "lr_schedule", [](const ExperimentConfig& c) { return c.trainer.lr_schedule; },
         [](ExperimentConfig& c, const std::string& s) { c.trainer.lr_schedule = s; }},
        numeric<double>("trainer", "max_grad_norm", FIELD(trainer.max_grad_norm)),
        numeric<double>("trainer", "lambda_fmt", FIELD(trainer.lambda_fmt)),
        enumerated("trainer", "teacher_mode", FIELD(trainer.teacher_mode),
                   [](teacher::TeacherMode m) { return teacher::to_string(m); },
                   [](std::string_view s) { return teacher::parse_teacher_mode(s); }),
        enumerated("trainer", "algorithm", FIELD(trainer.algorithm),
                   [](trainer::Algorithm a) { return trainer::to_string(a); },
                   [](std::string_view s) { return trainer::parse_algorithm(s); }),
        numeric<int>("trainer", "batch_tasks", FIELD(trainer.batch_tasks)),

        numeric<double>("sampling", "temperature", FIELD(sampling.temperature)),
        numeric<double>("sampling", "top_p", FIELD(sampling.top_p)),
        numeric<int>("sampling", "max_len", FIELD(sampling.max_len)),

        numeric<int>("policy", "feature_dim", FIELD(policy.features.dim)),
        numeric<std::uint64_t>("policy", "hash_seed", FIELD(policy.features.hash_seed)),
        numeric<double>("policy", "prior_strength", FIELD(policy.prior_strength)),
        numeric<double>("policy", "prior_noise", FIELD(policy.prior_noise)),

        numeric<long>("experiment", "steps", FIELD(steps)),
        numeric<long>("experiment", "eval_every", FIELD(eval_every)),
        numeric<int>("experiment", "eval_tasks", FIELD(eval_tasks)),
        numeric<std::uint64_t>("experiment", "seed", FIELD(seed)),
        {"experiment", "out_dir", [](const ExperimentConfig& c) { return c.out_dir.string(); },
         [](ExperimentConfig& c, const std::string& s) { c.out_dir = s; }},
    };
    return table;
}

#undef FIELD

std::string env_var_name(const Key& k) {
    std::string name = std::string("FFR_") + k.section + "_" + k.name;
    for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return name;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    env::validate(cfg.env);
    trainer::validate(cfg.trainer);
    if (!(cfg.sampling.temperature > 0.0)) throw ConfigError("sampling.temperature must be positive");
    if (!(cfg.sampling.top_p > 0.0 && cfg.sampling.top_p <= 1.0)) throw ConfigError("sampling.top_p must be in (0, 1]");
    if (cfg.sampling.max_len < 8 || cfg.sampling.max_len > policy::kMaxTrajectoryLength)
        throw ConfigError("sampling.max_len out of range");
    if (cfg.policy.features.dim < policy::kMinFeatureDim)
        throw ConfigError("policy.feature_dim must be at least " + std::to_string(policy::kMinFeatureDim));
    if (!(cfg.policy.prior_strength >= 0.0) || !(cfg.policy.prior_noise >= 0.0))
        throw ConfigError("policy prior parameters must be non-negative");
    if (cfg.steps < 0) throw ConfigError("experiment.steps must be non-negative");
    if (cfg.eval_every < 1) throw ConfigError("experiment.eval_every must be at least 1");
    if (cfg.eval_tasks < 1) throw ConfigError("experiment.eval_tasks must be at least 1");
    if (cfg.out_dir.empty()) throw ConfigError("experiment.out_dir is empty");
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

ExperimentConfig parse_config(std::istream& in, const EnvLookup& lookup) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    std::set<std::string> known;
    for (const auto& k : keys()) known.insert(std::string(k.section) + "." + k.name);
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("key outside a section: " + section);
        for (const auto& [name, value] : body)
            if (!known.count(section + "." + name)) throw ConfigError("unknown config key " + section + "." + name);
    }

    ExperimentConfig cfg;
    for (const auto& k : keys()) {
        std::optional<std::string> value;
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(std::string(k.section) + "." + k.name)))
            value = *v;
        if (lookup)
            if (auto v = lookup(env_var_name(k))) value = *v;
        if (value) k.set(cfg, *value);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const EnvLookup& lookup) {
    std::ifstream in(path);
    if (!in) throw Error("config_not_found", "no config file at " + path.string());
    return parse_config(in, lookup);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : keys()) {
        if (section != k.section) {
            if (!section.empty()) out << '\n';
            section = k.section;
            out << '[' << section << "]\n";
        }
        out << k.name << " = " << k.get(cfg) << '\n';
    }
    return out.str();
}

}  // namespace ffr::cli

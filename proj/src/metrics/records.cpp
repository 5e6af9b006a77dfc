#include "ffr/metrics/records.hpp"

#include "ffr/errors.hpp"
#include "ffr/metrics/metrics.hpp"

#include <iomanip>
#include <sstream>

namespace ffr::metrics {

nlohmann::json to_json(const StepRecord& r) {
    nlohmann::json fixes = nlohmann::json::object();
    for (int e = 0; e < teacher::kNumErrorTypes; ++e) {
        const auto& c = r.fixes_by_type[static_cast<std::size_t>(e)];
        fixes[std::string(teacher::to_string(static_cast<teacher::ErrorType>(e)))] = {{"attempts", c.attempts},
                                                                                     {"successes", c.successes}};
    }
    nlohmann::json j = {{"step", r.step},
                        {"groups", r.groups},
                        {"G", r.G},
                        {"interventions", r.interventions},
                        {"unrepaired", r.unrepaired},
                        {"fixes_by_type", fixes},
                        {"leakage_violations", {{"direct", r.leakage_direct}, {"partial", r.leakage_partial}}},
                        {"train_accuracy", r.train_accuracy},
                        {"objective", r.objective},
                        {"loss", r.loss},
                        {"kl", r.kl},
                        {"mean_advantage", r.mean_advantage},
                        {"grad_norm", r.grad_norm},
                        {"lr", r.lr}};
    if (r.heldout_accuracy) j["heldout_accuracy"] = *r.heldout_accuracy;
    return j;
}

StepRecord record_from_json(const nlohmann::json& j) {
    try {
        StepRecord r;
        r.step = j.at("step").get<long>();
        r.groups = j.at("groups").get<long>();
        r.G = j.at("G").get<int>();
        r.interventions = j.at("interventions").get<long>();
        r.unrepaired = j.at("unrepaired").get<long>();
        for (int e = 0; e < teacher::kNumErrorTypes; ++e) {
            const auto& c = j.at("fixes_by_type").at(std::string(teacher::to_string(static_cast<teacher::ErrorType>(e))));
            r.fixes_by_type[static_cast<std::size_t>(e)] = {c.at("attempts").get<long>(), c.at("successes").get<long>()};
        }
        r.leakage_direct = j.at("leakage_violations").at("direct").get<long>();
        r.leakage_partial = j.at("leakage_violations").at("partial").get<long>();
        r.train_accuracy = j.at("train_accuracy").get<double>();
        r.objective = j.at("objective").get<double>();
        r.loss = j.at("loss").get<double>();
        r.kl = j.at("kl").get<double>();
        r.mean_advantage = j.at("mean_advantage").get<double>();
        r.grad_norm = j.at("grad_norm").get<double>();
        r.lr = j.at("lr").get<double>();
        if (j.contains("heldout_accuracy")) r.heldout_accuracy = j.at("heldout_accuracy").get<double>();
        return r;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed metrics record: ") + ex.what());
    }
}

RecordSink::RecordSink(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("io_error", "cannot open metrics log " + path.string());
}

void RecordSink::append(const StepRecord& r) {
    out_ << to_json(r).dump() << '\n';
    out_.flush();
}

std::vector<StepRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io_error", "cannot open metrics log " + path.string());
    std::vector<StepRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(record_from_json(nlohmann::json::parse(line)));
    return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<StepRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("io_error", "cannot write " + path.string());
    out << "step,intervention_ratio,train_accuracy,heldout_accuracy,fix_temporal,fix_spatial,fix_misconception,fix_overall\n";
    out << std::setprecision(6);
    for (const auto& r : records) {
        const std::span<const StepRecord> one(&r, 1);
        const auto fix = fix_success_rate(one);
        auto rate = [&](teacher::ErrorType e) -> std::string {
            auto it = fix.per_type.find(e);
            if (it == fix.per_type.end()) return "";
            std::ostringstream s;
            s << std::setprecision(6) << it->second;
            return s.str();
        };
        out << r.step << ',' << intervention_ratio(one) << ',' << r.train_accuracy << ',';
        if (r.heldout_accuracy) out << *r.heldout_accuracy;
        out << ',' << rate(teacher::ErrorType::temporal) << ',' << rate(teacher::ErrorType::spatial) << ','
            << rate(teacher::ErrorType::misconception) << ',';
        if (fix.overall) out << *fix.overall;
        out << '\n';
    }
}

}  // namespace ffr::metrics

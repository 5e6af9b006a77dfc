#pragma once

#include "ffr/teacher/patch.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

namespace ffr::metrics {

struct FixCount {
    long attempts = 0;
    long successes = 0;
    friend bool operator==(const FixCount&, const FixCount&) = default;
};

struct StepRecord {
    long step = 0;
    long groups = 0;
    int G = 0;
    long interventions = 0;  // first-pass failures
    long unrepaired = 0;     // failures left without a usable patch
    std::array<FixCount, teacher::kNumErrorTypes> fixes_by_type{};
    long leakage_direct = 0;
    long leakage_partial = 0;
    double train_accuracy = 0.0;  // first-pass accuracy
    double objective = 0.0;
    double loss = 0.0;  // -objective
    double kl = 0.0;
    double mean_advantage = 0.0;
    double grad_norm = 0.0;
    double lr = 0.0;
    std::optional<double> heldout_accuracy;  // set on evaluation steps

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

nlohmann::json to_json(const StepRecord& r);
StepRecord record_from_json(const nlohmann::json& j);

/// Append-only line-delimited sink; one JSON object per record.
class RecordSink {
public:
    explicit RecordSink(const std::filesystem::path& path);
    void append(const StepRecord& r);

private:
    std::ofstream out_;
};

std::vector<StepRecord> read_records(const std::filesystem::path& path);

/// Columnar summary: step, intervention_ratio, train_accuracy,
/// heldout_accuracy, fix rates per type and overall.
void write_summary_csv(const std::filesystem::path& path, const std::vector<StepRecord>& records);

}  // namespace ffr::metrics

#pragma once

#include "ffr/env/observe.hpp"
#include "ffr/policy/vocab.hpp"
#include "ffr/teacher/patch.hpp"

#include <memory>

namespace ffr::teacher {

enum class TeacherMode : std::uint8_t { with_gold, no_gold, off };
std::string_view to_string(TeacherMode m);
std::optional<TeacherMode> parse_teacher_mode(std::string_view s);

struct Diagnosis {
    ErrorType error_type = ErrorType::misconception;
    EvidencePatch patch;
};

/// Frozen diagnostician: diagnose() must be a pure function of its inputs.
class Teacher {
public:
    virtual ~Teacher() = default;

    /// `student_obs` is what the student saw on its first pass. `attempt`
    /// counts re-diagnoses after a rejected patch. Throws
    /// DiagnosisUnavailable when no inconsistency can be shown (no_gold).
    virtual Diagnosis diagnose(const env::Task& task, const env::Observation& student_obs,
                               const policy::Trajectory& trajectory, TeacherMode mode,
                               int attempt = 0) const = 0;
};

/// Scripted oracle with full world access.
///
/// Error type: no parseable answer is a misconception; citing a frame the
/// student never saw is a temporal error; otherwise the failure is assigned
/// the scenario's style. with_gold localizes the decisive interaction in a
/// three-frame window; no_gold covers every scripted interaction.
class OracleTeacher final : public Teacher {
public:
    Diagnosis diagnose(const env::Task& task, const env::Observation& student_obs,
                       const policy::Trajectory& trajectory, TeacherMode mode,
                       int attempt = 0) const override;
};

/// Emits patches that state the answer outright. For leakage-audit tests.
class AdversarialTeacher final : public Teacher {
public:
    Diagnosis diagnose(const env::Task& task, const env::Observation& student_obs,
                       const policy::Trajectory& trajectory, TeacherMode mode,
                       int attempt = 0) const override;
};

/// Marker label for an interaction kind ("hand releases object", ...).
std::string_view marker_label(env::Action a);

}  // namespace ffr::teacher

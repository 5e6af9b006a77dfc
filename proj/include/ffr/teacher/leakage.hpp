#pragma once

#include "ffr/env/task.hpp"
#include "ffr/teacher/patch.hpp"

#include <optional>
#include <string>

namespace ffr::teacher {

enum class ViolationKind : std::uint8_t { direct, partial };
std::string_view to_string(ViolationKind k);

struct LeakageVerdict {
    bool passed = true;
    std::optional<ViolationKind> violation_kind;
    std::string detail;  // rule id, e.g. "option_text", "key_frame_width"
};

/// Blind-test rules. Direct: any patch text (content, marker labels) names
/// an option, a gold attribute or count, states an answer, or asserts an
/// ordering or cause. Partial: key frames are not one contiguous range of
/// width >= 3, or the patch-only decoder singles out one option. Bracketed
/// frame ranges are structural and skipped by the text rules.
LeakageVerdict leakage_check(const EvidencePatch& patch, const env::Task& task);

/// Every text slot a reader of the patch alone would see, with bracketed
/// frame ranges removed.
std::string patch_text(const EvidencePatch& patch);

}  // namespace ffr::teacher

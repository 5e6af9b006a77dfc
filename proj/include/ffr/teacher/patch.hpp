#pragma once

#include "ffr/env/world.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ffr::teacher {

enum class ErrorType : std::uint8_t { temporal, spatial, misconception };
inline constexpr int kNumErrorTypes = 3;
std::string_view to_string(ErrorType e);
std::optional<ErrorType> parse_error_type(std::string_view s);

enum class MarkerRelation : std::uint8_t { before, after, during };
std::string_view to_string(MarkerRelation r);
std::optional<MarkerRelation> parse_relation(std::string_view s);

struct TemporalMarker {
    MarkerRelation relation = MarkerRelation::during;
    std::string label;  // event category, never an object identity
    friend bool operator==(const TemporalMarker&, const TemporalMarker&) = default;
};

struct FrameRange {
    int lo = 0;
    int hi = 0;  // inclusive
    friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct SpatialRegion {
    FrameRange frames;
    env::Cell min;  // inclusive bounding cells
    env::Cell max;
    friend bool operator==(const SpatialRegion&, const SpatialRegion&) = default;
};

/// Guidance is a template id plus slot fillers; the text is only ever
/// rendered from a fixed template table, so no free text enters a patch.
/// Unknown ids render verbatim from the "text" slot (used by test fixtures).
struct PatchContent {
    std::string template_id;
    std::vector<std::pair<std::string, std::string>> slots;

    std::string render() const;
    friend bool operator==(const PatchContent&, const PatchContent&) = default;
};

struct EvidencePatch {
    ErrorType error_classification = ErrorType::misconception;
    PatchContent content;
    std::vector<int> key_frames;
    std::vector<TemporalMarker> temporal_markers;
    std::vector<SpatialRegion> spatial_regions;

    /// No frames to reveal; applying it is a no-op.
    bool empty() const { return key_frames.empty(); }
    friend bool operator==(const EvidencePatch&, const EvidencePatch&) = default;
};

/// Contiguous frame list [lo, hi].
std::vector<int> frame_span(int lo, int hi);

nlohmann::json to_json(const EvidencePatch& patch);
/// Throws ConfigError on a malformed record.
EvidencePatch patch_from_json(const nlohmann::json& j);

std::uint64_t patch_digest(const EvidencePatch& patch);

}  // namespace ffr::teacher

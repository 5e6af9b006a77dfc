#pragma once

#include "ffr/env/task.hpp"
#include "ffr/teacher/patch.hpp"
#include "ffr/teacher/tools.hpp"

#include <array>
#include <optional>
#include <vector>

namespace ffr::env {

struct ObjectView {
    Shape shape = Shape::cube;
    Color color = Color::red;
    Material material = Material::metal;
    Placement where = Placement::on_grid;
    Region region = Region::top_left;  // meaningful when on grid
    friend bool operator==(const ObjectView&, const ObjectView&) = default;
};

/// Coarse per-frame reading: region counts, which objects are on the grid
/// (by quadrant, not cell) or in hand, and the interactions happening on
/// that very frame.
struct FrameSummary {
    int frame = 0;
    std::array<int, kNumRegions> region_counts{};
    std::vector<ObjectView> objects;  // present objects, by object id
    std::vector<teacher::EventDetail> events;
    friend bool operator==(const FrameSummary&, const FrameSummary&) = default;
};

/// Fine-grained content revealed by a patch for one frame.
struct PatchFrame {
    int frame = 0;
    std::vector<teacher::OccupantDetail> occupants;
    std::vector<teacher::EventDetail> events;
    friend bool operator==(const PatchFrame&, const PatchFrame&) = default;
};

struct Observation {
    int num_frames = 0;
    int grid_w = 0;
    int grid_h = 0;
    std::vector<int> sampled_frames;
    std::vector<FrameSummary> frames;  // parallel to sampled_frames
    std::vector<PatchFrame> patch_detail;
    std::optional<teacher::ErrorType> patch_error;

    ScenarioType scenario = ScenarioType::counting;
    Question question;
    std::array<std::string, kNumOptions> options;
    std::array<std::string, kNumOptions> option_values;

    bool has_patch() const { return !patch_detail.empty(); }
    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Uniform-stride view under `budget` frames. Throws RangeError when budget
/// is outside [1, num_frames].
Observation observe(const Task& task, int budget);

/// Base view plus exact occupants and events at the patch key frames,
/// restricted to the patch regions active on each frame (whole grid when
/// the patch names no region). Re-runs the structural leakage check and
/// throws LeakageError on failure. An empty patch returns observe().
Observation observe_with_patch(const Task& task, int budget, const teacher::EvidencePatch& patch);

/// Stable content hash; equal observations share a digest.
std::uint64_t digest(const Observation& obs);

}  // namespace ffr::env

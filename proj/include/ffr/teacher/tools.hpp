#pragma once

#include "ffr/env/world.hpp"

#include <vector>

namespace ffr::teacher {

struct OccupantDetail {
    env::Cell cell;
    int object_id = 0;
    env::Shape shape = env::Shape::cube;
    env::Color color = env::Color::red;
    env::Material material = env::Material::metal;
    friend bool operator==(const OccupantDetail&, const OccupantDetail&) = default;
};

/// An event with the acting object's attributes resolved. `from` is the
/// cell the object occupied before the event (equal to `cell` unless it moved).
struct EventDetail {
    int frame = 0;
    env::Action action = env::Action::enter;
    int object_id = 0;
    env::Shape shape = env::Shape::cube;
    env::Color color = env::Color::red;
    env::Material material = env::Material::metal;
    env::Cell cell;
    env::Cell from;
    friend bool operator==(const EventDetail&, const EventDetail&) = default;
};

/// Full-fidelity contents of one frame, after that frame's events.
struct FrameDetail {
    int frame = 0;
    std::vector<OccupantDetail> occupants;  // row-major cell order
    std::vector<OccupantDetail> held;       // cell is meaningless here
    std::vector<EventDetail> events;
    friend bool operator==(const FrameDetail&, const FrameDetail&) = default;
};

/// Normalized box, (x1, y1) top-left, (x2, y2) bottom-right, all in [0, 1].
struct BBox {
    double x1 = 0.0, y1 = 0.0, x2 = 1.0, y2 = 1.0;
    friend bool operator==(const BBox&, const BBox&) = default;
};

struct RegionDetail {
    FrameDetail detail;  // occupants and events restricted to the box
    BBox bounds;
    int cell_x0 = 0, cell_y0 = 0, cell_x1 = 0, cell_y1 = 0;  // inclusive cell bounds
};

/// Throws RangeError for an out-of-range frame.
FrameDetail get_frame(const env::World& world, int frame_index);

/// Cells whose extent overlaps the box with positive area. Events are kept
/// when their destination or origin cell is inside. Held objects are not
/// spatial and are always reported. Throws RangeError on a malformed box.
RegionDetail zoom_region(const env::World& world, int frame_index, const BBox& region);

/// Frames start, start + stride, ... up to end inclusive.
std::vector<FrameDetail> get_temporal_segment(const env::World& world, int start, int end,
                                              int stride = 1);

/// get_frame over a precomputed replay (avoids replaying per call).
FrameDetail frame_detail(const env::World& world, const std::vector<env::FrameState>& states,
                         int frame_index);

/// Restricts `full` to the cells overlapping `region`.
RegionDetail restrict_to(const env::World& world, const FrameDetail& full, const BBox& region);

/// Box exactly covering the inclusive cell rectangle.
BBox cell_box(const env::World& world, env::Cell lo, env::Cell hi);

}  // namespace ffr::teacher

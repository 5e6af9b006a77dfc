#include "ffr/teacher/tools.hpp"

#include "ffr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ffr::teacher {
namespace {

void check_frame(const env::World& world, int frame) {
    if (frame < 0 || frame >= world.num_frames)
        throw RangeError("frame " + std::to_string(frame) + " outside [0, " +
                         std::to_string(world.num_frames) + ")");
}

OccupantDetail describe(const env::World& world, int id, env::Cell cell) {
    const auto& o = world.object(id);
    return {cell, id, o.shape, o.color, o.material};
}

}  // namespace

FrameDetail frame_detail(const env::World& world, const std::vector<env::FrameState>& states,
                         int frame_index) {
    check_frame(world, frame_index);
    const auto& state = states[static_cast<std::size_t>(frame_index)];
    FrameDetail d;
    d.frame = frame_index;
    for (int y = 0; y < world.grid_h; ++y)
        for (int x = 0; x < world.grid_w; ++x)
            if (auto id = env::occupant(state, {x, y})) d.occupants.push_back(describe(world, *id, {x, y}));
    for (std::size_t i = 0; i < state.objects.size(); ++i)
        if (state.objects[i].where == env::Placement::held)
            d.held.push_back(describe(world, static_cast<int>(i), {}));

    // Origin cells come from the state just before this frame's events,
    // tracked forward through same-frame events.
    std::vector<env::ObjectState> before;
    if (frame_index > 0) {
        before = states[static_cast<std::size_t>(frame_index - 1)].objects;
    } else {
        for (const auto& o : world.objects) before.push_back({o.initial, o.initial_cell});
    }
    for (const auto& e : world.events) {
        if (e.frame != frame_index) continue;
        auto& prior = before[static_cast<std::size_t>(e.object_id)];
        const auto o = describe(world, e.object_id, e.cell);
        const env::Cell from = e.action == env::Action::move ? prior.cell : e.cell;
        d.events.push_back({e.frame, e.action, e.object_id, o.shape, o.color, o.material, e.cell, from});
        prior.cell = e.cell;
    }
    return d;
}

FrameDetail get_frame(const env::World& world, int frame_index) {
    check_frame(world, frame_index);
    return frame_detail(world, env::replay(world), frame_index);
}

RegionDetail restrict_to(const env::World& world, const FrameDetail& full, const BBox& region) {
    const bool finite = std::isfinite(region.x1) && std::isfinite(region.x2) &&
                        std::isfinite(region.y1) && std::isfinite(region.y2);
    if (!finite || region.x1 < 0.0 || region.y1 < 0.0 || region.x2 > 1.0 || region.y2 > 1.0 ||
        region.x1 >= region.x2 || region.y1 >= region.y2)
        throw RangeError("malformed region box");
    const double w = world.grid_w, h = world.grid_h;
    auto inside = [&](env::Cell c) {
        return c.x / w < region.x2 && (c.x + 1) / w > region.x1 && c.y / h < region.y2 &&
               (c.y + 1) / h > region.y1;
    };
    RegionDetail out;
    out.bounds = region;
    out.detail.frame = full.frame;
    out.detail.held = full.held;
    for (const auto& o : full.occupants)
        if (inside(o.cell)) out.detail.occupants.push_back(o);
    for (const auto& e : full.events)
        if (inside(e.cell) || inside(e.from)) out.detail.events.push_back(e);
    out.cell_x0 = world.grid_w;
    out.cell_y0 = world.grid_h;
    out.cell_x1 = out.cell_y1 = -1;
    for (int y = 0; y < world.grid_h; ++y)
        for (int x = 0; x < world.grid_w; ++x)
            if (inside({x, y})) {
                out.cell_x0 = std::min(out.cell_x0, x);
                out.cell_y0 = std::min(out.cell_y0, y);
                out.cell_x1 = std::max(out.cell_x1, x);
                out.cell_y1 = std::max(out.cell_y1, y);
            }
    return out;
}

RegionDetail zoom_region(const env::World& world, int frame_index, const BBox& region) {
    return restrict_to(world, get_frame(world, frame_index), region);
}

std::vector<FrameDetail> get_temporal_segment(const env::World& world, int start, int end,
                                              int stride) {
    check_frame(world, start);
    check_frame(world, end);
    if (start > end) throw RangeError("segment start after end");
    if (stride < 1) throw RangeError("segment stride must be >= 1");
    const auto states = env::replay(world);
    std::vector<FrameDetail> out;
    for (int f = start; f <= end; f += stride) out.push_back(frame_detail(world, states, f));
    return out;
}

BBox cell_box(const env::World& world, env::Cell lo, env::Cell hi) {
    const double w = world.grid_w, h = world.grid_h;
    return {lo.x / w, lo.y / h, (hi.x + 1) / w, (hi.y + 1) / h};
}

}  // namespace ffr::teacher

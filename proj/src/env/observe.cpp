#include "ffr/env/observe.hpp"

#include "ffr/errors.hpp"
#include "ffr/rng.hpp"
#include "ffr/teacher/leakage.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ffr::env {
namespace {

FrameSummary summarize(const World& world, const std::vector<FrameState>& states, int f) {
    FrameSummary s;
    s.frame = f;
    const auto& state = states[static_cast<std::size_t>(f)];
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        const auto& os = state.objects[i];
        if (os.where == Placement::absent) continue;
        const auto& o = world.objects[i];
        ObjectView v{o.shape, o.color, o.material, os.where, Region::top_left};
        if (os.where == Placement::on_grid) {
            v.region = region_of(os.cell, world.grid_w, world.grid_h);
            ++s.region_counts[static_cast<std::size_t>(v.region)];
        }
        s.objects.push_back(v);
    }
    s.events = teacher::frame_detail(world, states, f).events;
    return s;
}

void write_event(std::ostream& os, const teacher::EventDetail& e) {
    os << 'e' << e.frame << ',' << int(e.action) << ',' << e.object_id << ',' << int(e.shape) << ','
       << int(e.color) << ',' << int(e.material) << ',' << e.cell.x << ',' << e.cell.y << ','
       << e.from.x << ',' << e.from.y << ';';
}

}  // namespace

Observation observe(const Task& task, int budget) {
    const World& world = task.world;
    if (budget < 1 || budget > world.num_frames)
        throw RangeError("budget " + std::to_string(budget) + " outside [1, " +
                         std::to_string(world.num_frames) + "]");
    Observation obs;
    obs.num_frames = world.num_frames;
    obs.grid_w = world.grid_w;
    obs.grid_h = world.grid_h;
    obs.sampled_frames = sample_frames(world.num_frames, budget);
    const auto states = replay(world);
    for (int f : obs.sampled_frames) obs.frames.push_back(summarize(world, states, f));
    obs.scenario = task.scenario;
    obs.question = task.question;
    obs.options = task.options;
    obs.option_values = task.option_values;
    return obs;
}

Observation observe_with_patch(const Task& task, int budget, const teacher::EvidencePatch& patch) {
    Observation obs = observe(task, budget);
    if (patch.empty()) return obs;
    if (auto verdict = teacher::leakage_check(patch, task); !verdict.passed)
        throw LeakageError("patch rejected at use time: " + verdict.detail);

    const World& world = task.world;
    const auto states = replay(world);
    const std::set<int> frames(patch.key_frames.begin(), patch.key_frames.end());
    for (int f : frames) {
        if (f < 0 || f >= world.num_frames) throw RangeError("patch key frame out of range");
        const auto full = teacher::frame_detail(world, states, f);
        PatchFrame pf;
        pf.frame = f;
        if (patch.spatial_regions.empty()) {
            pf.occupants = full.occupants;
            pf.events = full.events;
        } else {
            for (const auto& r : patch.spatial_regions) {
                if (f < r.frames.lo || f > r.frames.hi) continue;
                const auto zoom = teacher::restrict_to(world, full, teacher::cell_box(world, r.min, r.max));
                for (const auto& o : zoom.detail.occupants)
                    if (std::find(pf.occupants.begin(), pf.occupants.end(), o) == pf.occupants.end())
                        pf.occupants.push_back(o);
                for (const auto& e : zoom.detail.events)
                    if (std::find(pf.events.begin(), pf.events.end(), e) == pf.events.end())
                        pf.events.push_back(e);
            }
        }
        obs.patch_detail.push_back(std::move(pf));
    }
    obs.patch_error = patch.error_classification;
    return obs;
}

std::uint64_t digest(const Observation& obs) {
    std::ostringstream os;
    os << obs.num_frames << ',' << obs.grid_w << ',' << obs.grid_h << '|';
    for (const auto& s : obs.frames) {
        os << 'f' << s.frame << ':';
        for (int c : s.region_counts) os << c << ',';
        for (const auto& o : s.objects)
            os << 'o' << int(o.shape) << ',' << int(o.color) << ',' << int(o.material) << ','
               << int(o.where) << ',' << int(o.region) << ';';
        for (const auto& e : s.events) write_event(os, e);
    }
    os << "|p";
    if (obs.patch_error) os << int(*obs.patch_error);
    for (const auto& pf : obs.patch_detail) {
        os << 'f' << pf.frame << ':';
        for (const auto& o : pf.occupants)
            os << 'c' << o.cell.x << ',' << o.cell.y << ',' << o.object_id << ';';
        for (const auto& e : pf.events) write_event(os, e);
    }
    os << '|' << int(obs.scenario) << '|' << obs.question.text;
    for (const auto& [k, v] : obs.question.slots) os << '|' << k << '=' << v;
    for (const auto& o : obs.options) os << '|' << o;
    for (const auto& v : obs.option_values) os << '|' << v;
    return hash_string(os.str(), 0x0b5ULL);
}

}  // namespace ffr::env

#include "ffr/env/oracle.hpp"

#include "ffr/errors.hpp"
#include "ffr/teacher/tools.hpp"

#include <set>

namespace ffr::env {
namespace {

std::string need_slot(const Task& task, std::string_view key) {
    auto v = task.question.slot(key);
    if (!v) throw InconsistentTaskError("question lacks slot " + std::string(key));
    return *v;
}

int need_object(const Task& task, std::string_view key) {
    const auto shape = parse_shape(need_slot(task, key));
    if (!shape) throw InconsistentTaskError("slot " + std::string(key) + " is not a shape");
    auto id = task.world.find_shape(*shape);
    if (!id) throw InconsistentTaskError("slot " + std::string(key) + " names no object");
    return *id;
}

/// Values the world makes true for the question.
std::set<std::string> true_values(const Task& task) {
    const World& w = task.world;
    const auto states = replay(w);
    std::vector<teacher::EventDetail> events;
    for (int f = 0; f < w.num_frames; ++f)
        for (const auto& e : teacher::frame_detail(w, states, f).events) events.push_back(e);

    auto first_frame = [&](Action a, int id) {
        for (const auto& e : events)
            if (e.action == a && e.object_id == id) return e.frame;
        throw InconsistentTaskError("anchor interaction missing from world");
    };

    std::set<std::string> out;
    switch (task.scenario) {
        case ScenarioType::temporal: {
            const int fa = first_frame(Action::pick_up, need_object(task, "anchor"));
            for (const auto& e : events)
                if (e.action == Action::put_down && e.frame > fa) out.insert(std::string(to_string(e.shape)));
            break;
        }
        case ScenarioType::dynamics: {
            const int target = need_object(task, "target");
            for (const auto& e : events)
                if (e.action == Action::move && e.object_id == target)
                    if (auto d = direction_between(e.from, e.cell)) out.insert(std::string(to_string(*d)));
            break;
        }
        case ScenarioType::spatial: {
            const int target = need_object(task, "target");
            for (const auto& e : events)
                if (e.action == Action::put_down && e.object_id == target)
                    out.insert(std::string(to_string(region_of(e.cell, w.grid_w, w.grid_h))));
            break;
        }
        case ScenarioType::attribute: {
            const std::string kind = need_slot(task, "attribute");
            for (const auto& e : events)
                if (e.action == Action::pick_up)
                    out.insert(kind == "color" ? std::string(to_string(e.color))
                                               : std::string(to_string(e.material)));
            break;
        }
        case ScenarioType::counting: {
            const int target = need_object(task, "target");
            const auto region = parse_region(need_slot(task, "region"));
            if (!region) throw InconsistentTaskError("counting question without a region");
            for (const auto& e : events)
                if (e.action == Action::put_down && e.object_id == target)
                    out.insert(std::to_string(region_count(w, states[static_cast<std::size_t>(e.frame)], *region)));
            break;
        }
        case ScenarioType::logic: {
            const int fa = first_frame(Action::enter, need_object(task, "anchor"));
            const int target = need_object(task, "target");
            for (const auto& e : events)
                if (e.object_id == target && e.frame > fa) out.insert(std::string(to_string(e.action)));
            break;
        }
    }
    return out;
}

}  // namespace

std::array<bool, kNumOptions> consistent_options(const Task& task) {
    const auto truth = true_values(task);
    std::array<bool, kNumOptions> out{};
    for (int i = 0; i < kNumOptions; ++i)
        out[static_cast<std::size_t>(i)] = truth.count(task.option_values[static_cast<std::size_t>(i)]) > 0;
    return out;
}

AnswerIndex gold_answer(const Task& task) {
    const auto ok = consistent_options(task);
    int found = -1, count = 0;
    for (int i = 0; i < kNumOptions; ++i)
        if (ok[static_cast<std::size_t>(i)]) {
            found = i;
            ++count;
        }
    if (count != 1)
        throw InconsistentTaskError(std::to_string(count) + " options consistent with the world (seed " +
                                    std::to_string(task.seed) + ")");
    return found;
}

}  // namespace ffr::env

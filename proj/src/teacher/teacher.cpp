#include "ffr/teacher/teacher.hpp"

#include "ffr/env/evidence.hpp"
#include "ffr/errors.hpp"
#include "ffr/verifier/verifier.hpp"

#include <algorithm>

namespace ffr::teacher {
namespace {

ErrorType error_of(env::ScenarioStyle s) {
    switch (s) {
        case env::ScenarioStyle::temporal: return ErrorType::temporal;
        case env::ScenarioStyle::spatial: return ErrorType::spatial;
        case env::ScenarioStyle::misconception: return ErrorType::misconception;
    }
    return ErrorType::misconception;
}

std::string template_for(env::ScenarioType s, ErrorType e) {
    if (e == ErrorType::misconception && env::style_of(s) != env::ScenarioStyle::misconception)
        return "task_focus";
    switch (s) {
        case env::ScenarioType::counting: return "recount_range";
        case env::ScenarioType::dynamics: return "track_direction";
        case env::ScenarioType::temporal: return "order_events";
        case env::ScenarioType::spatial: return "placement_area";
        case env::ScenarioType::attribute: return "inspect_features";
        case env::ScenarioType::logic: return "interaction_context";
    }
    return "task_focus";
}

/// Contiguous window of at least three frames covering [lo, hi], padded by one.
FrameRange window(int lo, int hi, int num_frames) {
    lo = std::max(0, lo - 1);
    hi = std::min(num_frames - 1, hi + 1);
    while (hi - lo + 1 < 3) {
        if (lo > 0) --lo;
        else if (hi < num_frames - 1) ++hi;
        else break;
    }
    return {lo, hi};
}

SpatialRegion full_grid(const env::World& w, FrameRange fr) {
    return {fr, {0, 0}, {w.grid_w - 1, w.grid_h - 1}};
}

SpatialRegion quadrant(const env::World& w, env::Region r, FrameRange fr) {
    const int mx = (w.grid_w + 1) / 2, my = (w.grid_h + 1) / 2;
    const int idx = static_cast<int>(r);
    const bool right = idx % 2 == 1, bottom = idx / 2 == 1;
    return {fr, {right ? mx : 0, bottom ? my : 0}, {right ? w.grid_w - 1 : mx - 1, bottom ? w.grid_h - 1 : my - 1}};
}

const env::Event* decisive_event(const env::Task& task) {
    const env::Event* found = nullptr;
    for (const auto& e : task.world.events)
        if (e.frame == task.decisive_frame) found = &e;
    return found;
}

}  // namespace

std::string_view to_string(TeacherMode m) {
    switch (m) {
        case TeacherMode::with_gold: return "with_gold";
        case TeacherMode::no_gold: return "no_gold";
        case TeacherMode::off: return "off";
    }
    return "off";
}

std::optional<TeacherMode> parse_teacher_mode(std::string_view s) {
    if (s == "with_gold") return TeacherMode::with_gold;
    if (s == "no_gold") return TeacherMode::no_gold;
    if (s == "off") return TeacherMode::off;
    return std::nullopt;
}

std::string_view marker_label(env::Action a) {
    switch (a) {
        case env::Action::put_down: return "hand releases object";
        case env::Action::pick_up: return "hand grasps object";
        case env::Action::move: return "object changes place";
        case env::Action::enter: return "object comes into view";
        case env::Action::exit: return "object leaves view";
    }
    return "object changes place";
}

Diagnosis OracleTeacher::diagnose(const env::Task& task, const env::Observation& student_obs,
                                  const policy::Trajectory& trajectory, TeacherMode mode, int) const {
    if (mode == TeacherMode::off) throw DiagnosisUnavailable("teacher is off");
    const env::World& w = task.world;
    const auto parsed = verifier::parse_answer(trajectory, task);
    const auto cites = policy::cited_frames(trajectory.tokens);
    const bool hallucinated = std::any_of(cites.begin(), cites.end(), [&](int f) {
        return !std::binary_search(student_obs.sampled_frames.begin(), student_obs.sampled_frames.end(), f);
    });

    ErrorType type = error_of(env::style_of(task.scenario));
    if (!parsed.answer) type = ErrorType::misconception;
    else if (hallucinated) type = ErrorType::temporal;

    if (mode == TeacherMode::no_gold && parsed.answer && !hallucinated) {
        const auto ev = env::read_evidence(student_obs);
        if (ev[static_cast<std::size_t>(*parsed.answer)].direct)
            throw DiagnosisUnavailable("answer is supported by the student's own observation");
    }

    Diagnosis d;
    d.error_type = type;
    EvidencePatch& p = d.patch;
    p.error_classification = type;

    const env::Event* decisive = decisive_event(task);
    if (!decisive) throw InconsistentTaskError("task has no interaction at its decisive frame");
    FrameRange fr;
    if (mode == TeacherMode::with_gold) {
        fr = window(task.decisive_frame, task.decisive_frame, w.num_frames);
    } else {
        int lo = w.num_frames, hi = -1;
        for (const auto& e : w.events) {
            lo = std::min(lo, e.frame);
            hi = std::max(hi, e.frame);
        }
        fr = window(lo, hi, w.num_frames);
    }
    p.key_frames = frame_span(fr.lo, fr.hi);
    p.content = {template_for(task.scenario, type), {{"lo", std::to_string(fr.lo)}, {"hi", std::to_string(fr.hi)}}};

    if (mode == TeacherMode::with_gold) {
        // The named interaction is already in the question, except in logic
        // questions where the interaction kind is what is asked.
        const std::string label = task.scenario == env::ScenarioType::logic
                                      ? "state change of the named item"
                                      : std::string(marker_label(decisive->action));
        p.temporal_markers.push_back({MarkerRelation::during, label});
    } else {
        p.temporal_markers.push_back({MarkerRelation::after, "interaction named in the question"});
    }

    switch (task.scenario) {
        case env::ScenarioType::spatial:
        case env::ScenarioType::dynamics:
            // A tight box would give the region or direction away.
            p.spatial_regions.push_back(full_grid(w, fr));
            break;
        case env::ScenarioType::counting: {
            const auto q = env::parse_region(task.question.slot("region").value_or(""));
            p.spatial_regions.push_back(q ? quadrant(w, *q, fr) : full_grid(w, fr));
            break;
        }
        default:
            if (mode == TeacherMode::with_gold) {
                env::Cell lo = decisive->cell, hi = decisive->cell;
                const auto states = env::replay(w);
                if (decisive->action == env::Action::move && decisive->frame > 0) {
                    const auto& prev = states[static_cast<std::size_t>(decisive->frame - 1)].objects;
                    const env::Cell from = prev[static_cast<std::size_t>(decisive->object_id)].cell;
                    lo = {std::min(lo.x, from.x), std::min(lo.y, from.y)};
                    hi = {std::max(hi.x, from.x), std::max(hi.y, from.y)};
                }
                p.spatial_regions.push_back({fr,
                                             {std::max(0, lo.x - 1), std::max(0, lo.y - 1)},
                                             {std::min(w.grid_w - 1, hi.x + 1), std::min(w.grid_h - 1, hi.y + 1)}});
            } else {
                p.spatial_regions.push_back(full_grid(w, fr));
            }
            break;
    }
    return d;
}

Diagnosis AdversarialTeacher::diagnose(const env::Task& task, const env::Observation&,
                                       const policy::Trajectory&, TeacherMode, int attempt) const {
    const auto g = static_cast<std::size_t>(task.gold);
    const std::string letter(1, static_cast<char>('A' + task.gold));
    const int d = task.decisive_frame;
    std::vector<std::string> bad = {
        "The answer is " + letter + ".",
        "You should select " + task.options[g] + ".",
        "Look at frame " + std::to_string(d) + " where " + task.options[g] + " is visible.",
        "The correct answer is " + task.option_values[g] + " because of frame " + std::to_string(d) + ".",
    };
    if (task.scenario == env::ScenarioType::counting)
        bad.push_back("There are exactly " + task.option_values[g] + " people in frame " + std::to_string(d) + ".");
    const std::size_t pick = (task.seed + static_cast<std::uint64_t>(attempt)) % bad.size();
    Diagnosis out;
    out.error_type = ErrorType::spatial;
    out.patch.error_classification = ErrorType::spatial;
    out.patch.content = {"free_text", {{"text", bad[pick]}}};
    out.patch.key_frames = {d};
    out.patch.temporal_markers.push_back({MarkerRelation::during, "hand releases object"});
    return out;
}

}  // namespace ffr::teacher

#include "ffr/env/evidence.hpp"

#include <algorithm>
#include <optional>

namespace ffr::env {
namespace {

using teacher::EventDetail;

struct Reader {
    const Observation& obs;
    std::vector<EventDetail> visible;  // events on sampled frames
    std::vector<EventDetail> patched;  // events in the patch detail

    explicit Reader(const Observation& o) : obs(o) {
        for (const auto& s : o.frames) visible.insert(visible.end(), s.events.begin(), s.events.end());
        for (const auto& p : o.patch_detail) patched.insert(patched.end(), p.events.begin(), p.events.end());
    }

    std::optional<Shape> shape_slot(std::string_view key) const {
        auto v = obs.question.slot(key);
        return v ? parse_shape(*v) : std::nullopt;
    }

    int option_of(const std::string& value) const {
        for (int j = 0; j < kNumOptions; ++j)
            if (obs.option_values[static_cast<std::size_t>(j)] == value) return j;
        return -1;
    }

    static std::optional<ObjectView> find(const FrameSummary& s, Shape shape) {
        for (const auto& o : s.objects)
            if (o.shape == shape) return o;
        return std::nullopt;
    }

    static bool acted_on(const FrameSummary& s, Shape shape) {
        return std::any_of(s.events.begin(), s.events.end(),
                           [&](const EventDetail& e) { return e.shape == shape; });
    }

    /// Calls fn(before, after, summary_after) for each consecutive sample
    /// pair starting at or after `from_frame` where `shape` changed state
    /// with no visible interaction explaining it.
    template <typename Fn>
    void unexplained(Shape shape, int from_frame, Fn fn) const {
        for (std::size_t k = 0; k + 1 < obs.frames.size(); ++k) {
            const auto& a = obs.frames[k];
            const auto& b = obs.frames[k + 1];
            if (a.frame < from_frame || acted_on(b, shape)) continue;
            const auto va = find(a, shape), vb = find(b, shape);
            if (va == vb) continue;
            fn(va, vb, b);
        }
    }

    Region region(Cell c) const { return region_of(c, obs.grid_w, obs.grid_h); }

    /// First frame of `action` on `shape`, visible or patched.
    int first_frame(Action action, std::optional<Shape> shape) const {
        int best = -1;
        for (const auto* list : {&visible, &patched})
            for (const auto& e : *list)
                if (shape && e.shape == *shape && e.action == action && (best < 0 || e.frame < best))
                    best = e.frame;
        return best;
    }
};

void mark(Evidence& ev, int j, bool OptionEvidence::*flag) {
    if (j >= 0) ev[static_cast<std::size_t>(j)].*flag = true;
}

}  // namespace

Evidence read_evidence(const Observation& obs) {
    Evidence ev{};
    const Reader r(obs);
    // Applies `classify` to each event list, marking direct/loose or the patch
    // equivalents. classify returns {option, is_direct}.
    auto scan = [&](auto classify) {
        for (const auto& e : r.visible) {
            auto [j, direct] = classify(e, /*patch=*/false);
            mark(ev, j, direct ? &OptionEvidence::direct : &OptionEvidence::loose);
        }
        for (const auto& e : r.patched) {
            auto [j, direct] = classify(e, /*patch=*/true);
            mark(ev, j, direct ? &OptionEvidence::patch_direct : &OptionEvidence::patch_loose);
        }
    };
    using Verdict = std::pair<int, bool>;
    constexpr Verdict kNone{-1, false};

    switch (obs.scenario) {
        case ScenarioType::temporal: {
            const auto anchor = r.shape_slot("anchor");
            const int fa = r.first_frame(Action::pick_up, anchor);
            scan([&](const EventDetail& e, bool) -> Verdict {
                const int j = r.option_of(std::string(to_string(e.shape)));
                if (j < 0) return kNone;
                return {j, e.action == Action::put_down && fa >= 0 && e.frame > fa};
            });
            if (fa >= 0)
                for (int j = 0; j < kNumOptions; ++j) {
                    const auto shape = parse_shape(obs.option_values[static_cast<std::size_t>(j)]);
                    if (!shape) continue;
                    r.unexplained(*shape, fa, [&](auto va, auto vb, const FrameSummary&) {
                        if (va && va->where == Placement::held && vb && vb->where == Placement::on_grid)
                            ev[static_cast<std::size_t>(j)].indirect = true;
                    });
                }
            break;
        }
        case ScenarioType::dynamics: {
            const auto target = r.shape_slot("target");
            scan([&](const EventDetail& e, bool) -> Verdict {
                if (e.action != Action::move) return kNone;
                const auto d = direction_between(e.from, e.cell);
                if (!d) return kNone;
                return {r.option_of(std::string(to_string(*d))), target && e.shape == *target};
            });
            if (target)
                r.unexplained(*target, -1, [&](auto va, auto vb, const FrameSummary&) {
                    if (!va || !vb || va->where != Placement::on_grid || vb->where != Placement::on_grid) return;
                    if (auto d = direction_between(va->region, vb->region))
                        mark(ev, r.option_of(std::string(to_string(*d))), &OptionEvidence::indirect);
                });
            break;
        }
        case ScenarioType::spatial: {
            const auto target = r.shape_slot("target");
            scan([&](const EventDetail& e, bool) -> Verdict {
                if (e.action != Action::put_down && e.action != Action::move && e.action != Action::enter)
                    return kNone;
                const int j = r.option_of(std::string(to_string(r.region(e.cell))));
                return {j, target && e.shape == *target && e.action == Action::put_down};
            });
            if (target)
                r.unexplained(*target, -1, [&](auto va, auto vb, const FrameSummary&) {
                    if (va && va->where == Placement::held && vb && vb->where == Placement::on_grid)
                        mark(ev, r.option_of(std::string(to_string(vb->region))), &OptionEvidence::indirect);
                });
            break;
        }
        case ScenarioType::attribute: {
            const bool color = obs.question.slot("attribute").value_or("") == "color";
            auto value = [&](Color c, Material m) {
                return color ? std::string(to_string(c)) : std::string(to_string(m));
            };
            scan([&](const EventDetail& e, bool) -> Verdict {
                return {r.option_of(value(e.color, e.material)), e.action == Action::pick_up};
            });
            for (const auto& s : obs.frames)
                for (const auto& o : s.objects)
                    r.unexplained(o.shape, -1, [&](auto va, auto vb, const FrameSummary&) {
                        if (va && va->where == Placement::on_grid && vb && vb->where == Placement::held)
                            mark(ev, r.option_of(value(vb->color, vb->material)), &OptionEvidence::indirect);
                    });
            break;
        }
        case ScenarioType::counting: {
            const auto target = r.shape_slot("target");
            const auto q = parse_region(obs.question.slot("region").value_or(""));
            if (!q) break;
            auto visible_count = [&](int frame) {
                for (const auto& s : obs.frames)
                    if (s.frame == frame) return s.region_counts[static_cast<std::size_t>(*q)];
                return -1;
            };
            auto patch_count = [&](int frame) {
                for (const auto& p : obs.patch_detail)
                    if (p.frame == frame)
                        return static_cast<int>(std::count_if(p.occupants.begin(), p.occupants.end(),
                                                              [&](const auto& o) { return r.region(o.cell) == *q; }));
                return -1;
            };
            scan([&](const EventDetail& e, bool patch) -> Verdict {
                const bool is_target = target && e.shape == *target;
                const bool touches_q = r.region(e.cell) == *q || r.region(e.from) == *q;
                if (!(is_target && e.action == Action::put_down) && !(!is_target && touches_q)) return kNone;
                const int n = patch ? patch_count(e.frame) : visible_count(e.frame);
                if (n < 0) return kNone;
                return {r.option_of(std::to_string(n)), is_target && e.action == Action::put_down};
            });
            if (target)
                r.unexplained(*target, -1, [&](auto va, auto vb, const FrameSummary& b) {
                    if (va && va->where == Placement::held && vb && vb->where == Placement::on_grid && vb->region == *q)
                        mark(ev, r.option_of(std::to_string(b.region_counts[static_cast<std::size_t>(*q)])),
                             &OptionEvidence::indirect);
                });
            break;
        }
        case ScenarioType::logic: {
            const auto target = r.shape_slot("target");
            const int fa = r.first_frame(Action::enter, r.shape_slot("anchor"));
            scan([&](const EventDetail& e, bool) -> Verdict {
                if (!target || e.shape != *target) return kNone;
                return {r.option_of(std::string(to_string(e.action))), fa >= 0 && e.frame > fa};
            });
            if (target && fa >= 0)
                r.unexplained(*target, fa, [&](auto va, auto vb, const FrameSummary&) {
                    std::optional<Action> a;
                    if (va && vb && va->where == Placement::held && vb->where == Placement::on_grid) a = Action::put_down;
                    else if (va && vb && va->where == Placement::on_grid && vb->where == Placement::held) a = Action::pick_up;
                    else if (va && vb && va->where == Placement::on_grid && vb->where == Placement::on_grid) a = Action::move;
                    else if (va && !vb && va->where == Placement::on_grid) a = Action::exit;
                    if (a) mark(ev, r.option_of(std::string(to_string(*a))), &OptionEvidence::indirect);
                });
            break;
        }
    }
    // A direct reading outranks a loose one for the same option.
    for (auto& o : ev) {
        if (o.direct) o.loose = false;
        if (o.patch_direct) o.patch_loose = false;
    }
    return ev;
}

}  // namespace ffr::env

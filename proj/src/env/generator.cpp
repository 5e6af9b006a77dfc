#include "ffr/env/oracle.hpp"
#include "ffr/env/task.hpp"
#include "ffr/errors.hpp"
#include "ffr/rng.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace ffr::env {
namespace {

constexpr std::array<std::string_view, kNumScenarios> kScenarioNames = {
    "counting", "dynamics", "temporal", "spatial", "attribute", "logic"};

enum class Vis { visible, hidden, any };

struct FrameRequest {
    Vis vis = Vis::any;
};

std::string action_display(Action a) {
    switch (a) {
        case Action::pick_up: return "It was picked up";
        case Action::put_down: return "It was put down";
        case Action::move: return "It moved";
        case Action::exit: return "It left the scene";
        case Action::enter: return "It entered the scene";
    }
    return {};
}

std::string object_display(Shape s) { return "The " + std::string(to_string(s)); }

class Builder {
public:
    Builder(std::uint64_t seed, ScenarioType scenario, const EnvConfig& cfg)
        : cfg_(cfg),
          rng_(derive_seed(seed, 0x5ce7a410ULL + static_cast<std::uint64_t>(scenario))),
          samples_(sample_frames(cfg.num_frames, cfg.budget)),
          used_(static_cast<std::size_t>(cfg.grid_w * cfg.grid_h), false) {
        task_.scenario = scenario;
        task_.seed = seed;
        task_.budget = cfg.budget;
        world().num_frames = cfg.num_frames;
        world().grid_w = cfg.grid_w;
        world().grid_h = cfg.grid_h;
        world().seed = seed;
        task_.hidden = rng_.bernoulli(cfg.hidden_fraction);
        make_objects();
    }

    Task build() {
        switch (task_.scenario) {
            case ScenarioType::temporal: temporal(); break;
            case ScenarioType::dynamics: dynamics(); break;
            case ScenarioType::spatial: spatial(); break;
            case ScenarioType::attribute: attribute(); break;
            case ScenarioType::counting: counting(); break;
            case ScenarioType::logic: logic(); break;
        }
        place_remaining();
        std::stable_sort(world().events.begin(), world().events.end(),
                         [](const Event& a, const Event& b) { return a.frame < b.frame; });
        replay(world());  // throws on an inconsistent script
        const AnswerIndex oracle = gold_answer(task_);
        if (oracle != task_.gold)
            throw InconsistentTaskError("generator gold disagrees with replay oracle");
        return std::move(task_);
    }

private:
    World& world() { return task_.world; }
    ObjectInstance& obj(int id) { return world().objects[static_cast<std::size_t>(id)]; }
    Vis decisive_vis() const { return task_.hidden ? Vis::hidden : Vis::visible; }
    Vis decoy_vis() {
        if (task_.hidden) return Vis::visible;
        return rng_.bernoulli(cfg_.decoy_visible_rate) ? Vis::visible : Vis::hidden;
    }

    bool sampled(int f) const {
        return std::binary_search(samples_.begin(), samples_.end(), f);
    }
    std::optional<int> prev_sample(int f) const {
        auto it = std::lower_bound(samples_.begin(), samples_.end(), f);
        if (it == samples_.begin()) return std::nullopt;
        return *std::prev(it);
    }
    std::optional<int> next_sample(int f) const {
        auto it = std::upper_bound(samples_.begin(), samples_.end(), f);
        if (it == samples_.end()) return std::nullopt;
        return *it;
    }

    void make_objects() {
        std::array<int, kNumShapes> shapes{};
        std::iota(shapes.begin(), shapes.end(), 0);
        std::array<int, kNumColors> colors{};
        std::iota(colors.begin(), colors.end(), 0);
        shuffle(shapes);
        shuffle(colors);
        for (int i = 0; i < cfg_.num_objects; ++i) {
            ObjectInstance o;
            o.id = i;
            o.shape = static_cast<Shape>(shapes[static_cast<std::size_t>(i)]);
            o.color = static_cast<Color>(colors[static_cast<std::size_t>(i)]);
            o.material = static_cast<Material>(rng_.below(kNumMaterials));
            o.initial = Placement::absent;  // decided by the scenario script
            world().objects.push_back(o);
            unplaced_.push_back(i);
        }
    }

    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) std::swap(c[i - 1], c[rng_.below(i)]);
    }

    /// Claims an object for the script, removing it from the pool of extras.
    int claim() {
        const std::size_t k = rng_.below(unplaced_.size());
        const int id = unplaced_[k];
        unplaced_.erase(unplaced_.begin() + static_cast<std::ptrdiff_t>(k));
        return id;
    }

    Cell take_cell(const std::function<bool(Cell)>& ok) {
        std::vector<Cell> free;
        for (int y = 0; y < cfg_.grid_h; ++y)
            for (int x = 0; x < cfg_.grid_w; ++x) {
                const Cell c{x, y};
                if (!used_[index(c)] && ok(c)) free.push_back(c);
            }
        if (free.empty())
            throw ConfigError("grid " + std::to_string(cfg_.grid_w) + "x" +
                              std::to_string(cfg_.grid_h) + " too small for scenario " +
                              std::string(to_string(task_.scenario)));
        const Cell c = free[rng_.below(free.size())];
        used_[index(c)] = true;
        return c;
    }
    Cell take_cell() {
        return take_cell([](Cell) { return true; });
    }
    Cell take_cell_in(Region r) {
        return take_cell([&](Cell c) { return region_of(c, cfg_.grid_w, cfg_.grid_h) == r; });
    }
    Cell take_cell_outside(Region r) {
        return take_cell([&](Cell c) { return region_of(c, cfg_.grid_w, cfg_.grid_h) != r; });
    }
    std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y * cfg_.grid_w + c.x); }

    void place_on_grid(int id, Cell c) {
        obj(id).initial = Placement::on_grid;
        obj(id).initial_cell = c;
    }

    void place_remaining() {
        for (int id : unplaced_) place_on_grid(id, take_cell());
        unplaced_.clear();
    }

    void add_event(int frame, Action a, int id, Cell c) { world().events.push_back({frame, a, id, c}); }

    /// Strictly increasing frames honouring each visibility request. A hidden
    /// request must be bracketed by samples with the previous sample at or
    /// after the preceding scripted frame, so no other scripted change falls
    /// between those two samples.
    std::vector<int> assign_frames(const std::vector<FrameRequest>& reqs) {
        std::vector<int> out(reqs.size());
        std::function<bool(std::size_t, int)> place = [&](std::size_t k, int prev) -> bool {
            if (k == reqs.size()) return true;
            std::vector<int> candidates;
            for (int f = prev + 1; f < cfg_.num_frames; ++f) {
                const bool s = sampled(f);
                if (reqs[k].vis == Vis::visible && !s) continue;
                if (reqs[k].vis == Vis::hidden) {
                    if (s) continue;
                    auto before = prev_sample(f);
                    if (!before || *before < std::max(prev, 0) || !next_sample(f)) continue;
                }
                candidates.push_back(f);
            }
            shuffle(candidates);
            for (int f : candidates) {
                out[k] = f;
                if (place(k + 1, f)) return true;
            }
            return false;
        };
        if (!place(0, -1))
            throw ConfigError("clip of " + std::to_string(cfg_.num_frames) + " frames with budget " +
                              std::to_string(cfg_.budget) + " cannot host scenario " +
                              std::string(to_string(task_.scenario)));
        return out;
    }

    /// Shuffles `values` (gold first on input) into the option slots.
    void set_options(std::vector<std::pair<std::string, std::string>> display_value) {
        std::array<int, kNumOptions> order{0, 1, 2, 3};
        shuffle(order);
        for (int slot = 0; slot < kNumOptions; ++slot) {
            const auto& [display, value] = display_value[static_cast<std::size_t>(order[static_cast<std::size_t>(slot)])];
            task_.options[static_cast<std::size_t>(slot)] = display;
            task_.option_values[static_cast<std::size_t>(slot)] = value;
            if (order[static_cast<std::size_t>(slot)] == 0) task_.gold = slot;
        }
    }

    std::string shape_name(int id) { return std::string(to_string(obj(id).shape)); }

    // "Which object did the person put down after picking up the <anchor>?"
    void temporal() {
        const int target = claim(), decoy = claim(), anchor = claim();
        obj(target).initial = Placement::held;
        obj(decoy).initial = Placement::held;
        place_on_grid(anchor, take_cell());
        const auto frames = assign_frames({{decoy_vis()}, {Vis::visible}, {decisive_vis()}});
        add_event(frames[0], Action::put_down, decoy, take_cell());
        add_event(frames[1], Action::pick_up, anchor, obj(anchor).initial_cell);
        add_event(frames[2], Action::put_down, target, take_cell());
        task_.decisive_frame = frames[2];

        std::vector<std::pair<std::string, std::string>> opts;
        for (int id : {target, decoy}) opts.emplace_back(object_display(obj(id).shape), shape_name(id));
        std::vector<int> extras = unplaced_;
        shuffle(extras);
        for (int i = 0; i < 2; ++i)
            opts.emplace_back(object_display(obj(extras[static_cast<std::size_t>(i)]).shape),
                              shape_name(extras[static_cast<std::size_t>(i)]));
        set_options(std::move(opts));
        task_.question.text = "Which object did the person put down after picking up the " +
                              shape_name(anchor) + "?";
        task_.question.slots = {{"anchor", shape_name(anchor)}};
    }

    /// Start and end cells of an axis-aligned move in `dir` crossing a
    /// quadrant boundary.
    std::pair<Cell, Cell> crossing_move(Direction dir) {
        const int half_w = (cfg_.grid_w + 1) / 2, half_h = (cfg_.grid_h + 1) / 2;
        for (int attempt = 0; attempt < 64; ++attempt) {
            Cell from{}, to{};
            if (dir == Direction::left_to_right || dir == Direction::right_to_left) {
                const int y = rng_.uniform_int(0, cfg_.grid_h - 1);
                const int left = rng_.uniform_int(0, half_w - 1);
                const int right = rng_.uniform_int(half_w, cfg_.grid_w - 1);
                from = {dir == Direction::left_to_right ? left : right, y};
                to = {dir == Direction::left_to_right ? right : left, y};
            } else {
                const int x = rng_.uniform_int(0, cfg_.grid_w - 1);
                const int top = rng_.uniform_int(0, half_h - 1);
                const int bottom = rng_.uniform_int(half_h, cfg_.grid_h - 1);
                from = {x, dir == Direction::top_to_bottom ? top : bottom};
                to = {x, dir == Direction::top_to_bottom ? bottom : top};
            }
            if (used_[index(from)] || used_[index(to)]) continue;
            used_[index(from)] = used_[index(to)] = true;
            return {from, to};
        }
        throw ConfigError("grid too small to route a crossing move for scenario " +
                          std::string(to_string(task_.scenario)));
    }

    // "In which direction did the <target> move?"
    void dynamics() {
        const int target = claim(), decoy = claim();
        const auto gold_dir = static_cast<Direction>(rng_.below(4));
        auto decoy_dir = static_cast<Direction>(rng_.below(3));
        if (static_cast<int>(decoy_dir) >= static_cast<int>(gold_dir))
            decoy_dir = static_cast<Direction>(static_cast<int>(decoy_dir) + 1);
        const auto [t_from, t_to] = crossing_move(gold_dir);
        const auto [d_from, d_to] = crossing_move(decoy_dir);
        place_on_grid(target, t_from);
        place_on_grid(decoy, d_from);
        const auto frames = assign_frames({{decoy_vis()}, {decisive_vis()}});
        add_event(frames[0], Action::move, decoy, d_to);
        add_event(frames[1], Action::move, target, t_to);
        task_.decisive_frame = frames[1];

        std::vector<std::pair<std::string, std::string>> opts;
        opts.emplace_back(std::string(to_string(gold_dir)), std::string(to_string(gold_dir)));
        for (int d = 0; d < 4; ++d)
            if (d != static_cast<int>(gold_dir)) {
                const std::string name(to_string(static_cast<Direction>(d)));
                opts.emplace_back(name, name);
            }
        set_options(std::move(opts));
        task_.question.text = "In which direction did the " + shape_name(target) + " move?";
        task_.question.slots = {{"target", shape_name(target)}};
    }

    // "In which region did the person put down the <target>?"
    void spatial() {
        const int target = claim(), decoy = claim();
        obj(target).initial = Placement::held;
        obj(decoy).initial = Placement::held;
        const auto gold_region = static_cast<Region>(rng_.below(kNumRegions));
        const Cell t_cell = take_cell_in(gold_region);
        const Cell d_cell = take_cell_outside(gold_region);
        const auto frames = assign_frames({{decoy_vis()}, {decisive_vis()}});
        add_event(frames[0], Action::put_down, decoy, d_cell);
        add_event(frames[1], Action::put_down, target, t_cell);
        task_.decisive_frame = frames[1];

        std::vector<std::pair<std::string, std::string>> opts;
        opts.emplace_back(std::string(to_string(gold_region)), std::string(to_string(gold_region)));
        for (int r = 0; r < kNumRegions; ++r)
            if (r != static_cast<int>(gold_region)) {
                const std::string name(to_string(static_cast<Region>(r)));
                opts.emplace_back(name, name);
            }
        set_options(std::move(opts));
        task_.question.text = "In which region did the person put down the " + shape_name(target) + "?";
        task_.question.slots = {{"target", shape_name(target)}};
    }

    // "What color|material is the object the person picked up?"
    void attribute() {
        const int target = claim(), decoy = claim();
        const bool ask_color = rng_.bernoulli(0.5);
        place_on_grid(target, take_cell());
        obj(decoy).initial = Placement::held;
        if (!ask_color && obj(decoy).material == obj(target).material)
            obj(decoy).material = static_cast<Material>(
                (static_cast<int>(obj(target).material) + 1 + static_cast<int>(rng_.below(3))) %
                kNumMaterials);
        const auto frames = assign_frames({{decoy_vis()}, {decisive_vis()}});
        add_event(frames[0], Action::put_down, decoy, take_cell());
        add_event(frames[1], Action::pick_up, target, obj(target).initial_cell);
        task_.decisive_frame = frames[1];

        std::vector<std::pair<std::string, std::string>> opts;
        if (ask_color) {
            const Color gold = obj(target).color, lure = obj(decoy).color;
            opts.emplace_back(std::string(to_string(gold)), std::string(to_string(gold)));
            opts.emplace_back(std::string(to_string(lure)), std::string(to_string(lure)));
            std::vector<int> rest;
            for (int c = 0; c < kNumColors; ++c)
                if (c != static_cast<int>(gold) && c != static_cast<int>(lure)) rest.push_back(c);
            shuffle(rest);
            for (int i = 0; i < 2; ++i) {
                const std::string name(to_string(static_cast<Color>(rest[static_cast<std::size_t>(i)])));
                opts.emplace_back(name, name);
            }
        } else {
            const Material gold = obj(target).material;
            opts.emplace_back(std::string(to_string(gold)), std::string(to_string(gold)));
            for (int m = 0; m < kNumMaterials; ++m)
                if (m != static_cast<int>(gold)) {
                    const std::string name(to_string(static_cast<Material>(m)));
                    opts.emplace_back(name, name);
                }
        }
        set_options(std::move(opts));
        const std::string kind = ask_color ? "color" : "material";
        task_.question.text = "What " + kind + " is the object the person picked up?";
        task_.question.slots = {{"attribute", kind}};
    }

    // "How many objects were in the <region> region right after the person
    // put down the <target>?"
    void counting() {
        const int target = claim(), decoy = claim();
        const auto region = static_cast<Region>(rng_.below(kNumRegions));
        obj(target).initial = Placement::held;
        const bool decoy_leaves = rng_.bernoulli(0.5);
        int before = 0;
        if (decoy_leaves) {
            place_on_grid(decoy, take_cell_in(region));
            before = 1;
        } else {
            obj(decoy).initial = Placement::absent;
        }
        // At most one bystander already sits in the region.
        if (!unplaced_.empty() && rng_.bernoulli(0.5)) {
            const int extra = claim();
            place_on_grid(extra, take_cell_in(region));
            ++before;
        }
        // Every other object stays out of the region.
        for (int id : unplaced_) place_on_grid(id, take_cell_outside(region));
        unplaced_.clear();

        const auto frames = assign_frames({{decoy_vis()}, {decisive_vis()}});
        if (decoy_leaves) {
            add_event(frames[0], Action::exit, decoy, obj(decoy).initial_cell);
        } else {
            add_event(frames[0], Action::enter, decoy, take_cell_in(region));
        }
        add_event(frames[1], Action::put_down, target, take_cell_in(region));
        task_.decisive_frame = frames[1];

        const int gold = before + (decoy_leaves ? -1 : 1) + 1;
        std::vector<std::pair<std::string, std::string>> opts;
        for (int v : {gold, gold - 1, gold + 1, gold + 2}) opts.emplace_back(std::to_string(v), std::to_string(v));
        set_options(std::move(opts));
        const std::string region_name(to_string(region));
        task_.question.text = "How many objects were in the " + region_name +
                              " region right after the person put down the " + shape_name(target) + "?";
        task_.question.slots = {{"region", region_name}, {"target", shape_name(target)}};
    }

    // "What happened to the <target> after the <anchor> entered the scene?"
    void logic() {
        const int target = claim(), anchor = claim();
        constexpr std::array<Action, 4> kOutcomes = {Action::pick_up, Action::put_down, Action::move,
                                                     Action::exit};
        const Action gold = kOutcomes[rng_.below(4)];
        obj(anchor).initial = Placement::absent;
        const auto frames = assign_frames({{decoy_vis()}, {Vis::visible}, {decisive_vis()}});
        switch (gold) {
            case Action::pick_up: {
                const Cell c0 = take_cell(), c1 = take_cell();
                place_on_grid(target, c0);
                add_event(frames[0], Action::move, target, c1);
                add_event(frames[2], Action::pick_up, target, c1);
                break;
            }
            case Action::put_down: {
                const Cell c0 = take_cell(), c1 = take_cell();
                place_on_grid(target, c0);
                add_event(frames[0], Action::pick_up, target, c0);
                add_event(frames[2], Action::put_down, target, c1);
                break;
            }
            case Action::move: {
                const auto dir = static_cast<Direction>(rng_.below(4));
                const auto [c1, c2] = crossing_move(dir);
                obj(target).initial = Placement::held;
                add_event(frames[0], Action::put_down, target, c1);
                add_event(frames[2], Action::move, target, c2);
                break;
            }
            default: {  // exit
                const Cell c0 = take_cell(), c1 = take_cell();
                place_on_grid(target, c0);
                add_event(frames[0], Action::move, target, c1);
                add_event(frames[2], Action::exit, target, c1);
                break;
            }
        }
        add_event(frames[1], Action::enter, anchor, take_cell());
        task_.decisive_frame = frames[2];

        std::vector<std::pair<std::string, std::string>> opts;
        opts.emplace_back(action_display(gold), std::string(to_string(gold)));
        for (Action a : kOutcomes)
            if (a != gold) opts.emplace_back(action_display(a), std::string(to_string(a)));
        set_options(std::move(opts));
        task_.question.text = "What happened to the " + shape_name(target) + " after the " +
                              shape_name(anchor) + " entered the scene?";
        task_.question.slots = {{"target", shape_name(target)}, {"anchor", shape_name(anchor)}};
    }

    const EnvConfig& cfg_;
    Rng rng_;
    std::vector<int> samples_;
    std::vector<bool> used_;
    std::vector<int> unplaced_;
    Task task_;
};

}  // namespace

std::string_view to_string(ScenarioType s) { return kScenarioNames[static_cast<int>(s)]; }

std::optional<ScenarioType> parse_scenario(std::string_view s) {
    for (int i = 0; i < kNumScenarios; ++i)
        if (kScenarioNames[static_cast<std::size_t>(i)] == s) return static_cast<ScenarioType>(i);
    return std::nullopt;
}

ScenarioStyle style_of(ScenarioType s) {
    switch (s) {
        case ScenarioType::temporal:
        case ScenarioType::dynamics: return ScenarioStyle::temporal;
        case ScenarioType::spatial:
        case ScenarioType::counting: return ScenarioStyle::spatial;
        case ScenarioType::attribute:
        case ScenarioType::logic: return ScenarioStyle::misconception;
    }
    return ScenarioStyle::misconception;
}

std::string_view to_string(ScenarioMix m) { return m == ScenarioMix::paper ? "paper" : "uniform"; }

std::optional<ScenarioMix> parse_mix(std::string_view s) {
    if (s == "paper") return ScenarioMix::paper;
    if (s == "uniform") return ScenarioMix::uniform;
    return std::nullopt;
}

std::optional<std::string> Question::slot(std::string_view key) const {
    for (const auto& [k, v] : slots)
        if (k == key) return v;
    return std::nullopt;
}

void validate(const EnvConfig& c) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    need(c.num_frames >= 8 && c.num_frames <= kMaxFrames, "num_frames must be in [8, 32]");
    need(c.grid_w >= 2 && c.grid_h >= 2, "grid must be at least 2x2");
    need(c.budget >= 1 && c.budget <= c.num_frames, "budget must be in [1, num_frames]");
    need(c.num_objects >= 5 && c.num_objects <= kNumShapes, "num_objects must be in [5, 7]");
    need(c.grid_w * c.grid_h >= c.num_objects + 4, "grid too small to place the scenario objects");
    need(c.hidden_fraction >= 0.0 && c.hidden_fraction <= 1.0, "hidden_fraction must be in [0, 1]");
    need(c.decoy_visible_rate >= 0.0 && c.decoy_visible_rate <= 1.0,
         "decoy_visible_rate must be in [0, 1]");
    need(c.hidden_fraction == 0.0 || c.budget < c.num_frames,
         "hidden tasks need budget < num_frames");
}

std::vector<int> sample_frames(int num_frames, int budget) {
    if (budget < 1 || budget > num_frames)
        throw RangeError("budget " + std::to_string(budget) + " outside [1, " +
                         std::to_string(num_frames) + "]");
    if (budget == 1) return {num_frames / 2};
    std::vector<int> frames;
    frames.reserve(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) frames.push_back(i * num_frames / budget);
    return frames;
}

ScenarioType draw_scenario(std::uint64_t seed, ScenarioMix mix) {
    Rng rng(derive_seed(seed, 0x6d1cULL));
    if (mix == ScenarioMix::uniform) return kAllScenarios[rng.below(kNumScenarios)];
    // Style weights 41.2 / 32.0 / 26.8, uniform within a style.
    const auto u = rng.below(1000);
    const bool second = rng.below(2) == 1;
    if (u < 412) return second ? ScenarioType::logic : ScenarioType::attribute;
    if (u < 412 + 320) return second ? ScenarioType::counting : ScenarioType::spatial;
    return second ? ScenarioType::dynamics : ScenarioType::temporal;
}

Task generate_task(std::uint64_t seed, ScenarioType scenario, const EnvConfig& config) {
    validate(config);
    return Builder(seed, scenario, config).build();
}

Task generate_task(std::uint64_t seed, const EnvConfig& config) {
    return generate_task(seed, draw_scenario(seed, config.scenario_mix), config);
}

}  // namespace ffr::env

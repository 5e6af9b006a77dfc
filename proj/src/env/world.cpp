#include "ffr/env/world.hpp"

#include "ffr/errors.hpp"

#include <algorithm>

namespace ffr::env {
namespace {

constexpr std::array<std::string_view, kNumShapes> kShapeNames = {
    "cube", "sphere", "cylinder", "book", "dish", "clothes", "shoe"};
constexpr std::array<std::string_view, kNumColors> kColorNames = {
    "red", "blue", "green", "yellow", "purple", "gray", "brown", "cyan"};
constexpr std::array<std::string_view, kNumMaterials> kMaterialNames = {
    "metal", "rubber", "cloth", "paper"};
constexpr std::array<std::string_view, 5> kActionNames = {
    "enter", "exit", "move", "put_down", "pick_up"};
constexpr std::array<std::string_view, 4> kDirectionNames = {
    "left to right", "right to left", "top to bottom", "bottom to top"};
constexpr std::array<std::string_view, kNumRegions> kRegionNames = {
    "top-left", "top-right", "bottom-left", "bottom-right"};

template <typename Enum, std::size_t N>
std::optional<Enum> parse_name(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s) return static_cast<Enum>(i);
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Shape s) { return kShapeNames[static_cast<int>(s)]; }
std::string_view to_string(Color c) { return kColorNames[static_cast<int>(c)]; }
std::string_view to_string(Material m) { return kMaterialNames[static_cast<int>(m)]; }
std::string_view to_string(Action a) { return kActionNames[static_cast<int>(a)]; }
std::string_view to_string(Region r) { return kRegionNames[static_cast<int>(r)]; }

std::optional<Shape> parse_shape(std::string_view s) { return parse_name<Shape>(kShapeNames, s); }
std::optional<Color> parse_color(std::string_view s) { return parse_name<Color>(kColorNames, s); }
std::optional<Material> parse_material(std::string_view s) {
    return parse_name<Material>(kMaterialNames, s);
}
std::optional<Action> parse_action(std::string_view s) { return parse_name<Action>(kActionNames, s); }
std::optional<Region> parse_region(std::string_view s) { return parse_name<Region>(kRegionNames, s); }

std::string_view to_string(Direction d) { return kDirectionNames[static_cast<int>(d)]; }
std::optional<Direction> parse_direction(std::string_view s) {
    return parse_name<Direction>(kDirectionNames, s);
}

std::optional<Direction> direction_between(Cell from, Cell to) {
    if (from.y == to.y && from.x != to.x)
        return to.x > from.x ? Direction::left_to_right : Direction::right_to_left;
    if (from.x == to.x && from.y != to.y)
        return to.y > from.y ? Direction::top_to_bottom : Direction::bottom_to_top;
    return std::nullopt;
}

std::optional<Direction> direction_between(Region from, Region to) {
    const int fr = static_cast<int>(from), tr = static_cast<int>(to);
    return direction_between(Cell{fr % 2, fr / 2}, Cell{tr % 2, tr / 2});
}

Region region_of(Cell c, int grid_w, int grid_h) {
    const bool right = c.x >= (grid_w + 1) / 2;
    const bool bottom = c.y >= (grid_h + 1) / 2;
    return static_cast<Region>((bottom ? 2 : 0) + (right ? 1 : 0));
}

const ObjectInstance& World::object(int id) const {
    if (id < 0 || id >= static_cast<int>(objects.size()))
        throw RangeError("object id " + std::to_string(id) + " out of range");
    return objects[static_cast<std::size_t>(id)];
}

std::optional<int> World::find_shape(Shape s) const {
    for (const auto& o : objects)
        if (o.shape == s) return o.id;
    return std::nullopt;
}

std::optional<int> occupant(const FrameState& state, Cell cell) {
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        const auto& o = state.objects[i];
        if (o.where == Placement::on_grid && o.cell == cell) return static_cast<int>(i);
    }
    return std::nullopt;
}

int region_count(const World& world, const FrameState& state, Region region) {
    int n = 0;
    for (const auto& o : state.objects)
        if (o.where == Placement::on_grid && region_of(o.cell, world.grid_w, world.grid_h) == region)
            ++n;
    return n;
}

std::vector<FrameState> replay(const World& world) {
    auto fail = [](const Event& e, const std::string& why) {
        throw InconsistentTaskError("event at frame " + std::to_string(e.frame) + " (" +
                                    std::string(to_string(e.action)) + " object " +
                                    std::to_string(e.object_id) + "): " + why);
    };
    auto in_bounds = [&](Cell c) {
        return c.x >= 0 && c.y >= 0 && c.x < world.grid_w && c.y < world.grid_h;
    };

    FrameState state;
    state.objects.resize(world.objects.size());
    for (std::size_t i = 0; i < world.objects.size(); ++i) {
        const auto& o = world.objects[i];
        if (o.id != static_cast<int>(i)) throw InconsistentTaskError("object ids must be dense");
        state.objects[i] = ObjectState{o.initial, o.initial_cell};
        if (o.initial == Placement::on_grid) {
            if (!in_bounds(o.initial_cell)) throw InconsistentTaskError("initial cell out of bounds");
            for (std::size_t j = 0; j < i; ++j)
                if (state.objects[j].where == Placement::on_grid &&
                    state.objects[j].cell == o.initial_cell)
                    throw InconsistentTaskError("two objects share an initial cell");
        }
    }

    std::vector<FrameState> frames;
    frames.reserve(static_cast<std::size_t>(world.num_frames));
    std::size_t next = 0;
    int last_frame = -1;
    for (int f = 0; f < world.num_frames; ++f) {
        while (next < world.events.size() && world.events[next].frame == f) {
            const Event& e = world.events[next++];
            if (e.frame < last_frame) fail(e, "events out of order");
            last_frame = e.frame;
            if (e.object_id < 0 || e.object_id >= static_cast<int>(state.objects.size()))
                fail(e, "unknown object");
            auto& obj = state.objects[static_cast<std::size_t>(e.object_id)];
            const bool needs_free_cell =
                e.action == Action::enter || e.action == Action::move || e.action == Action::put_down;
            if (needs_free_cell) {
                if (!in_bounds(e.cell)) fail(e, "cell out of bounds");
                if (auto occ = occupant(state, e.cell); occ && *occ != e.object_id)
                    fail(e, "destination occupied");
            }
            switch (e.action) {
                case Action::enter:
                    if (obj.where != Placement::absent) fail(e, "enter while present");
                    obj = {Placement::on_grid, e.cell};
                    break;
                case Action::exit:
                    if (obj.where != Placement::on_grid || !(obj.cell == e.cell)) fail(e, "exit while not on grid");
                    obj = {Placement::absent, e.cell};
                    break;
                case Action::move:
                    if (obj.where != Placement::on_grid) fail(e, "move while not on grid");
                    obj.cell = e.cell;
                    break;
                case Action::put_down:
                    if (obj.where != Placement::held) fail(e, "put_down while not held");
                    obj = {Placement::on_grid, e.cell};
                    break;
                case Action::pick_up:
                    if (obj.where != Placement::on_grid || !(obj.cell == e.cell)) fail(e, "pick_up while not on grid");
                    obj = {Placement::held, e.cell};
                    break;
            }
        }
        state.frame = f;
        frames.push_back(state);
    }
    if (next != world.events.size()) fail(world.events[next], "frame index out of range");
    return frames;
}

}  // namespace ffr::env

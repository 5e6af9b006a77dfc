#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ffr::env {

enum class Shape : std::uint8_t { cube, sphere, cylinder, book, dish, clothes, shoe };
enum class Color : std::uint8_t { red, blue, green, yellow, purple, gray, brown, cyan };
enum class Material : std::uint8_t { metal, rubber, cloth, paper };
enum class Action : std::uint8_t { enter, exit, move, put_down, pick_up };

inline constexpr int kNumShapes = 7;
inline constexpr int kNumColors = 8;
inline constexpr int kNumMaterials = 4;
inline constexpr int kNumRegions = 4;
inline constexpr int kMaxFrames = 32;

std::string_view to_string(Shape s);
std::string_view to_string(Color c);
std::string_view to_string(Material m);
std::string_view to_string(Action a);
std::optional<Shape> parse_shape(std::string_view s);
std::optional<Color> parse_color(std::string_view s);
std::optional<Material> parse_material(std::string_view s);
std::optional<Action> parse_action(std::string_view s);

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Quadrants, y = 0 at the top.
enum class Region : std::uint8_t { top_left, top_right, bottom_left, bottom_right };
std::string_view to_string(Region r);
std::optional<Region> parse_region(std::string_view s);
Region region_of(Cell c, int grid_w, int grid_h);

enum class Direction : std::uint8_t { left_to_right, right_to_left, top_to_bottom, bottom_to_top };
std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);
/// Direction of an axis-aligned displacement; nullopt for zero or diagonal.
std::optional<Direction> direction_between(Cell from, Cell to);
/// Direction between two distinct quadrants sharing a row or column half.
std::optional<Direction> direction_between(Region from, Region to);

enum class Placement : std::uint8_t { absent, on_grid, held };

struct ObjectInstance {
    int id = 0;
    Shape shape = Shape::cube;
    Color color = Color::red;
    Material material = Material::metal;
    Placement initial = Placement::on_grid;
    Cell initial_cell{};  // meaningful when initial == on_grid
    friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

/// `cell` is the event location: destination for enter/move/put_down, the
/// vacated cell for pick_up/exit.
struct Event {
    int frame = 0;
    Action action = Action::enter;
    int object_id = 0;
    Cell cell{};
    friend bool operator==(const Event&, const Event&) = default;
};

struct World {
    int num_frames = 0;
    int grid_w = 0;
    int grid_h = 0;
    std::vector<ObjectInstance> objects;
    std::vector<Event> events;  // sorted by frame, stable within a frame
    std::uint64_t seed = 0;

    const ObjectInstance& object(int id) const;
    std::optional<int> find_shape(Shape s) const;
    friend bool operator==(const World&, const World&) = default;
};

struct ObjectState {
    Placement where = Placement::absent;
    Cell cell{};
    friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

/// State of every object after all events with frame <= f.
struct FrameState {
    int frame = 0;
    std::vector<ObjectState> objects;  // indexed by object id
};

/// Full replay, one FrameState per frame. Throws InconsistentTaskError when
/// an event is not applicable (pick_up of an absent object, two objects in a
/// cell, out-of-range frame or cell, ...).
std::vector<FrameState> replay(const World& world);

/// Occupant of `cell` in `state`, if any.
std::optional<int> occupant(const FrameState& state, Cell cell);

/// Number of on-grid objects in `region`.
int region_count(const World& world, const FrameState& state, Region region);

}  // namespace ffr::env

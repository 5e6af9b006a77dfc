#include "ffr/env/serialize.hpp"

#include "ffr/errors.hpp"

#include <istream>
#include <ostream>

namespace ffr::env {
namespace {

template <typename Enum, typename Parse>
Enum parse_or_throw(const nlohmann::json& j, Parse parse, const char* what) {
    auto v = parse(j.get<std::string>());
    if (!v) throw ConfigError(std::string("unknown ") + what + " in task record");
    return *v;
}

}  // namespace

nlohmann::json to_json(const Task& task) {
    const World& w = task.world;
    nlohmann::json objects = nlohmann::json::array();
    for (const auto& o : w.objects) {
        const char* placement = o.initial == Placement::absent ? "absent"
                                : o.initial == Placement::held ? "held"
                                                               : "on_grid";
        objects.push_back({{"id", o.id},
                           {"shape", to_string(o.shape)},
                           {"color", to_string(o.color)},
                           {"material", to_string(o.material)},
                           {"initial", placement},
                           {"cell", {o.initial_cell.x, o.initial_cell.y}}});
    }
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : w.events)
        events.push_back({{"frame", e.frame},
                          {"action", to_string(e.action)},
                          {"object", e.object_id},
                          {"cell", {e.cell.x, e.cell.y}}});
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& [k, v] : task.question.slots) slots.push_back({k, v});
    return {{"seed", task.seed},
            {"scenario", to_string(task.scenario)},
            {"question", task.question.text},
            {"slots", slots},
            {"options", task.options},
            {"option_values", task.option_values},
            {"gold", task.gold},
            {"budget", task.budget},
            {"hidden", task.hidden},
            {"decisive_frame", task.decisive_frame},
            {"world",
             {{"num_frames", w.num_frames},
              {"grid_w", w.grid_w},
              {"grid_h", w.grid_h},
              {"seed", w.seed},
              {"objects", objects},
              {"events", events}}}};
}

Task task_from_json(const nlohmann::json& j) {
    try {
        Task t;
        t.seed = j.at("seed").get<std::uint64_t>();
        t.scenario = parse_or_throw<ScenarioType>(j.at("scenario"), parse_scenario, "scenario");
        t.question.text = j.at("question").get<std::string>();
        for (const auto& kv : j.at("slots"))
            t.question.slots.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
        t.options = j.at("options").get<std::array<std::string, kNumOptions>>();
        t.option_values = j.at("option_values").get<std::array<std::string, kNumOptions>>();
        t.gold = j.at("gold").get<int>();
        t.budget = j.at("budget").get<int>();
        t.hidden = j.at("hidden").get<bool>();
        t.decisive_frame = j.at("decisive_frame").get<int>();
        const auto& w = j.at("world");
        t.world.num_frames = w.at("num_frames").get<int>();
        t.world.grid_w = w.at("grid_w").get<int>();
        t.world.grid_h = w.at("grid_h").get<int>();
        t.world.seed = w.at("seed").get<std::uint64_t>();
        for (const auto& o : w.at("objects")) {
            ObjectInstance obj;
            obj.id = o.at("id").get<int>();
            obj.shape = parse_or_throw<Shape>(o.at("shape"), parse_shape, "shape");
            obj.color = parse_or_throw<Color>(o.at("color"), parse_color, "color");
            obj.material = parse_or_throw<Material>(o.at("material"), parse_material, "material");
            const auto placement = o.at("initial").get<std::string>();
            obj.initial = placement == "absent" ? Placement::absent
                          : placement == "held" ? Placement::held
                                                : Placement::on_grid;
            obj.initial_cell = {o.at("cell").at(0).get<int>(), o.at("cell").at(1).get<int>()};
            t.world.objects.push_back(obj);
        }
        for (const auto& e : w.at("events"))
            t.world.events.push_back({e.at("frame").get<int>(),
                                      parse_or_throw<Action>(e.at("action"), parse_action, "action"),
                                      e.at("object").get<int>(),
                                      {e.at("cell").at(0).get<int>(), e.at("cell").at(1).get<int>()}});
        return t;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed task record: ") + ex.what());
    }
}

void write_tasks(std::ostream& out, const std::vector<Task>& tasks) {
    for (const auto& t : tasks) out << to_json(t).dump() << '\n';
}

std::vector<Task> read_tasks(std::istream& in) {
    std::vector<Task> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(task_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error& ex) {
            throw ConfigError(std::string("malformed task line: ") + ex.what());
        }
    }
    return out;
}

}  // namespace ffr::env

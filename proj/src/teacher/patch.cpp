#include "ffr/teacher/patch.hpp"

#include "ffr/errors.hpp"
#include "ffr/rng.hpp"

#include <array>
#include <map>

namespace ffr::teacher {
namespace {

constexpr std::array<std::string_view, kNumErrorTypes> kErrorNames = {"temporal", "spatial",
                                                                      "misconception"};
constexpr std::array<std::string_view, 3> kRelationNames = {"before", "after", "during"};

// Guidance templates. {lo} and {hi} are frame bounds; nothing else is
// substituted, so rendered text never carries task vocabulary.
const std::map<std::string, std::string, std::less<>>& templates() {
    static const std::map<std::string, std::string, std::less<>> t = {
        {"recount_range", "Recount the objects within the frame range [{lo}, {hi}]."},
        {"track_direction", "Follow the path of the named object across frames [{lo}, {hi}]."},
        {"order_events", "Re-check the order of hand interactions within frames [{lo}, {hi}]."},
        {"hand_release", "Watch closely when the hand lets go of something within frames [{lo}, {hi}]."},
        {"placement_area", "Inspect where things come to rest within frames [{lo}, {hi}]."},
        {"inspect_features", "Look closely at the item taken by the hand within frames [{lo}, {hi}]."},
        {"interaction_context", "Review what happens to the named item within frames [{lo}, {hi}]."},
        {"task_focus", "Re-read what the question asks for, then check frames [{lo}, {hi}]."},
    };
    return t;
}

}  // namespace

std::string_view to_string(ErrorType e) { return kErrorNames[static_cast<int>(e)]; }
std::optional<ErrorType> parse_error_type(std::string_view s) {
    for (int i = 0; i < kNumErrorTypes; ++i)
        if (kErrorNames[static_cast<std::size_t>(i)] == s) return static_cast<ErrorType>(i);
    return std::nullopt;
}

std::string_view to_string(MarkerRelation r) { return kRelationNames[static_cast<int>(r)]; }
std::optional<MarkerRelation> parse_relation(std::string_view s) {
    for (int i = 0; i < 3; ++i)
        if (kRelationNames[static_cast<std::size_t>(i)] == s) return static_cast<MarkerRelation>(i);
    return std::nullopt;
}

std::string PatchContent::render() const {
    auto slot = [&](std::string_view key) -> std::string {
        for (const auto& [k, v] : slots)
            if (k == key) return v;
        return {};
    };
    const auto& t = templates();
    auto it = t.find(template_id);
    if (it == t.end()) return slot("text");
    std::string out = it->second;
    for (const auto& [k, v] : slots) {
        const std::string key = "{" + k + "}";
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + v.size()))
            out.replace(pos, key.size(), v);
    }
    return out;
}

std::vector<int> frame_span(int lo, int hi) {
    std::vector<int> out;
    for (int f = lo; f <= hi; ++f) out.push_back(f);
    return out;
}

nlohmann::json to_json(const EvidencePatch& p) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& [k, v] : p.content.slots) slots.push_back({k, v});
    nlohmann::json markers = nlohmann::json::array();
    for (const auto& m : p.temporal_markers)
        markers.push_back({{"relation", to_string(m.relation)}, {"event", m.label}});
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : p.spatial_regions)
        regions.push_back({{"frames", {r.frames.lo, r.frames.hi}},
                           {"cells", {r.min.x, r.min.y, r.max.x, r.max.y}}});
    return {{"error_classification", to_string(p.error_classification)},
            {"evidence_patch",
             {{"content", {{"template", p.content.template_id}, {"slots", slots}, {"text", p.content.render()}}},
              {"key_frames", p.key_frames},
              {"temporal_markers", markers},
              {"spatial_regions", regions}}}};
}

EvidencePatch patch_from_json(const nlohmann::json& j) {
    try {
        EvidencePatch p;
        auto e = parse_error_type(j.at("error_classification").get<std::string>());
        if (!e) throw ConfigError("unknown error_classification");
        p.error_classification = *e;
        const auto& body = j.at("evidence_patch");
        p.content.template_id = body.at("content").at("template").get<std::string>();
        for (const auto& kv : body.at("content").at("slots"))
            p.content.slots.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
        p.key_frames = body.at("key_frames").get<std::vector<int>>();
        for (const auto& m : body.at("temporal_markers")) {
            auto rel = parse_relation(m.at("relation").get<std::string>());
            if (!rel) throw ConfigError("unknown marker relation");
            p.temporal_markers.push_back({*rel, m.at("event").get<std::string>()});
        }
        for (const auto& r : body.at("spatial_regions")) {
            const auto fr = r.at("frames").get<std::vector<int>>();
            const auto cells = r.at("cells").get<std::vector<int>>();
            if (fr.size() != 2 || cells.size() != 4) throw ConfigError("malformed spatial region");
            p.spatial_regions.push_back({{fr[0], fr[1]}, {cells[0], cells[1]}, {cells[2], cells[3]}});
        }
        return p;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed patch record: ") + ex.what());
    }
}

std::uint64_t patch_digest(const EvidencePatch& patch) {
    nlohmann::json j = to_json(patch);
    // std::map-backed objects dump keys sorted, so the text is canonical.
    return hash_string(j.dump(), 0x9a7c4ULL);
}

}  // namespace ffr::teacher

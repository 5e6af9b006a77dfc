#include "ffr/teacher/leakage.hpp"

#include "ffr/metrics/blind.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ffr::teacher {
namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// `phrase` occurs in `text` delimited by non-alphanumerics on both sides.
bool contains_phrase(const std::string& text, const std::string& phrase) {
    if (phrase.empty()) return false;
    for (auto pos = text.find(phrase); pos != std::string::npos; pos = text.find(phrase, pos + 1)) {
        const bool left = pos == 0 || !word_char(text[pos - 1]);
        const std::size_t end = pos + phrase.size();
        const bool right = end == text.size() || !word_char(text[end]);
        if (left && right) return true;
    }
    return false;
}

bool has_option_letter(const std::string& text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] < 'A' || text[i] > 'D') continue;
        const bool left = i == 0 || !word_char(text[i - 1]);
        const bool right = i + 1 == text.size() || !word_char(text[i + 1]);
        if (left && right) return true;
    }
    return false;
}

std::string strip_ranges(const std::string& s) {
    std::string out;
    int depth = 0;
    for (char c : s) {
        if (c == '[') ++depth;
        else if (c == ']' && depth > 0) --depth;
        else if (depth == 0) out += c;
    }
    return out;
}

constexpr std::array<std::string_view, 8> kAnswerPhrases = {
    "the answer is", "answer is", "you should select", "you should choose",
    "correct choice", "correct answer", "correct option", "pick option"};
constexpr std::array<std::string_view, 4> kCausal = {"because", "caused by", "due to", "as a result of"};
constexpr std::array<std::string_view, 4> kOrderVerbs = {"happens", "happened", "occurs", "occurred"};

LeakageVerdict fail(ViolationKind k, std::string rule) { return {false, k, std::move(rule)}; }

}  // namespace

std::string_view to_string(ViolationKind k) { return k == ViolationKind::direct ? "direct" : "partial"; }

std::string patch_text(const EvidencePatch& patch) {
    std::string text = patch.content.render();
    for (const auto& [k, v] : patch.content.slots)
        if (k != "lo" && k != "hi" && k != "text") text += " " + v;
    for (const auto& m : patch.temporal_markers) text += " " + m.label;
    return strip_ranges(text);
}

LeakageVerdict leakage_check(const EvidencePatch& patch, const env::Task& task) {
    const std::string raw = patch_text(patch);
    const std::string text = lower(raw);

    for (auto p : kAnswerPhrases)
        if (contains_phrase(text, std::string(p))) return fail(ViolationKind::direct, "answer_phrase");
    if (has_option_letter(raw)) return fail(ViolationKind::direct, "option_letter");

    std::vector<std::string> terms;
    for (int i = 0; i < env::kNumOptions; ++i) {
        terms.push_back(lower(task.options[static_cast<std::size_t>(i)]));
        std::string v = lower(task.option_values[static_cast<std::size_t>(i)]);
        std::replace(v.begin(), v.end(), '_', ' ');
        terms.push_back(v);
    }
    for (const auto& t : terms)
        if (contains_phrase(text, t)) return fail(ViolationKind::direct, "option_text");

    // Attributes that would single out the gold object when the options name objects.
    if (auto shape = env::parse_shape(task.option_values[static_cast<std::size_t>(task.gold)])) {
        if (auto id = task.world.find_shape(*shape)) {
            const auto& o = task.world.object(*id);
            for (auto term : {env::to_string(o.color), env::to_string(o.material)})
                if (contains_phrase(text, std::string(term))) return fail(ViolationKind::direct, "gold_attribute");
        }
    }

    for (auto verb : kOrderVerbs)
        for (auto rel : {"before", "after"})
            if (contains_phrase(text, std::string(verb) + " " + rel))
                return fail(ViolationKind::direct, "ordering_claim");
    for (auto c : kCausal)
        if (contains_phrase(text, std::string(c))) return fail(ViolationKind::direct, "causal_claim");

    if (!patch.key_frames.empty()) {
        bool contiguous = patch.key_frames.size() >= 3;
        for (std::size_t i = 1; contiguous && i < patch.key_frames.size(); ++i)
            contiguous = patch.key_frames[i] == patch.key_frames[i - 1] + 1;
        if (!contiguous) return fail(ViolationKind::partial, "key_frame_width");
    }

    const auto scores = metrics::blind_scores(patch, task.options);
    const int best = *std::max_element(scores.begin(), scores.end());
    if (best > 0 && std::count(scores.begin(), scores.end(), best) == 1)
        return fail(ViolationKind::partial, "blind_decode");
    return {};
}

}  // namespace ffr::teacher

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ffr::policy {

// Fixed, ordered token set.
enum Token : int {
    THINK_OPEN = 0,
    THINK_CLOSE = 1,
    ANSWER_OPEN = 2,
    ANSWER_CLOSE = 3,
    OPT_A = 4,  // OPT_A..OPT_D = 4..7
    CITE_FRAME_0 = 8,  // CITE_FRAME_0..31 = 8..39
    FILLER_0 = 40,  // FILLER_0..7 = 40..47
    EOS = 48,
};

inline constexpr int kVocabSize = 49;
inline constexpr int kNumCiteFrames = 32;
inline constexpr int kNumFillers = 8;
inline constexpr int kNumContent = kNumCiteFrames + kNumFillers;
inline constexpr int kMaxTrajectoryLength = 64;

constexpr bool is_option(int t) { return t >= OPT_A && t < OPT_A + 4; }
constexpr bool is_cite(int t) { return t >= CITE_FRAME_0 && t < CITE_FRAME_0 + kNumCiteFrames; }
constexpr bool is_filler(int t) { return t >= FILLER_0 && t < FILLER_0 + kNumFillers; }
constexpr bool is_content(int t) { return is_cite(t) || is_filler(t); }
constexpr int cite_frame(int t) { return t - CITE_FRAME_0; }

std::string token_name(int t);

/// Text form, e.g. "<think> [frame 13] w2 </think><answer>B</answer>".
std::string render(const std::vector<int>& tokens);

/// A sampled or scored token sequence. logprobs_old holds natural-log
/// probabilities under the sampling snapshot, untruncated, temperature 1.
struct Trajectory {
    std::vector<int> tokens;
    std::vector<double> logprobs_old;
    bool patched = false;
    std::optional<std::uint64_t> patch_id;

    int length() const { return static_cast<int>(tokens.size()); }
    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Frames cited inside the think block, in order.
std::vector<int> cited_frames(const std::vector<int>& tokens);

}  // namespace ffr::policy

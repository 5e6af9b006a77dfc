#include "ffr/policy/vocab.hpp"

namespace ffr::policy {

std::string token_name(int t) {
    switch (t) {
        case THINK_OPEN: return "THINK_OPEN";
        case THINK_CLOSE: return "THINK_CLOSE";
        case ANSWER_OPEN: return "ANSWER_OPEN";
        case ANSWER_CLOSE: return "ANSWER_CLOSE";
        case EOS: return "EOS";
        default: break;
    }
    if (is_option(t)) return std::string("OPT_") + static_cast<char>('A' + (t - OPT_A));
    if (is_cite(t)) return "CITE_FRAME_" + std::to_string(cite_frame(t));
    if (is_filler(t)) return "FILLER_" + std::to_string(t - FILLER_0);
    return "UNK_" + std::to_string(t);
}

std::string render(const std::vector<int>& tokens) {
    std::string out;
    for (int t : tokens) {
        switch (t) {
            case THINK_OPEN: out += "<think>"; break;
            case THINK_CLOSE: out += " </think>"; break;
            case ANSWER_OPEN: out += "<answer>"; break;
            case ANSWER_CLOSE: out += "</answer>"; break;
            case EOS: break;
            default:
                if (is_option(t)) out += static_cast<char>('A' + (t - OPT_A));
                else if (is_cite(t)) out += " [frame " + std::to_string(cite_frame(t)) + "]";
                else if (is_filler(t)) out += " w" + std::to_string(t - FILLER_0);
                break;
        }
    }
    return out;
}

std::vector<int> cited_frames(const std::vector<int>& tokens) {
    std::vector<int> out;
    bool inside = false;
    for (int t : tokens) {
        if (t == THINK_OPEN) inside = true;
        else if (t == THINK_CLOSE) inside = false;
        else if (inside && is_cite(t)) out.push_back(cite_frame(t));
    }
    return out;
}

}  // namespace ffr::policy

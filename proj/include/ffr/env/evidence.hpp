#pragma once

#include "ffr/env/observe.hpp"

#include <array>

namespace ffr::env {

/// What an observation says about one option.
///  direct:   a visible interaction that settles the question for this option
///  loose:    a visible interaction involving the option but not the one asked
///            about (the salient distractor)
///  indirect: a state change between consecutive samples that no visible
///            interaction explains and that fits this option
/// The patch_* flags are the same readings over the patch detail only.
struct OptionEvidence {
    bool direct = false;
    bool loose = false;
    bool indirect = false;
    bool patch_direct = false;
    bool patch_loose = false;
};

using Evidence = std::array<OptionEvidence, kNumOptions>;

Evidence read_evidence(const Observation& obs);

}  // namespace ffr::env

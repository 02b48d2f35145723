#ifndef SILTOK_WALKER_HPP
#define SILTOK_WALKER_HPP

#include <cstdint>

#include "siltok/bitgrid.hpp"

namespace siltok {

/// Synthetic pedestrian configuration. Rasterization is integer/fixed-point
/// throughout, so a given config produces bit-identical frames on any
/// platform; generated corpora double as cross-implementation fixtures.
struct WalkerConfig {
    uint64_t seed = 0;
    uint32_t frame_count = 30;
    uint32_t height = 64;
    uint32_t width = 44;
    uint32_t period = 32;     ///< frames per gait cycle, >= 2
    uint32_t stride_px = 7;   ///< ankle swing amplitude in pixels
    double torso_frac = 0.30; ///< torso length as a fraction of height
    double head_frac = 0.115; ///< head diameter as a fraction of height
    bool hole_free = true;    ///< guarantee border-connected background
};

/// Head disc + torso capsule + two legs and two arms swinging sinusoidally
/// with opposite phase. With hole_free set, each frame is checked for
/// enclosed background; violations are re-rendered with reduced arm swing
/// and, as a last resort, hole-filled.
SilhouetteSequence generate_walker(const WalkerConfig& config);

} // namespace siltok

#endif // SILTOK_WALKER_HPP

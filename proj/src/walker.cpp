#include "siltok/walker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "siltok/extract.hpp"
#include "siltok/rng.hpp"

namespace siltok {

namespace {

// All geometry in 8.8 fixed point (1 px = 256 units).
constexpr int64_t kScale = 256;

// Quarter wave of sin, 64 steps plus endpoint, scaled by 4096.
constexpr int32_t kQuarterSine[65] = {
    0,    101,  201,  301,  401,  501,  601,  700,  799,  897,  995,  1092, 1189,
    1285, 1380, 1474, 1567, 1660, 1751, 1842, 1931, 2019, 2106, 2191, 2276, 2359,
    2440, 2520, 2598, 2675, 2751, 2824, 2896, 2967, 3035, 3102, 3166, 3229, 3290,
    3349, 3406, 3461, 3513, 3564, 3612, 3659, 3703, 3745, 3784, 3822, 3857, 3889,
    3920, 3948, 3973, 3996, 4017, 4036, 4052, 4065, 4076, 4085, 4091, 4095, 4096};

// sin of a 16-bit angle (full turn = 65536), scaled by 4096, with linear
// interpolation between table steps.
int32_t sine16(uint32_t angle) {
    angle &= 0xFFFF;
    const uint32_t quadrant = angle >> 14;
    uint32_t a = angle & 0x3FFF;
    if (quadrant == 1 || quadrant == 3) a = 0x4000 - a;
    const uint32_t idx = a >> 8;
    const uint32_t frac = a & 0xFF;
    int32_t v = kQuarterSine[idx];
    if (idx < 64) v += static_cast<int32_t>((kQuarterSine[idx + 1] - kQuarterSine[idx]) * frac) >> 8;
    return quadrant >= 2 ? -v : v;
}

// amplitude (fixed point) * sin(angle)
int64_t swing(int64_t amplitude, uint32_t angle) {
    return (amplitude * sine16(angle)) / 4096;
}

struct Figure {
    int64_t cx;          // body centerline
    int64_t head_r, torso_r, leg_r, arm_r;
    int64_t y_head, y_shoulder, y_hip, y_ankle, y_hand;
    int64_t stride, arm_amp, arm_spread, bob_amp;
    uint32_t phase_offset;
};

void paint_disc(BitGrid& g, int64_t cy, int64_t cx, int64_t r) {
    const int64_t r2 = r * r;
    const int32_t row_lo = std::max<int64_t>(0, (cy - r) / kScale);
    const int32_t row_hi = std::min<int64_t>(g.height() - 1, (cy + r) / kScale + 1);
    const int32_t col_lo = std::max<int64_t>(0, (cx - r) / kScale);
    const int32_t col_hi = std::min<int64_t>(g.width() - 1, (cx + r) / kScale + 1);
    for (int32_t row = row_lo; row <= row_hi; ++row) {
        const int64_t py = int64_t{row} * kScale + kScale / 2;
        for (int32_t col = col_lo; col <= col_hi; ++col) {
            const int64_t px = int64_t{col} * kScale + kScale / 2;
            const int64_t dy = py - cy;
            const int64_t dx = px - cx;
            if (dy * dy + dx * dx <= r2) g.set(row, col, true);
        }
    }
}

void paint_capsule(BitGrid& g, int64_t ay, int64_t ax, int64_t by, int64_t bx, int64_t r) {
    const int64_t r2 = r * r;
    const int64_t dy = by - ay;
    const int64_t dx = bx - ax;
    const int64_t len2 = dy * dy + dx * dx;
    const int32_t row_lo = std::max<int64_t>(0, (std::min(ay, by) - r) / kScale);
    const int32_t row_hi = std::min<int64_t>(g.height() - 1, (std::max(ay, by) + r) / kScale + 1);
    const int32_t col_lo = std::max<int64_t>(0, (std::min(ax, bx) - r) / kScale);
    const int32_t col_hi = std::min<int64_t>(g.width() - 1, (std::max(ax, bx) + r) / kScale + 1);
    for (int32_t row = row_lo; row <= row_hi; ++row) {
        const int64_t py = int64_t{row} * kScale + kScale / 2;
        for (int32_t col = col_lo; col <= col_hi; ++col) {
            const int64_t px = int64_t{col} * kScale + kScale / 2;
            const int64_t wy = py - ay;
            const int64_t wx = px - ax;
            const int64_t dot = wy * dy + wx * dx;
            bool inside;
            if (len2 == 0 || dot <= 0) {
                inside = wy * wy + wx * wx <= r2;
            } else if (dot >= len2) {
                const int64_t vy = py - by;
                const int64_t vx = px - bx;
                inside = vy * vy + vx * vx <= r2;
            } else {
                const int64_t cross = wy * dx - wx * dy;
                inside = cross * cross <= r2 * len2;
            }
            if (inside) g.set(row, col, true);
        }
    }
}

BitGrid render_frame(const WalkerConfig& cfg, const Figure& fig, uint32_t t,
                     int64_t arm_scale) {
    BitGrid g(cfg.height, cfg.width);

    const uint32_t phase_idx = (t + fig.phase_offset) % cfg.period;
    const uint32_t angle = static_cast<uint32_t>((uint64_t{phase_idx} << 16) / cfg.period);
    const uint32_t angle2 = static_cast<uint32_t>((uint64_t{(2 * t + fig.phase_offset) % cfg.period} << 16) /
                                                  cfg.period);

    // Vertical bob at double stride frequency; ankles stay planted.
    const int64_t bob = (fig.bob_amp * (4096 + sine16(angle2))) / 8192;

    const int64_t y_head = fig.y_head - bob;
    const int64_t y_sh = fig.y_shoulder - bob;
    const int64_t y_hip = fig.y_hip - bob;

    const int64_t leg_swing = swing(fig.stride, angle);
    const int64_t arm_amp = (fig.arm_amp * arm_scale) / kScale;
    const int64_t arm_swing = swing(arm_amp, angle);

    paint_disc(g, y_head, fig.cx, fig.head_r);
    paint_capsule(g, y_sh, fig.cx, y_hip, fig.cx, fig.torso_r);
    // Legs share the hip joint and swing in antiphase.
    paint_capsule(g, y_hip, fig.cx, fig.y_ankle, fig.cx + leg_swing, fig.leg_r);
    paint_capsule(g, y_hip, fig.cx, fig.y_ankle, fig.cx - leg_swing, fig.leg_r);
    // Arms hang outside the torso, in antiphase with the same-side leg.
    paint_capsule(g, y_sh, fig.cx, fig.y_hand, fig.cx - fig.arm_spread - arm_swing, fig.arm_r);
    paint_capsule(g, y_sh, fig.cx, fig.y_hand, fig.cx + fig.arm_spread + arm_swing, fig.arm_r);
    return g;
}

int64_t fraction_of_height(double frac, uint32_t height) {
    return static_cast<int64_t>(std::llround(frac * static_cast<double>(height) * kScale));
}

} // namespace

SilhouetteSequence generate_walker(const WalkerConfig& cfg) {
    if (cfg.height < 16 || cfg.width < 16)
        throw ValidationError("walker: dimensions below the 16x16 minimum: " +
                              std::to_string(cfg.height) + "x" + std::to_string(cfg.width));
    if (cfg.period < 2) throw ValidationError("walker: gait period must be at least 2 frames");
    if (cfg.frame_count == 0) throw ValidationError("walker: frame count must be positive");
    if (!(cfg.torso_frac > 0.0 && cfg.torso_frac < 1.0) ||
        !(cfg.head_frac > 0.0 && cfg.head_frac < 1.0))
        throw ValidationError("walker: torso/head proportions must lie in (0, 1)");

    SplitMix64 rng(cfg.seed);

    Figure fig;
    fig.head_r = fraction_of_height(cfg.head_frac, cfg.height) / 2;
    fig.torso_r = fraction_of_height(0.086, cfg.height);
    fig.leg_r = fraction_of_height(0.039, cfg.height);
    fig.arm_r = fraction_of_height(0.028, cfg.height);

    const int64_t top = 2 * kScale;
    fig.y_head = top + fig.head_r;
    fig.y_shoulder = top + fraction_of_height(cfg.head_frac, cfg.height) + fig.torso_r / 2;
    fig.y_hip = fig.y_shoulder + fraction_of_height(cfg.torso_frac, cfg.height);
    fig.y_ankle = int64_t{cfg.height - 3} * kScale - fig.leg_r;
    fig.y_hand = fig.y_hip + 2 * kScale;

    fig.stride = int64_t{cfg.stride_px} * kScale +
                 (static_cast<int64_t>(rng.next_below(3)) - 1) * (kScale / 2);
    fig.arm_amp = fig.stride / 2;
    // Keeps an open background channel between arm and torso at every phase.
    fig.arm_spread = fig.arm_amp + fig.torso_r + fig.arm_r + kScale;
    fig.bob_amp = kScale / 2;
    fig.phase_offset = static_cast<uint32_t>(rng.next_below(cfg.period));
    fig.cx = int64_t{cfg.width} * kScale / 2 +
             (static_cast<int64_t>(rng.next_below(5)) - 2) * (kScale / 4);

    if (fig.y_hip + 2 * kScale > fig.y_ankle)
        throw ValidationError("walker: torso leaves no room for legs (reduce torso_frac)");
    if (fig.y_hand + fig.arm_r >= fig.y_ankle)
        throw ValidationError("walker: arms would reach below the ankles");
    const int64_t reach = std::max({fig.stride + fig.leg_r,
                                    fig.arm_spread + fig.arm_amp + fig.arm_r, fig.torso_r});
    if (fig.cx - reach < kScale || fig.cx + reach > int64_t{cfg.width - 1} * kScale)
        throw ValidationError("walker: figure cannot fit: lateral reach " +
                              std::to_string(reach / kScale) + "px exceeds width " +
                              std::to_string(cfg.width) + " (reduce stride_px)");

    SilhouetteSequence seq;
    seq.label = "walker-" + std::to_string(cfg.seed);
    seq.source = "walker(seed=" + std::to_string(cfg.seed) + ")";
    seq.frames.reserve(cfg.frame_count);
    for (uint32_t t = 0; t < cfg.frame_count; ++t) {
        BitGrid frame = render_frame(cfg, fig, t, kScale);
        if (cfg.hole_free) {
            // Re-render with progressively smaller arm swing; arms against
            // the torso are what occasionally pinch off background pockets.
            int64_t arm_scale = kScale;
            for (int attempt = 0; attempt < 4 && !is_hole_free(frame); ++attempt) {
                arm_scale = arm_scale * 3 / 4;
                frame = render_frame(cfg, fig, t, arm_scale);
            }
            if (!is_hole_free(frame)) frame = fill_holes(frame);
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

} // namespace siltok

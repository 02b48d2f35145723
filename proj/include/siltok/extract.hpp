#ifndef SILTOK_EXTRACT_HPP
#define SILTOK_EXTRACT_HPP

#include <utility>
#include <vector>

#include "siltok/bitgrid.hpp"

namespace siltok {

/// Inner boundary of a silhouette: the foreground pixels that have at least
/// one inactive 4-neighbor (out-of-bounds counts as inactive).
struct ContourMap {
    BitGrid grid;
};

/// Symmetric difference (XOR) of two consecutive contour maps.
struct VelocityMap {
    BitGrid grid;
};

enum class FillMode {
    /// Background = inactive pixels 4-reachable from the grid border;
    /// everything else becomes foreground. Exact when the source has no
    /// enclosed background holes.
    exterior,
    /// Non-contour components are ranked by nesting depth from the border
    /// component; odd depths plus the contour form the foreground. Also exact
    /// on shapes whose contour separates every hole from the interior.
    parity,
};

ContourMap extract_contour(const BitGrid& silhouette);

BitGrid reconstruct_silhouette(const ContourMap& contour, FillMode mode = FillMode::exterior);

VelocityMap extract_velocity(const ContourMap& current, const ContourMap& previous);

/// One (contour, velocity) pair per frame, in frame order. The first frame's
/// velocity is the all-zero map so token streams stay index-aligned with the
/// input sequence.
std::vector<std::pair<ContourMap, VelocityMap>>
extract_sequence_maps(const SilhouetteSequence& seq);

/// Foreground plus its enclosed background regions. Used by the synthetic
/// generator to enforce hole-free output.
BitGrid fill_holes(const BitGrid& silhouette);

/// True when every background pixel is 4-reachable from the grid border,
/// i.e. the silhouette has no enclosed holes.
bool is_hole_free(const BitGrid& silhouette);

} // namespace siltok

#endif // SILTOK_EXTRACT_HPP

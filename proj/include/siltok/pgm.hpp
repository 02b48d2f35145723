#ifndef SILTOK_PGM_HPP
#define SILTOK_PGM_HPP

#include <cstdint>
#include <iosfwd>
#include <span>

#include "siltok/bitgrid.hpp"

namespace siltok {

/// Parses a P2 (ASCII) or P5 (binary) PGM, maxval up to 65535. A pixel is
/// foreground when its sample exceeds maxval/2. Malformed input is rejected
/// with the byte position of the problem.
BitGrid read_pgm(std::istream& in);

/// Emits binary P5, maxval 255, samples 0 or 255.
void write_pgm(std::ostream& out, const BitGrid& grid);

/// Grayscale P5 writer used for heatmap exports; maxval must be 255 or 65535.
/// 16-bit samples are written most significant byte first.
void write_pgm_gray(std::ostream& out, uint32_t height, uint32_t width,
                    std::span<const uint16_t> samples, uint16_t maxval);

} // namespace siltok

#endif // SILTOK_PGM_HPP

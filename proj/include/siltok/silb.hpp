#ifndef SILTOK_SILB_HPP
#define SILTOK_SILB_HPP

#include <iosfwd>
#include <string>

#include "siltok/bitgrid.hpp"

namespace siltok {

/// Packed sequence container, bit-exact by construction:
///   magic "SILB" | version u8 (=1) | height u16le | width u16le |
///   frame count u32le | frames in order, each row packed MSB-first and
///   padded to a whole byte.
/// Trailing bytes after the payload are rejected.
SilhouetteSequence read_packed(std::istream& in, std::string label = "",
                               std::string source = "");

void write_packed(std::ostream& out, const SilhouetteSequence& seq);

} // namespace siltok

#endif // SILTOK_SILB_HPP

#ifndef SILTOK_TOKENSTREAM_HPP
#define SILTOK_TOKENSTREAM_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "siltok/vocab.hpp"

namespace siltok {

struct SequenceTokens {
    std::string label;
    std::vector<TokenFrame> frames;
};

/// One JSON object per frame, corpus order:
///   {"seq":"<label>","t":<index>,"tokens":[...],"weights":[...]}
/// Weights are rendered with 17 significant digits, so output is
/// byte-reproducible for identical inputs.
void write_token_stream_jsonl(std::ostream& out, std::span<const SequenceTokens> stream);

/// Compact binary layout:
///   magic "STOK" | version u8 (=1) | sequence count u32le |
///   per sequence: label length u16le + label bytes + frame count u32le |
///   per frame: token count u32le + (token u32le, weight f64le) pairs.
void write_token_stream_binary(std::ostream& out, std::span<const SequenceTokens> stream);

std::vector<SequenceTokens> read_token_stream_binary(std::istream& in);

} // namespace siltok

#endif // SILTOK_TOKENSTREAM_HPP

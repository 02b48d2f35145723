#include "siltok/bitgrid.hpp"

namespace siltok {

BitGrid BitGrid::solid(uint32_t height, uint32_t width) {
    BitGrid g(height, width);
    const uint64_t mask = g.last_word_mask();
    for (uint32_t r = 0; r < height; ++r) {
        auto row = g.row_words(r);
        for (uint32_t wi = 0; wi + 1 < row.size(); ++wi) row[wi] = ~uint64_t{0};
        row[row.size() - 1] = mask;
    }
    return g;
}

BitVector BitGrid::flatten() const {
    BitVector out(pixel_count());
    uint64_t* dst = out.words().data();
    if (width_ % 64 == 0) {
        // Rows already carry no padding; a straight word copy suffices.
        for (uint64_t i = 0; i < words_.size(); ++i) dst[i] = words_[i];
        return out;
    }
    uint64_t bit_pos = 0;
    for (uint32_t r = 0; r < height_; ++r) {
        const uint64_t* row = row_ptr(r);
        uint32_t remaining = width_;
        uint32_t wi = 0;
        while (remaining > 0) {
            const uint32_t take = remaining < 64 ? remaining : 64;
            uint64_t chunk = row[wi++];
            if (take < 64) chunk &= (uint64_t{1} << take) - 1;
            const uint64_t word_idx = bit_pos >> 6;
            const uint32_t shift = static_cast<uint32_t>(bit_pos & 63);
            dst[word_idx] |= chunk << shift;
            if (shift != 0 && shift + take > 64) dst[word_idx + 1] |= chunk >> (64 - shift);
            bit_pos += take;
            remaining -= take;
        }
    }
    return out;
}

BitGrid BitGrid::from_flat(const BitVector& bits, uint32_t height, uint32_t width) {
    if (bits.size() != uint64_t{height} * width)
        throw ValidationError("flat vector length " + std::to_string(bits.size()) +
                              " does not match " + std::to_string(height) + "x" +
                              std::to_string(width) + " grid");
    BitGrid g(height, width);
    const uint64_t* src = bits.words().data();
    uint64_t bit_pos = 0;
    for (uint32_t r = 0; r < height; ++r) {
        auto row = g.row_words(r);
        uint32_t remaining = width;
        uint32_t wi = 0;
        while (remaining > 0) {
            const uint32_t take = remaining < 64 ? remaining : 64;
            const uint64_t word_idx = bit_pos >> 6;
            const uint32_t shift = static_cast<uint32_t>(bit_pos & 63);
            uint64_t chunk = src[word_idx] >> shift;
            if (shift != 0 && shift + take > 64) chunk |= src[word_idx + 1] << (64 - shift);
            if (take < 64) chunk &= (uint64_t{1} << take) - 1;
            row[wi++] = chunk;
            bit_pos += take;
            remaining -= take;
        }
    }
    return g;
}

void SilhouetteSequence::validate() const {
    if (frames.empty())
        throw ValidationError("sequence '" + label + "' has no frames");
    const uint32_t h = frames.front().height();
    const uint32_t w = frames.front().width();
    for (size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].height() != h || frames[i].width() != w)
            throw ValidationError("sequence '" + label + "' mixes dimensions: frame 0 is " +
                                  std::to_string(h) + "x" + std::to_string(w) + ", frame " +
                                  std::to_string(i) + " is " +
                                  std::to_string(frames[i].height()) + "x" +
                                  std::to_string(frames[i].width()));
    }
}

std::vector<uint32_t> decompose(const BitVector& bits) {
    std::vector<uint32_t> out;
    out.reserve(bits.popcount());
    const auto words = bits.words();
    for (uint64_t wi = 0; wi < words.size(); ++wi) {
        uint64_t w = words[wi];
        while (w != 0) {
            out.push_back(static_cast<uint32_t>(wi * 64 + std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

BitVector recompose(std::span<const uint32_t> indices, uint64_t size) {
    BitVector out(size);
    for (uint32_t i : indices) {
        if (i >= size)
            throw ValidationError("index " + std::to_string(i) +
                                  " out of range for vector of length " + std::to_string(size));
        out.set(i, true);
    }
    return out;
}

} // namespace siltok

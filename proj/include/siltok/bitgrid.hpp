#ifndef SILTOK_BITGRID_HPP
#define SILTOK_BITGRID_HPP

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "siltok/error.hpp"

namespace siltok {

/// Contiguous bit sequence with no per-row padding. The flattened form of a
/// grid: bit i corresponds to pixel (i / width, i % width).
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(uint64_t size) : size_(size), words_((size + 63) / 64, 0) {}

    uint64_t size() const { return size_; }

    bool get(uint64_t i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(uint64_t i, bool value) {
        check_index(i);
        const uint64_t mask = uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    uint64_t popcount() const {
        uint64_t n = 0;
        for (uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    std::span<const uint64_t> words() const { return words_; }
    std::span<uint64_t> words() { return words_; }

    bool operator==(const BitVector& other) const {
        return size_ == other.size_ && words_ == other.words_;
    }

private:
    void check_index(uint64_t i) const {
        if (i >= size_)
            throw ValidationError("bit index " + std::to_string(i) +
                                  " out of range [0, " + std::to_string(size_) + ")");
    }

    uint64_t size_ = 0;
    std::vector<uint64_t> words_;
};

/// Rectangular binary raster. Rows are bit-packed into 64-bit words, LSB
/// first, each row padded to a word boundary; padding bits are kept zero so
/// word-wise popcount/XOR/compare need no masking.
class BitGrid {
public:
    BitGrid() = default;

    BitGrid(uint32_t height, uint32_t width)
        : height_(height),
          width_(width),
          words_per_row_((width + 63) / 64),
          words_(uint64_t{height} * ((width + 63) / 64), 0) {
        if (height == 0 || width == 0)
            throw ValidationError("grid dimensions must be positive, got " +
                                  std::to_string(height) + "x" + std::to_string(width));
    }

    static BitGrid solid(uint32_t height, uint32_t width);

    uint32_t height() const { return height_; }
    uint32_t width() const { return width_; }
    uint64_t pixel_count() const { return uint64_t{height_} * width_; }
    uint32_t words_per_row() const { return words_per_row_; }

    bool get(uint32_t row, uint32_t col) const {
        check_coords(row, col);
        return (row_ptr(row)[col >> 6] >> (col & 63)) & 1u;
    }

    void set(uint32_t row, uint32_t col, bool value) {
        check_coords(row, col);
        const uint64_t mask = uint64_t{1} << (col & 63);
        if (value)
            row_ptr(row)[col >> 6] |= mask;
        else
            row_ptr(row)[col >> 6] &= ~mask;
    }

    uint64_t popcount() const {
        uint64_t n = 0;
        for (uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    bool same_dimensions(const BitGrid& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    bool operator==(const BitGrid& other) const {
        return same_dimensions(other) && words_ == other.words_;
    }

    std::span<const uint64_t> row_words(uint32_t row) const {
        return {row_ptr(row), words_per_row_};
    }
    std::span<uint64_t> row_words(uint32_t row) {
        return {row_ptr(row), words_per_row_};
    }
    std::span<const uint64_t> words() const { return words_; }
    std::span<uint64_t> words() { return words_; }

    /// Mask covering the valid bits of the last word in a row; all earlier
    /// words use every bit.
    uint64_t last_word_mask() const {
        const uint32_t rem = width_ & 63;
        return rem == 0 ? ~uint64_t{0} : (uint64_t{1} << rem) - 1;
    }

    /// Row-major repack into a contiguous bit vector of length height*width.
    BitVector flatten() const;

    /// Inverse of flatten.
    static BitGrid from_flat(const BitVector& bits, uint32_t height, uint32_t width);

    /// Calls fn(row, col) for every set pixel, in row-major order.
    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (uint32_t r = 0; r < height_; ++r) {
            const uint64_t* row = row_ptr(r);
            for (uint32_t wi = 0; wi < words_per_row_; ++wi) {
                uint64_t w = row[wi];
                while (w != 0) {
                    const int bit = std::countr_zero(w);
                    fn(r, wi * 64 + static_cast<uint32_t>(bit));
                    w &= w - 1;
                }
            }
        }
    }

private:
    void check_coords(uint32_t row, uint32_t col) const {
        if (row >= height_ || col >= width_)
            throw ValidationError("pixel (" + std::to_string(row) + ", " +
                                  std::to_string(col) + ") out of range for " +
                                  std::to_string(height_) + "x" + std::to_string(width_) +
                                  " grid");
    }

    const uint64_t* row_ptr(uint32_t row) const {
        return words_.data() + uint64_t{row} * words_per_row_;
    }
    uint64_t* row_ptr(uint32_t row) {
        return words_.data() + uint64_t{row} * words_per_row_;
    }

    uint32_t height_ = 0;
    uint32_t width_ = 0;
    uint32_t words_per_row_ = 0;
    std::vector<uint64_t> words_;
};

/// Ordered frames plus metadata. All frames share dimensions.
struct SilhouetteSequence {
    std::vector<BitGrid> frames;
    std::string label;
    std::string source;

    /// Throws unless frames are nonempty and uniformly sized.
    void validate() const;
};

/// Active indices of a bit vector, ascending.
std::vector<uint32_t> decompose(const BitVector& bits);

/// Builds the length-`size` bit vector whose set bits are exactly `indices`.
BitVector recompose(std::span<const uint32_t> indices, uint64_t size);

} // namespace siltok

#endif // SILTOK_BITGRID_HPP

#ifndef SILTOK_VOCAB_HPP
#define SILTOK_VOCAB_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "siltok/bitgrid.hpp"
#include "siltok/extract.hpp"
#include "siltok/rng.hpp"

namespace siltok {

enum class Channel : uint32_t { contour = 0, velocity = 1 };

inline constexpr uint32_t kChannelCount = 2;

/// Injective assignment from (channel, pixel index) to token IDs in [0, N).
/// Seed 0 is the identity layout (contour pixel i -> i, velocity pixel i ->
/// S_L + i); other seeds scatter the same slots across [0, N) with a partial
/// Fisher-Yates shuffle driven by splitmix64. The map is a pure function of
/// (S_L, N, seed).
class VocabularyMap {
public:
    VocabularyMap() = default;

    static VocabularyMap build(uint32_t pixels_per_frame, uint32_t vocab_size, uint64_t seed);

    uint32_t pixels_per_frame() const { return pixels_per_frame_; }
    uint32_t vocab_size() const { return vocab_size_; }
    uint64_t seed() const { return seed_; }

    uint32_t slot_of(Channel ch, uint32_t pixel) const {
        return static_cast<uint32_t>(ch) * pixels_per_frame_ + pixel;
    }

    uint32_t token_for(Channel ch, uint32_t pixel) const {
        const uint32_t slot = slot_of(ch, pixel);
        if (pixel >= pixels_per_frame_)
            throw ValidationError("pixel index " + std::to_string(pixel) +
                                  " out of range for S_L=" + std::to_string(pixels_per_frame_));
        return token_by_slot_[slot];
    }

    /// Token IDs indexed by slot = channel * S_L + pixel; length 2 * S_L.
    std::span<const uint32_t> tokens_by_slot() const { return token_by_slot_; }

private:
    uint32_t pixels_per_frame_ = 0;
    uint32_t vocab_size_ = 0;
    uint64_t seed_ = 0;
    std::vector<uint32_t> token_by_slot_;
};

/// Per-token occurrence statistics over a corpus plus the rebalancing
/// coefficients derived from them. Indexed by slot, not token ID, so the
/// values are independent of the vocabulary seed.
struct FrequencyTable {
    uint64_t frame_count = 0;
    double f_min = 0.0;
    /// Mean frequency over contour-channel slots with nonzero frequency; the
    /// normalizer for all coefficients.
    double mean_contour_frequency = 0.0;
    double mean_velocity_frequency = 0.0;
    std::vector<double> frequency;    // fraction of frames each slot is active in
    std::vector<double> coefficient;  // mean_contour_frequency / max(f, f_min)

    uint32_t pixels_per_frame() const {
        return static_cast<uint32_t>(frequency.size() / kChannelCount);
    }
};

/// Counts per-slot activation over the corpus and derives coefficients
/// w = f̄_c / max(f, f_min). Counting may be split across `threads` workers;
/// the merged integer counts equal the single-threaded ones exactly.
FrequencyTable estimate_frequencies(std::span<const SilhouetteSequence> corpus,
                                    const VocabularyMap& vocab, double f_min,
                                    unsigned threads = 1);

/// One frame's encoded tokens: IDs strictly ascending, weights parallel.
struct TokenFrame {
    uint32_t frame_index = 0;
    std::vector<uint32_t> tokens;
    std::vector<double> weights;
};

TokenFrame encode_frame(const ContourMap& contour, const VelocityMap& velocity,
                        const VocabularyMap& vocab, const FrequencyTable& freq,
                        uint32_t frame_index = 0);

std::vector<TokenFrame> encode_sequence(const SilhouetteSequence& seq,
                                        const VocabularyMap& vocab,
                                        const FrequencyTable& freq);

/// Deterministic stand-in for a frozen embedding table: a counter-based
/// splitmix64 generator mapping (token ID, dimension) to a value in [-1, 1].
/// Bit-identical for a given (seed, token, dim) on any binary64 platform.
struct ProjectionStub {
    uint32_t dimension = 256;
    uint64_t seed = 0;

    double value(uint32_t token, uint32_t dim) const {
        const uint64_t key = (uint64_t{token} << 32) | dim;
        const uint64_t bits = splitmix64_mix(key ^ splitmix64_mix(seed));
        // top 53 bits -> [0, 1) -> [-1, 1)
        return static_cast<double>(bits >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    }
};

/// Weighted sum of stub rows over the frame's tokens, L2-normalized.
/// An empty frame yields the zero vector.
std::vector<double> project_frame(const TokenFrame& frame, const ProjectionStub& stub,
                                  uint32_t vocab_size);

/// On-disk bundle: the map parameters plus the frequency table, tied to a
/// frame geometry.
struct VocabularyFile {
    uint32_t height = 0;
    uint32_t width = 0;
    VocabularyMap map;
    FrequencyTable freq;
};

/// JSON with fixed key order; real values carry 17 significant digits so
/// re-encoding a parsed file is byte-identical.
void write_vocabulary_file(std::ostream& out, const VocabularyFile& file);

VocabularyFile read_vocabulary_file(std::istream& in);

} // namespace siltok

#endif // SILTOK_VOCAB_HPP

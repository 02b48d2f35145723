#ifndef SILTOK_STATS_HPP
#define SILTOK_STATS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siltok/bitgrid.hpp"
#include "siltok/extract.hpp"
#include "siltok/vocab.hpp"

namespace siltok {

enum class MapType { silhouette, contour, velocity };

const char* map_type_name(MapType type);

/// One map type's measured token density over a corpus.
struct DensityEntry {
    MapType type = MapType::silhouette;
    uint64_t active_pixels = 0;
    uint64_t frames = 0;
    uint64_t pixels_per_frame = 0;
    double density = 0.0; ///< active / (frames * pixels_per_frame)
};

DensityEntry compute_density(std::span<const SilhouetteSequence> corpus, MapType type,
                             unsigned threads = 1);

struct SequenceDensity {
    std::string label;
    uint64_t frames = 0;
    double silhouette = 0.0;
    double contour = 0.0;
    double velocity = 0.0;
};

/// Densities for all three map types in one corpus pass. First-frame zero
/// velocities are counted in `velocity`; `velocity_excluding_first` divides
/// by the non-first frame count instead.
struct DensityReport {
    uint32_t height = 0;
    uint32_t width = 0;
    uint64_t frames = 0;
    uint64_t sequences = 0;
    double silhouette = 0.0;
    double contour = 0.0;
    double velocity = 0.0;
    double velocity_excluding_first = 0.0;
    bool first_frame_velocity_included = true;
    double acr_contour = 0.0;  ///< contour / silhouette for this corpus
    double acr_velocity = 0.0;
    std::vector<SequenceDensity> per_sequence;
};

DensityReport build_density_report(std::span<const SilhouetteSequence> corpus,
                                   unsigned threads = 1);

/// Mean over datasets of P_x / P_s, given (P_s, P_x) pairs. Rejects any
/// dataset with zero silhouette density.
double compute_acr(std::span<const std::pair<double, double>> silhouette_and_map_density);

/// Log-spaced occurrence histogram of token frequencies over (0, 1];
/// zero-frequency tokens are counted separately.
struct FrequencyHistogram {
    std::string tag; // "contour", "velocity", or a caller-supplied label
    std::vector<double> edges;     // bins + 1 ascending edges, last is 1.0
    std::vector<uint64_t> counts;  // per bin
    uint64_t zero_frequency_tokens = 0;
};

FrequencyHistogram compute_histogram(const FrequencyTable& freq, Channel channel,
                                     uint32_t bins);

/// Same binning for an arbitrary frequency list (e.g. an externally supplied
/// text-token table to compare against).
FrequencyHistogram compute_histogram(std::span<const double> frequencies, uint32_t bins,
                                     std::string tag);

enum class HeatmapNormalization {
    raw,           ///< plain per-pixel activation frequency
    contour_range, ///< divided by the max contour-pixel frequency, clamped to [0, 1]
};

struct FrequencyHeatmap {
    MapType type = MapType::silhouette;
    HeatmapNormalization normalization = HeatmapNormalization::raw;
    uint32_t height = 0;
    uint32_t width = 0;
    std::vector<double> values; // row-major
};

FrequencyHeatmap compute_heatmap(std::span<const SilhouetteSequence> corpus, MapType type,
                                 HeatmapNormalization normalization, unsigned threads = 1);

/// Per-corpus reconstruction check: Hamming distance between each silhouette
/// and reconstruct(extract_contour(s)) under the given fill mode.
struct RoundtripReport {
    FillMode mode = FillMode::exterior;
    uint64_t frames = 0;
    uint64_t mismatched_frames = 0;
    uint64_t mismatched_pixels = 0;
    std::string worst_sequence;
    uint32_t worst_frame = 0;
    uint64_t worst_pixels = 0;
};

RoundtripReport roundtrip_report(std::span<const SilhouetteSequence> corpus, FillMode mode);

void write_histogram_csv(std::ostream& out, const FrequencyHistogram& hist);
void write_heatmap_csv(std::ostream& out, const FrequencyHeatmap& map);
/// Linear scaling: sample = round(clamp(v, 0, 1) * maxval); bits is 8 or 16.
void write_heatmap_pgm(std::ostream& out, const FrequencyHeatmap& map, unsigned bits = 16);

} // namespace siltok

#endif // SILTOK_STATS_HPP

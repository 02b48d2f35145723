#include "siltok/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "siltok/corpus.hpp"
#include "siltok/format.hpp"
#include "siltok/pgm.hpp"

namespace siltok {

const char* map_type_name(MapType type) {
    switch (type) {
        case MapType::silhouette: return "silhouette";
        case MapType::contour: return "contour";
        case MapType::velocity: return "velocity";
    }
    return "?";
}

namespace {

// Integer accumulators from one corpus scan. Partial scans merge by plain
// addition, so parallel and sequential runs agree bit for bit once the
// derived ratios are computed from the merged counts.
struct ScanCounts {
    uint64_t frames = 0;
    uint64_t active_silhouette = 0;
    uint64_t active_contour = 0;
    uint64_t active_velocity = 0;
    std::vector<uint64_t> pixel_silhouette;
    std::vector<uint64_t> pixel_contour;
    std::vector<uint64_t> pixel_velocity;
    std::vector<SequenceDensity> per_sequence; // densities filled in later

    void merge(const ScanCounts& other) {
        frames += other.frames;
        active_silhouette += other.active_silhouette;
        active_contour += other.active_contour;
        active_velocity += other.active_velocity;
        for (size_t i = 0; i < pixel_silhouette.size(); ++i) {
            pixel_silhouette[i] += other.pixel_silhouette[i];
            pixel_contour[i] += other.pixel_contour[i];
            pixel_velocity[i] += other.pixel_velocity[i];
        }
        per_sequence.insert(per_sequence.end(), other.per_sequence.begin(),
                            other.per_sequence.end());
    }
};

ScanCounts scan_chunk(std::span<const SilhouetteSequence> sequences, uint64_t pixels) {
    ScanCounts counts;
    counts.pixel_silhouette.assign(pixels, 0);
    counts.pixel_contour.assign(pixels, 0);
    counts.pixel_velocity.assign(pixels, 0);
    for (const auto& seq : sequences) {
        uint64_t seq_sil = 0, seq_con = 0, seq_vel = 0;
        const uint32_t width = seq.frames.front().width();
        const auto maps = extract_sequence_maps(seq);
        for (size_t t = 0; t < seq.frames.size(); ++t) {
            seq_sil += seq.frames[t].popcount();
            seq_con += maps[t].first.grid.popcount();
            seq_vel += maps[t].second.grid.popcount();
            seq.frames[t].for_each_set(
                [&](uint32_t r, uint32_t c) { ++counts.pixel_silhouette[uint64_t{r} * width + c]; });
            maps[t].first.grid.for_each_set(
                [&](uint32_t r, uint32_t c) { ++counts.pixel_contour[uint64_t{r} * width + c]; });
            maps[t].second.grid.for_each_set(
                [&](uint32_t r, uint32_t c) { ++counts.pixel_velocity[uint64_t{r} * width + c]; });
        }
        counts.frames += seq.frames.size();
        counts.active_silhouette += seq_sil;
        counts.active_contour += seq_con;
        counts.active_velocity += seq_vel;

        const double denom = static_cast<double>(seq.frames.size()) *
                             static_cast<double>(seq.frames.front().pixel_count());
        SequenceDensity sd;
        sd.label = seq.label;
        sd.frames = seq.frames.size();
        sd.silhouette = static_cast<double>(seq_sil) / denom;
        sd.contour = static_cast<double>(seq_con) / denom;
        sd.velocity = static_cast<double>(seq_vel) / denom;
        counts.per_sequence.push_back(std::move(sd));
    }
    return counts;
}

ScanCounts scan_corpus(std::span<const SilhouetteSequence> corpus, uint64_t pixels,
                       unsigned threads) {
    if (threads <= 1 || corpus.size() == 1) return scan_chunk(corpus, pixels);
    const size_t workers = std::min<size_t>(threads, corpus.size());
    std::vector<ScanCounts> partial(workers);
    std::vector<std::thread> pool;
    const size_t per = (corpus.size() + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        const size_t begin = std::min(corpus.size(), w * per);
        const size_t end = std::min(corpus.size(), begin + per);
        pool.emplace_back(
            [&, w, begin, end] { partial[w] = scan_chunk(corpus.subspan(begin, end - begin), pixels); });
    }
    for (auto& t : pool) t.join();
    ScanCounts counts = std::move(partial.front());
    for (size_t w = 1; w < workers; ++w) counts.merge(partial[w]);
    return counts;
}

} // namespace

DensityEntry compute_density(std::span<const SilhouetteSequence> corpus, MapType type,
                             unsigned threads) {
    const auto [h, w] = corpus_dimensions(corpus); // rejects empty / mixed corpora
    const uint64_t pixels = uint64_t{h} * w;
    const ScanCounts counts = scan_corpus(corpus, pixels, threads);

    DensityEntry entry;
    entry.type = type;
    entry.frames = counts.frames;
    entry.pixels_per_frame = pixels;
    switch (type) {
        case MapType::silhouette: entry.active_pixels = counts.active_silhouette; break;
        case MapType::contour: entry.active_pixels = counts.active_contour; break;
        case MapType::velocity: entry.active_pixels = counts.active_velocity; break;
    }
    entry.density = static_cast<double>(entry.active_pixels) /
                    (static_cast<double>(counts.frames) * static_cast<double>(pixels));
    return entry;
}

DensityReport build_density_report(std::span<const SilhouetteSequence> corpus,
                                   unsigned threads) {
    const auto [h, w] = corpus_dimensions(corpus);
    const uint64_t pixels = uint64_t{h} * w;
    const ScanCounts counts = scan_corpus(corpus, pixels, threads);

    DensityReport report;
    report.height = h;
    report.width = w;
    report.frames = counts.frames;
    report.sequences = corpus.size();
    const double denom = static_cast<double>(counts.frames) * static_cast<double>(pixels);
    report.silhouette = static_cast<double>(counts.active_silhouette) / denom;
    report.contour = static_cast<double>(counts.active_contour) / denom;
    report.velocity = static_cast<double>(counts.active_velocity) / denom;

    // First frames contribute zero active velocity pixels by definition; the
    // excluding-first variant only shrinks the denominator.
    const uint64_t non_first = counts.frames - corpus.size();
    report.velocity_excluding_first =
        non_first == 0 ? 0.0
                       : static_cast<double>(counts.active_velocity) /
                             (static_cast<double>(non_first) * static_cast<double>(pixels));

    report.acr_contour = report.silhouette > 0.0 ? report.contour / report.silhouette : 0.0;
    report.acr_velocity = report.silhouette > 0.0 ? report.velocity / report.silhouette : 0.0;
    report.per_sequence = counts.per_sequence;
    return report;
}

double compute_acr(std::span<const std::pair<double, double>> silhouette_and_map_density) {
    if (silhouette_and_map_density.empty())
        throw ValidationError("acr: need at least one (P_s, P_x) pair");
    double sum = 0.0;
    for (const auto& [p_s, p_x] : silhouette_and_map_density) {
        if (!(p_s > 0.0))
            throw ValidationError("acr: silhouette density must be positive, got " +
                                  format_real17(p_s));
        sum += p_x / p_s;
    }
    return sum / static_cast<double>(silhouette_and_map_density.size());
}

FrequencyHistogram compute_histogram(const FrequencyTable& freq, Channel channel,
                                     uint32_t bins) {
    const uint32_t sl = freq.pixels_per_frame();
    const auto values = std::span<const double>(freq.frequency)
                            .subspan(static_cast<uint32_t>(channel) * sl, sl);
    return compute_histogram(values, bins,
                             channel == Channel::contour ? "contour" : "velocity");
}

FrequencyHistogram compute_histogram(std::span<const double> values, uint32_t bins,
                                     std::string tag) {
    if (bins < 2) throw ValidationError("histogram: need at least 2 bins");

    FrequencyHistogram hist;
    hist.tag = std::move(tag);
    hist.counts.assign(bins, 0);

    double lo = 1.0;
    uint64_t nonzero = 0;
    for (double f : values) {
        if (f > 0.0) {
            ++nonzero;
            lo = std::min(lo, f);
        } else {
            ++hist.zero_frequency_tokens;
        }
    }
    if (lo >= 1.0) lo = 0.5; // degenerate: everything at frequency 1

    hist.edges.resize(bins + 1);
    const double log_lo = std::log(lo);
    for (uint32_t i = 0; i <= bins; ++i)
        hist.edges[i] = std::exp(log_lo * (1.0 - static_cast<double>(i) / bins));
    hist.edges.front() = lo;
    hist.edges.back() = 1.0;

    if (nonzero == 0) return hist;
    for (double f : values) {
        if (f <= 0.0) continue;
        const auto it = std::lower_bound(hist.edges.begin() + 1, hist.edges.end(), f);
        const auto bin = static_cast<size_t>(it - hist.edges.begin()) - 1;
        ++hist.counts[std::min<size_t>(bin, bins - 1)];
    }
    return hist;
}

FrequencyHeatmap compute_heatmap(std::span<const SilhouetteSequence> corpus, MapType type,
                                 HeatmapNormalization normalization, unsigned threads) {
    const auto [h, w] = corpus_dimensions(corpus);
    const uint64_t pixels = uint64_t{h} * w;
    const ScanCounts counts = scan_corpus(corpus, pixels, threads);

    const std::vector<uint64_t>* selected = nullptr;
    switch (type) {
        case MapType::silhouette: selected = &counts.pixel_silhouette; break;
        case MapType::contour: selected = &counts.pixel_contour; break;
        case MapType::velocity: selected = &counts.pixel_velocity; break;
    }

    FrequencyHeatmap map;
    map.type = type;
    map.normalization = normalization;
    map.height = h;
    map.width = w;
    map.values.resize(pixels);
    const double frames = static_cast<double>(counts.frames);
    for (uint64_t i = 0; i < pixels; ++i)
        map.values[i] = static_cast<double>((*selected)[i]) / frames;

    if (normalization == HeatmapNormalization::contour_range) {
        uint64_t max_contour = 0;
        for (uint64_t c : counts.pixel_contour) max_contour = std::max(max_contour, c);
        if (max_contour == 0) {
            std::fill(map.values.begin(), map.values.end(), 0.0);
        } else {
            const double scale = frames / static_cast<double>(max_contour);
            for (double& v : map.values) v = std::min(1.0, v * scale);
        }
    }
    return map;
}

RoundtripReport roundtrip_report(std::span<const SilhouetteSequence> corpus, FillMode mode) {
    RoundtripReport report;
    report.mode = mode;
    for (const auto& seq : corpus) {
        seq.validate();
        for (size_t t = 0; t < seq.frames.size(); ++t) {
            const BitGrid& original = seq.frames[t];
            const BitGrid rebuilt = reconstruct_silhouette(extract_contour(original), mode);
            uint64_t mismatch = 0;
            const auto a = original.words();
            const auto b = rebuilt.words();
            for (size_t i = 0; i < a.size(); ++i) mismatch += std::popcount(a[i] ^ b[i]);
            ++report.frames;
            if (mismatch == 0) continue;
            ++report.mismatched_frames;
            report.mismatched_pixels += mismatch;
            if (mismatch > report.worst_pixels) {
                report.worst_pixels = mismatch;
                report.worst_sequence = seq.label;
                report.worst_frame = static_cast<uint32_t>(t);
            }
        }
    }
    return report;
}

void write_histogram_csv(std::ostream& out, const FrequencyHistogram& hist) {
    out << "# tag=" << hist.tag << " zero_frequency_tokens=" << hist.zero_frequency_tokens
        << "\n";
    out << "bin_low,bin_high,count\n";
    for (size_t b = 0; b < hist.counts.size(); ++b)
        out << format_real17(hist.edges[b]) << ',' << format_real17(hist.edges[b + 1]) << ','
            << hist.counts[b] << "\n";
    if (!out) throw IoError("histogram: stream write failed");
}

void write_heatmap_csv(std::ostream& out, const FrequencyHeatmap& map) {
    for (uint32_t r = 0; r < map.height; ++r) {
        for (uint32_t c = 0; c < map.width; ++c) {
            if (c != 0) out << ',';
            out << format_real17(map.values[uint64_t{r} * map.width + c]);
        }
        out << '\n';
    }
    if (!out) throw IoError("heatmap: stream write failed");
}

void write_heatmap_pgm(std::ostream& out, const FrequencyHeatmap& map, unsigned bits) {
    if (bits != 8 && bits != 16)
        throw ValidationError("heatmap: pgm depth must be 8 or 16 bits");
    const uint16_t maxval = bits == 8 ? 255 : 65535;
    std::vector<uint16_t> samples(map.values.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const double v = std::clamp(map.values[i], 0.0, 1.0);
        samples[i] = static_cast<uint16_t>(std::lround(v * maxval));
    }
    write_pgm_gray(out, map.height, map.width, samples, maxval);
}

} // namespace siltok

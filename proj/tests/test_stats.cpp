#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracle.hpp"
#include "siltok/stats.hpp"
#include "siltok/walker.hpp"

using namespace siltok;

namespace {

std::vector<SilhouetteSequence> small_corpus(uint64_t seed, int sequences, uint32_t frames) {
    std::vector<SilhouetteSequence> corpus;
    for (int s = 0; s < sequences; ++s) {
        WalkerConfig cfg;
        cfg.seed = seed + static_cast<uint64_t>(s);
        cfg.frame_count = frames;
        corpus.push_back(generate_walker(cfg));
    }
    return corpus;
}

// Donut: solid square with a square hole of 64 pixels.
SilhouetteSequence donut_sequence() {
    BitGrid g(64, 44);
    for (uint32_t r = 20; r < 40; ++r)
        for (uint32_t c = 10; c < 30; ++c) g.set(r, c, true);
    for (uint32_t r = 26; r < 34; ++r)
        for (uint32_t c = 16; c < 24; ++c) g.set(r, c, false);
    return SilhouetteSequence{{g}, "donut", "constructed"};
}

} // namespace

TEST_CASE("densities equal a naive double-loop oracle") {
    const auto corpus = small_corpus(50, 3, 20);
    const DensityReport report = build_density_report(corpus);

    uint64_t sil = 0, con = 0, vel = 0, frames = 0;
    for (const auto& seq : corpus) {
        BitGrid prev_contour(64, 44);
        for (size_t t = 0; t < seq.frames.size(); ++t) {
            const BitGrid contour = oracle::contour(seq.frames[t]);
            sil += oracle::popcount(seq.frames[t]);
            con += oracle::popcount(contour);
            if (t > 0) vel += oracle::xor_popcount(contour, prev_contour);
            prev_contour = contour;
            ++frames;
        }
    }
    const double denom = static_cast<double>(frames) * 2816.0;
    CHECK(report.frames == frames);
    CHECK(report.silhouette == static_cast<double>(sil) / denom);
    CHECK(report.contour == static_cast<double>(con) / denom);
    CHECK(report.velocity == static_cast<double>(vel) / denom);

    CHECK(compute_density(corpus, MapType::silhouette).active_pixels == sil);
    CHECK(compute_density(corpus, MapType::contour).active_pixels == con);
    CHECK(compute_density(corpus, MapType::velocity).active_pixels == vel);
}

TEST_CASE("measured densities order velocity < contour < silhouette") {
    const auto corpus = small_corpus(60, 2, 50);
    const DensityReport report = build_density_report(corpus);
    CHECK(report.velocity < report.contour);
    CHECK(report.contour < report.silhouette);
    CHECK(report.silhouette < 1.0);
}

TEST_CASE("all-one single-frame corpus has the border-ring contour density") {
    std::vector<SilhouetteSequence> corpus{
        SilhouetteSequence{{BitGrid::solid(64, 44)}, "ones", ""}};
    const DensityReport report = build_density_report(corpus);
    CHECK(report.silhouette == 1.0);
    CHECK(report.contour == doctest::Approx(212.0 / 2816.0));
    CHECK(report.velocity == 0.0);  // single frame: velocity is the zero map
    CHECK(report.velocity_excluding_first == 0.0);
    CHECK(report.first_frame_velocity_included);
}

TEST_CASE("density computations reject an empty corpus") {
    CHECK_THROWS_AS(build_density_report({}), ValidationError);
    CHECK_THROWS_AS(compute_density({}, MapType::contour), ValidationError);
}

TEST_CASE("parallel corpus scans equal sequential ones") {
    const auto corpus = small_corpus(70, 5, 15);
    const DensityReport a = build_density_report(corpus, 1);
    const DensityReport b = build_density_report(corpus, 4);
    CHECK(a.silhouette == b.silhouette);
    CHECK(a.contour == b.contour);
    CHECK(a.velocity == b.velocity);
    REQUIRE(a.per_sequence.size() == b.per_sequence.size());
    for (size_t i = 0; i < a.per_sequence.size(); ++i) {
        CHECK(a.per_sequence[i].label == b.per_sequence[i].label);
        CHECK(a.per_sequence[i].silhouette == b.per_sequence[i].silhouette);
    }
}

TEST_CASE("acr reproduces the published table arithmetic") {
    const std::vector<std::pair<double, double>> contour_rows{
        {21.2, 4.5}, {25.0, 4.1}, {20.2, 4.1}};
    const std::vector<std::pair<double, double>> velocity_rows{
        {21.2, 1.8}, {25.0, 2.0}, {20.2, 2.1}};
    CHECK(std::abs(compute_acr(contour_rows) - 0.193) <= 0.0015);
    CHECK(std::abs(compute_acr(velocity_rows) - 0.090) <= 0.0015);

    const std::vector<std::pair<double, double>> self{{21.2, 21.2}, {25.0, 25.0}};
    CHECK(compute_acr(self) == 1.0);
}

TEST_CASE("acr rejects degenerate inputs") {
    CHECK_THROWS_AS(compute_acr({}), ValidationError);
    const std::vector<std::pair<double, double>> zero{{0.0, 1.0}};
    CHECK_THROWS_AS(compute_acr(zero), ValidationError);
}

TEST_CASE("histogram counts sum to the nonzero-token count") {
    const auto corpus = small_corpus(80, 2, 25);
    const VocabularyMap vocab = VocabularyMap::build(2816, 151642, 0);
    const FrequencyTable freq = estimate_frequencies(corpus, vocab, 1e-3);

    for (const Channel ch : {Channel::contour, Channel::velocity}) {
        const FrequencyHistogram hist = compute_histogram(freq, ch, 24);
        const uint64_t total =
            std::accumulate(hist.counts.begin(), hist.counts.end(), uint64_t{0});
        uint64_t nonzero = 0;
        const uint32_t offset = ch == Channel::velocity ? 2816 : 0;
        for (uint32_t pix = 0; pix < 2816; ++pix)
            if (freq.frequency[offset + pix] > 0.0) ++nonzero;
        CHECK(total == nonzero);
        CHECK(hist.zero_frequency_tokens == 2816 - nonzero);
        CHECK(hist.edges.size() == 25);
        CHECK(hist.edges.back() == 1.0);
        CHECK(std::is_sorted(hist.edges.begin(), hist.edges.end()));
    }
}

TEST_CASE("uniform frequencies occupy a single bin") {
    FrequencyTable freq;
    freq.frame_count = 10;
    freq.frequency.assign(8, 0.0);
    freq.coefficient.assign(8, 1.0);
    for (int pix = 0; pix < 4; ++pix) freq.frequency[pix] = 1.0;  // contour channel
    const FrequencyHistogram hist = compute_histogram(freq, Channel::contour, 10);
    uint64_t occupied = 0;
    for (uint64_t c : hist.counts)
        if (c > 0) ++occupied;
    CHECK(occupied == 1);
    CHECK(std::accumulate(hist.counts.begin(), hist.counts.end(), uint64_t{0}) == 4);
}

TEST_CASE("all-zero frequency table yields an all-zero histogram") {
    FrequencyTable freq;
    freq.frame_count = 10;
    freq.frequency.assign(8, 0.0);
    freq.coefficient.assign(8, 1.0);
    const FrequencyHistogram hist = compute_histogram(freq, Channel::velocity, 5);
    for (uint64_t c : hist.counts) CHECK(c == 0);
    CHECK(hist.zero_frequency_tokens == 4);
}

TEST_CASE("histograms reject fewer than two bins") {
    FrequencyTable freq;
    freq.frequency.assign(8, 0.1);
    CHECK_THROWS_AS(compute_histogram(freq, Channel::contour, 1), ValidationError);
}

TEST_CASE("heatmap of identical frames is the frame itself") {
    BitGrid g(16, 16);
    g.set(3, 4, true);
    g.set(8, 8, true);
    std::vector<SilhouetteSequence> corpus{SilhouetteSequence{{g, g, g}, "same", ""}};
    const FrequencyHeatmap map =
        compute_heatmap(corpus, MapType::silhouette, HeatmapNormalization::raw);
    for (uint32_t r = 0; r < 16; ++r)
        for (uint32_t c = 0; c < 16; ++c)
            CHECK(map.values[r * 16 + c] == (g.get(r, c) ? 1.0 : 0.0));
}

TEST_CASE("heatmap values equal frequency-table entries for the same corpus") {
    const auto corpus = small_corpus(90, 2, 15);
    const VocabularyMap vocab = VocabularyMap::build(2816, 151642, 0);
    const FrequencyTable freq = estimate_frequencies(corpus, vocab, 1e-3);

    const FrequencyHeatmap contour =
        compute_heatmap(corpus, MapType::contour, HeatmapNormalization::raw);
    const FrequencyHeatmap velocity =
        compute_heatmap(corpus, MapType::velocity, HeatmapNormalization::raw);
    for (uint32_t pix = 0; pix < 2816; ++pix) {
        CHECK(contour.values[pix] == freq.frequency[pix]);
        CHECK(velocity.values[pix] == freq.frequency[2816 + pix]);
    }
}

TEST_CASE("contour-range normalization saturates denser maps") {
    // Two frames: a solid block shifted by one column. Interior pixels are
    // active in both frames (f=1) while every contour pixel is active in at
    // most one (f=0.5), so silhouette/contour-range must clamp.
    BitGrid a(16, 16), b(16, 16);
    for (uint32_t r = 4; r < 12; ++r)
        for (uint32_t c = 4; c < 12; ++c) {
            a.set(r, c, true);
            b.set(r, c + 1, true);
        }
    std::vector<SilhouetteSequence> corpus{SilhouetteSequence{{a, b}, "shift", ""}};

    const FrequencyHeatmap own =
        compute_heatmap(corpus, MapType::contour, HeatmapNormalization::contour_range);
    double max_own = 0.0;
    for (double v : own.values) max_own = std::max(max_own, v);
    CHECK(max_own == 1.0);

    const FrequencyHeatmap sil =
        compute_heatmap(corpus, MapType::silhouette, HeatmapNormalization::contour_range);
    const FrequencyHeatmap sil_raw =
        compute_heatmap(corpus, MapType::silhouette, HeatmapNormalization::raw);
    uint64_t clamped = 0;
    for (uint32_t pix = 0; pix < sil.values.size(); ++pix)
        if (sil.values[pix] == 1.0 && sil_raw.values[pix] > 0.5) ++clamped;
    CHECK(clamped > 0);
    for (double v : sil.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("roundtrip report is clean on hole-free corpora") {
    const auto corpus = small_corpus(100, 2, 30);
    const RoundtripReport report = roundtrip_report(corpus, FillMode::exterior);
    CHECK(report.frames == 60);
    CHECK(report.mismatched_frames == 0);
    CHECK(report.mismatched_pixels == 0);
}

TEST_CASE("roundtrip report localizes the donut hole") {
    std::vector<SilhouetteSequence> corpus = small_corpus(110, 1, 10);
    corpus.push_back(donut_sequence());

    const RoundtripReport exterior = roundtrip_report(corpus, FillMode::exterior);
    CHECK(exterior.frames == 11);
    CHECK(exterior.mismatched_frames == 1);
    CHECK(exterior.mismatched_pixels == 64);  // hole area by construction
    CHECK(exterior.worst_sequence == "donut");
    CHECK(exterior.worst_frame == 0);
    CHECK(exterior.worst_pixels == 64);

    const RoundtripReport parity = roundtrip_report(corpus, FillMode::parity);
    CHECK(parity.mismatched_pixels == 0);
    CHECK(parity.mismatched_frames == 0);
}

TEST_CASE("csv and pgm exports are well formed") {
    const auto corpus = small_corpus(120, 1, 10);
    const VocabularyMap vocab = VocabularyMap::build(2816, 151642, 0);
    const FrequencyTable freq = estimate_frequencies(corpus, vocab, 1e-2);

    const FrequencyHistogram hist = compute_histogram(freq, Channel::contour, 6);
    std::ostringstream hist_out;
    write_histogram_csv(hist_out, hist);
    const std::string hist_csv = hist_out.str();
    CHECK(hist_csv.find("bin_low,bin_high,count\n") != std::string::npos);
    // header comment + column header + one line per bin
    CHECK(std::count(hist_csv.begin(), hist_csv.end(), '\n') == 2 + 6);

    const FrequencyHeatmap map =
        compute_heatmap(corpus, MapType::contour, HeatmapNormalization::raw);
    std::ostringstream map_out;
    write_heatmap_csv(map_out, map);
    const std::string map_csv = map_out.str();
    CHECK(std::count(map_csv.begin(), map_csv.end(), '\n') == 64);

    std::ostringstream pgm16;
    write_heatmap_pgm(pgm16, map, 16);
    const std::string bytes = pgm16.str();
    CHECK(bytes.substr(0, 3) == "P5\n");
    CHECK(bytes.find("65535") != std::string::npos);

    std::ostringstream pgm8;
    write_heatmap_pgm(pgm8, map, 8);
    CHECK(pgm8.str().find("255") != std::string::npos);

    std::ostringstream bad;
    CHECK_THROWS_AS(write_heatmap_pgm(bad, map, 12), ValidationError);
}

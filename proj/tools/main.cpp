// siltok: silhouette tokenization toolkit.
//
// Subcommands cover the full pipeline: corpus generation (gen), vocabulary
// and coefficient estimation (vocab-build), token stream export (tokenize),
// density/frequency statistics (stats) and reconstruction verification
// (roundtrip). Every command prints a JSON report that echoes its resolved
// configuration, and all outputs are byte-deterministic for fixed inputs.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "siltok/corpus.hpp"
#include "siltok/silb.hpp"
#include "siltok/stats.hpp"
#include "siltok/tokenstream.hpp"
#include "siltok/vocab.hpp"
#include "siltok/walker.hpp"

using json = nlohmann::ordered_json;
using namespace siltok;

namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("SILTOK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    return 1;
}

void emit(const json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw IoError("cannot write report to " + out_path);
        out << text;
    }
}

FillMode parse_fill_mode(const std::string& name) {
    if (name == "exterior-fill") return FillMode::exterior;
    if (name == "parity-fill") return FillMode::parity;
    throw ValidationError("unknown fill mode '" + name + "' (want exterior-fill or parity-fill)");
}

json roundtrip_json(const RoundtripReport& r) {
    json j;
    j["mode"] = r.mode == FillMode::exterior ? "exterior-fill" : "parity-fill";
    j["frames"] = r.frames;
    j["mismatched_frames"] = r.mismatched_frames;
    j["mismatched_pixels"] = r.mismatched_pixels;
    j["worst"] = {{"sequence", r.worst_sequence},
                  {"frame", r.worst_frame},
                  {"pixels", r.worst_pixels}};
    return j;
}

struct GenOptions {
    std::string out;
    std::string format = "silb";
    uint64_t seed = 1;
    uint32_t sequences = 4;
    WalkerConfig walker;
};

int cmd_gen(const GenOptions& opt) {
    if (opt.format != "silb" && opt.format != "pgm")
        throw ValidationError("unknown corpus format '" + opt.format + "' (want silb or pgm)");
    if (opt.sequences == 0) throw ValidationError("need at least one sequence");

    std::vector<SilhouetteSequence> corpus;
    corpus.reserve(opt.sequences);
    SplitMix64 seed_stream(opt.seed);
    for (uint32_t i = 0; i < opt.sequences; ++i) {
        WalkerConfig cfg = opt.walker;
        cfg.seed = seed_stream.next();
        SilhouetteSequence seq = generate_walker(cfg);
        char label[16];
        std::snprintf(label, sizeof label, "%04u", i + 1);
        seq.label = label;
        corpus.push_back(std::move(seq));
    }
    if (opt.format == "silb")
        write_corpus_silb(opt.out, corpus);
    else
        write_corpus_pgm_tree(opt.out, corpus);

    const DensityReport density = build_density_report(corpus);

    json report;
    report["generated"] = {{"sequences", corpus.size()},
                           {"frames", density.frames},
                           {"measured_density", density.silhouette},
                           {"output", opt.out}};
    report["config"] = {{"command", "gen"},
                        {"out", opt.out},
                        {"format", opt.format},
                        {"seed", opt.seed},
                        {"sequences", opt.sequences},
                        {"frames", opt.walker.frame_count},
                        {"height", opt.walker.height},
                        {"width", opt.walker.width},
                        {"period", opt.walker.period},
                        {"stride", opt.walker.stride_px},
                        {"torso_frac", opt.walker.torso_frac},
                        {"head_frac", opt.walker.head_frac},
                        {"hole_free", opt.walker.hole_free}};
    emit(report, "");
    return 0;
}

struct VocabBuildOptions {
    std::string corpus;
    std::string out;
    uint32_t vocab_size = 151642;
    uint64_t seed = 0;
    double f_min = 0.0; // 0 = auto: 1 / total frames
    unsigned threads = default_threads();
};

int cmd_vocab_build(const VocabBuildOptions& opt) {
    const auto corpus = load_corpus(opt.corpus);
    const auto [height, width] = corpus_dimensions(corpus);
    const uint32_t sl = height * width;

    uint64_t total_frames = 0;
    for (const auto& seq : corpus) total_frames += seq.frames.size();
    const double f_min =
        opt.f_min > 0.0 ? opt.f_min : 1.0 / static_cast<double>(total_frames);

    VocabularyFile file;
    file.height = height;
    file.width = width;
    file.map = VocabularyMap::build(sl, opt.vocab_size, opt.seed);
    file.freq = estimate_frequencies(corpus, file.map, f_min, opt.threads);

    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw IoError("cannot write vocabulary to " + opt.out);
    write_vocabulary_file(out, file);
    out.close();

    json report;
    report["vocabulary"] = {{"S_L", sl},
                            {"N", opt.vocab_size},
                            {"mapped_tokens", file.map.tokens_by_slot().size()},
                            {"frames", total_frames},
                            {"mean_contour_frequency", file.freq.mean_contour_frequency},
                            {"output", opt.out}};
    report["config"] = {{"command", "vocab-build"}, {"corpus", opt.corpus},
                        {"out", opt.out},           {"n", opt.vocab_size},
                        {"seed", opt.seed},         {"f_min", f_min},
                        {"threads", opt.threads}};
    emit(report, "");
    return 0;
}

struct TokenizeOptions {
    std::string corpus;
    std::string vocab;
    std::string out;
    std::string format = "jsonl";
};

int cmd_tokenize(const TokenizeOptions& opt) {
    if (opt.format != "jsonl" && opt.format != "binary")
        throw ValidationError("unknown token format '" + opt.format + "' (want jsonl or binary)");

    std::ifstream vocab_in(opt.vocab, std::ios::binary);
    if (!vocab_in) throw IoError("cannot open vocabulary " + opt.vocab);
    const VocabularyFile vocab = read_vocabulary_file(vocab_in);

    const auto corpus = load_corpus(opt.corpus);
    const auto [height, width] = corpus_dimensions(corpus);
    if (height != vocab.height || width != vocab.width)
        throw ValidationError("corpus frames are " + std::to_string(height) + "x" +
                              std::to_string(width) + " but the vocabulary was built for " +
                              std::to_string(vocab.height) + "x" + std::to_string(vocab.width));

    std::vector<SequenceTokens> stream;
    stream.reserve(corpus.size());
    uint64_t total_tokens = 0;
    uint64_t total_frames = 0;
    for (const auto& seq : corpus) {
        SequenceTokens st;
        st.label = seq.label;
        st.frames = encode_sequence(seq, vocab.map, vocab.freq);
        total_frames += st.frames.size();
        for (const auto& f : st.frames) total_tokens += f.tokens.size();
        stream.push_back(std::move(st));
    }

    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw IoError("cannot write token stream to " + opt.out);
    if (opt.format == "jsonl")
        write_token_stream_jsonl(out, stream);
    else
        write_token_stream_binary(out, stream);
    out.close();

    json report;
    report["tokenized"] = {{"sequences", stream.size()},
                           {"frames", total_frames},
                           {"total_tokens", total_tokens},
                           {"output", opt.out}};
    report["config"] = {{"command", "tokenize"},
                        {"corpus", opt.corpus},
                        {"vocab", opt.vocab},
                        {"out", opt.out},
                        {"format", opt.format}};
    emit(report, "");
    return 0;
}

struct StatsOptions {
    std::string corpus;
    std::string out;
    std::string histogram_prefix;
    std::string heatmap_prefix;
    std::string heatmap_normalization = "contour-range";
    std::string overlay;
    std::string roundtrip_mode = "exterior-fill";
    uint32_t bins = 20;
    unsigned heatmap_bits = 16;
    unsigned threads = default_threads();
    std::vector<std::string> acr_rows;
};

json density_json(const DensityReport& d) {
    json j;
    j["height"] = d.height;
    j["width"] = d.width;
    j["frames"] = d.frames;
    j["sequences"] = d.sequences;
    j["p_silhouette"] = d.silhouette;
    j["p_contour"] = d.contour;
    j["p_velocity"] = d.velocity;
    j["p_velocity_excluding_first"] = d.velocity_excluding_first;
    j["first_frame_velocity_included"] = d.first_frame_velocity_included;
    json rows = json::array();
    for (const auto& s : d.per_sequence)
        rows.push_back({{"label", s.label},
                        {"frames", s.frames},
                        {"p_silhouette", s.silhouette},
                        {"p_contour", s.contour},
                        {"p_velocity", s.velocity}});
    j["per_sequence"] = std::move(rows);
    return j;
}

int cmd_stats(const StatsOptions& opt) {
    const auto corpus = load_corpus(opt.corpus);
    const DensityReport density = build_density_report(corpus, opt.threads);
    const FillMode mode = parse_fill_mode(opt.roundtrip_mode);
    const RoundtripReport roundtrip = roundtrip_report(corpus, mode);

    json acr;
    acr["corpus"] = {{"contour", density.acr_contour}, {"velocity", density.acr_velocity}};
    if (!opt.acr_rows.empty()) {
        std::vector<std::pair<double, double>> contour_pairs, velocity_pairs;
        json rows = json::array();
        for (const std::string& row : opt.acr_rows) {
            double ps = 0, pc = 0, pv = 0;
            char sep1 = 0, sep2 = 0;
            std::istringstream is(row);
            if (!(is >> ps >> sep1 >> pc >> sep2 >> pv) || sep1 != ',' || sep2 != ',')
                throw ValidationError("bad --acr-row '" + row + "' (want P_s,P_c,P_v)");
            contour_pairs.emplace_back(ps, pc);
            velocity_pairs.emplace_back(ps, pv);
            rows.push_back({{"p_silhouette", ps}, {"p_contour", pc}, {"p_velocity", pv}});
        }
        acr["supplied_rows"] = std::move(rows);
        acr["supplied"] = {{"contour", compute_acr(contour_pairs)},
                           {"velocity", compute_acr(velocity_pairs)}};
    }

    if (!opt.histogram_prefix.empty()) {
        // Frequencies only need the identity layout; the histogram is
        // independent of the vocabulary seed.
        const uint32_t sl = density.height * density.width;
        const VocabularyMap vocab =
            VocabularyMap::build(sl, kChannelCount * sl, 0);
        uint64_t frames = density.frames;
        const FrequencyTable freq =
            estimate_frequencies(corpus, vocab, 1.0 / static_cast<double>(frames), opt.threads);
        for (const Channel ch : {Channel::contour, Channel::velocity}) {
            const FrequencyHistogram hist = compute_histogram(freq, ch, opt.bins);
            const std::string path = opt.histogram_prefix + "." + hist.tag + ".csv";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write histogram to " + path);
            write_histogram_csv(out, hist);
        }
        if (!opt.overlay.empty()) {
            std::ifstream in(opt.overlay, std::ios::binary);
            if (!in) throw IoError("cannot open overlay frequency file " + opt.overlay);
            const VocabularyFile overlay = read_vocabulary_file(in);
            const FrequencyHistogram hist =
                compute_histogram(overlay.freq.frequency, opt.bins, "overlay");
            const std::string path = opt.histogram_prefix + ".overlay.csv";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write histogram to " + path);
            write_histogram_csv(out, hist);
        }
    }

    if (!opt.heatmap_prefix.empty()) {
        const HeatmapNormalization norm = opt.heatmap_normalization == "raw"
                                              ? HeatmapNormalization::raw
                                              : HeatmapNormalization::contour_range;
        if (opt.heatmap_normalization != "raw" && opt.heatmap_normalization != "contour-range")
            throw ValidationError("unknown heatmap normalization '" + opt.heatmap_normalization +
                                  "'");
        for (const MapType type :
             {MapType::silhouette, MapType::contour, MapType::velocity}) {
            const FrequencyHeatmap map = compute_heatmap(corpus, type, norm, opt.threads);
            const std::string base = opt.heatmap_prefix + "." + map_type_name(type);
            std::ofstream pgm(base + ".pgm", std::ios::binary);
            if (!pgm) throw IoError("cannot write heatmap to " + base + ".pgm");
            write_heatmap_pgm(pgm, map, opt.heatmap_bits);
            std::ofstream csv(base + ".csv", std::ios::binary);
            if (!csv) throw IoError("cannot write heatmap to " + base + ".csv");
            write_heatmap_csv(csv, map);
        }
    }

    json report;
    report["densities"] = density_json(density);
    report["acr"] = std::move(acr);
    report["roundtrip"] = roundtrip_json(roundtrip);
    report["config"] = {{"command", "stats"},
                        {"corpus", opt.corpus},
                        {"out", opt.out},
                        {"histograms", opt.histogram_prefix},
                        {"heatmaps", opt.heatmap_prefix},
                        {"heatmap_normalization", opt.heatmap_normalization},
                        {"heatmap_bits", opt.heatmap_bits},
                        {"overlay", opt.overlay},
                        {"bins", opt.bins},
                        {"roundtrip_mode", opt.roundtrip_mode},
                        {"acr_rows", opt.acr_rows},
                        {"threads", opt.threads}};
    emit(report, opt.out);
    return 0;
}

struct RoundtripOptions {
    std::string corpus;
    std::string out;
    std::string mode = "exterior-fill";
    uint64_t max_mismatch = 0;
};

int cmd_roundtrip(const RoundtripOptions& opt) {
    const auto corpus = load_corpus(opt.corpus);
    const RoundtripReport result = roundtrip_report(corpus, parse_fill_mode(opt.mode));

    json report;
    report["roundtrip"] = roundtrip_json(result);
    report["roundtrip"]["max_mismatch"] = opt.max_mismatch;
    report["roundtrip"]["passed"] = result.mismatched_pixels <= opt.max_mismatch;
    report["config"] = {{"command", "roundtrip"},
                        {"corpus", opt.corpus},
                        {"mode", opt.mode},
                        {"max_mismatch", opt.max_mismatch},
                        {"out", opt.out}};
    emit(report, opt.out);
    return result.mismatched_pixels <= opt.max_mismatch ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"silhouette tokenization toolkit"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic walker corpus");
    gen_cmd->add_option("--out", gen.out, "output corpus directory")->required();
    gen_cmd->add_option("--format", gen.format, "corpus layout: silb or pgm")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "master seed")->capture_default_str();
    gen_cmd->add_option("--sequences", gen.sequences, "number of sequences")
        ->capture_default_str();
    gen_cmd->add_option("--frames", gen.walker.frame_count, "frames per sequence")
        ->capture_default_str();
    gen_cmd->add_option("--height", gen.walker.height, "frame height in pixels")
        ->capture_default_str();
    gen_cmd->add_option("--width", gen.walker.width, "frame width in pixels")
        ->capture_default_str();
    gen_cmd->add_option("--period", gen.walker.period, "gait cycle length in frames")
        ->capture_default_str();
    gen_cmd->add_option("--stride", gen.walker.stride_px, "ankle swing amplitude in pixels")
        ->capture_default_str();
    gen_cmd->add_option("--torso-frac", gen.walker.torso_frac,
                        "torso length as a fraction of height")
        ->capture_default_str();
    gen_cmd->add_option("--head-frac", gen.walker.head_frac,
                        "head diameter as a fraction of height")
        ->capture_default_str();
    gen_cmd->add_flag(
        "--allow-holes", [&gen](size_t) { gen.walker.hole_free = false; },
        "skip the hole-free guarantee");

    VocabBuildOptions vb;
    CLI::App* vb_cmd =
        app.add_subcommand("vocab-build", "estimate token frequencies and write a vocabulary");
    vb_cmd->add_option("corpus", vb.corpus, "corpus directory")->required();
    vb_cmd->add_option("--out", vb.out, "vocabulary file path")->required();
    vb_cmd->add_option("--n", vb.vocab_size, "vocabulary size N")->capture_default_str();
    vb_cmd->add_option("--seed", vb.seed, "token permutation seed (0 = identity layout)")
        ->capture_default_str();
    vb_cmd->add_option("--f-min", vb.f_min,
                       "frequency floor for coefficients (default: 1/total frames)");
    vb_cmd->add_option("--threads", vb.threads, "worker threads (env SILTOK_THREADS)")
        ->capture_default_str();

    TokenizeOptions tok;
    CLI::App* tok_cmd = app.add_subcommand("tokenize", "encode a corpus into token streams");
    tok_cmd->add_option("corpus", tok.corpus, "corpus directory")->required();
    tok_cmd->add_option("--vocab", tok.vocab, "vocabulary file")->required();
    tok_cmd->add_option("--out", tok.out, "output token stream path")->required();
    tok_cmd->add_option("--format", tok.format, "stream format: jsonl or binary")
        ->capture_default_str();

    StatsOptions st;
    CLI::App* st_cmd = app.add_subcommand("stats", "density, frequency and roundtrip reports");
    st_cmd->add_option("corpus", st.corpus, "corpus directory")->required();
    st_cmd->add_option("--out", st.out, "also write the JSON report to this path");
    st_cmd->add_option("--histograms", st.histogram_prefix,
                       "write <prefix>.contour.csv / <prefix>.velocity.csv");
    st_cmd->add_option("--heatmaps", st.heatmap_prefix,
                       "write <prefix>.<map>.pgm and .csv for all three map types");
    st_cmd->add_option("--heatmap-normalization", st.heatmap_normalization,
                       "raw or contour-range")
        ->capture_default_str();
    st_cmd->add_option("--heatmap-bits", st.heatmap_bits, "heatmap PGM depth: 8 or 16")
        ->capture_default_str();
    st_cmd->add_option("--overlay", st.overlay,
                       "frequency list (vocabulary-file format) to histogram alongside");
    st_cmd->add_option("--bins", st.bins, "histogram bin count")->capture_default_str();
    st_cmd->add_option("--roundtrip-mode", st.roundtrip_mode,
                       "exterior-fill or parity-fill")
        ->capture_default_str();
    st_cmd->add_option("--acr-row", st.acr_rows,
                       "P_s,P_c,P_v density triple; repeat per dataset");
    st_cmd->add_option("--threads", st.threads, "worker threads (env SILTOK_THREADS)")
        ->capture_default_str();

    RoundtripOptions rt;
    CLI::App* rt_cmd =
        app.add_subcommand("roundtrip", "verify contour-to-silhouette reconstruction");
    rt_cmd->add_option("corpus", rt.corpus, "corpus directory")->required();
    rt_cmd->add_option("--mode", rt.mode, "exterior-fill or parity-fill")
        ->capture_default_str();
    rt_cmd->add_option("--max-mismatch", rt.max_mismatch,
                       "mismatched pixels tolerated before failing")
        ->capture_default_str();
    rt_cmd->add_option("--out", rt.out, "also write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (vb_cmd->parsed()) return cmd_vocab_build(vb);
        if (tok_cmd->parsed()) return cmd_tokenize(tok);
        if (st_cmd->parsed()) return cmd_stats(st);
        if (rt_cmd->parsed()) return cmd_roundtrip(rt);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "siltok/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "siltok/format.hpp"

namespace siltok {

VocabularyMap VocabularyMap::build(uint32_t pixels_per_frame, uint32_t vocab_size,
                                   uint64_t seed) {
    if (pixels_per_frame == 0) throw ValidationError("S_L must be positive");
    const uint64_t needed = uint64_t{kChannelCount} * pixels_per_frame;
    if (needed > vocab_size)
        throw ValidationError("vocabulary too small: " + std::to_string(kChannelCount) + "*S_L = " +
                              std::to_string(needed) + " token ids required, but N = " +
                              std::to_string(vocab_size));

    VocabularyMap map;
    map.pixels_per_frame_ = pixels_per_frame;
    map.vocab_size_ = vocab_size;
    map.seed_ = seed;
    map.token_by_slot_.resize(needed);

    if (seed == 0) {
        for (uint64_t slot = 0; slot < needed; ++slot)
            map.token_by_slot_[slot] = static_cast<uint32_t>(slot);
        return map;
    }

    // Partial Fisher-Yates over the virtual array [0, N), tracking only the
    // displaced entries so memory stays O(S_L) for any N.
    SplitMix64 rng(seed);
    std::unordered_map<uint32_t, uint32_t> displaced;
    displaced.reserve(needed * 2);
    auto value_at = [&](uint32_t idx) {
        const auto it = displaced.find(idx);
        return it == displaced.end() ? idx : it->second;
    };
    for (uint32_t i = 0; i < needed; ++i) {
        const uint32_t j = i + static_cast<uint32_t>(rng.next_below(vocab_size - i));
        const uint32_t vi = value_at(i);
        const uint32_t vj = value_at(j);
        map.token_by_slot_[i] = vj;
        displaced[j] = vi;
    }
    return map;
}

namespace {

std::vector<uint64_t> count_slot_activations(std::span<const SilhouetteSequence> sequences,
                                             uint64_t pixels_per_frame) {
    std::vector<uint64_t> counts(kChannelCount * pixels_per_frame, 0);
    for (const auto& seq : sequences) {
        const auto maps = extract_sequence_maps(seq);
        const uint32_t width = seq.frames.front().width();
        for (const auto& [contour, velocity] : maps) {
            contour.grid.for_each_set(
                [&](uint32_t r, uint32_t c) { ++counts[uint64_t{r} * width + c]; });
            velocity.grid.for_each_set([&](uint32_t r, uint32_t c) {
                ++counts[pixels_per_frame + uint64_t{r} * width + c];
            });
        }
    }
    return counts;
}

double mean_of_positive(std::span<const double> values) {
    double sum = 0.0;
    uint64_t n = 0;
    for (double v : values) {
        if (v > 0.0) {
            sum += v;
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

} // namespace

FrequencyTable estimate_frequencies(std::span<const SilhouetteSequence> corpus,
                                    const VocabularyMap& vocab, double f_min,
                                    unsigned threads) {
    if (corpus.empty()) throw ValidationError("cannot estimate frequencies from an empty corpus");
    if (!(f_min > 0.0 && f_min < 1.0))
        throw ValidationError("f_min must lie in (0, 1), got " + format_real17(f_min));

    uint64_t total_frames = 0;
    const uint32_t height = corpus.front().frames.empty() ? 0 : corpus.front().frames[0].height();
    const uint32_t width = corpus.front().frames.empty() ? 0 : corpus.front().frames[0].width();
    for (const auto& seq : corpus) {
        seq.validate();
        if (seq.frames.front().pixel_count() != vocab.pixels_per_frame())
            throw ValidationError("sequence '" + seq.label + "' has " +
                                  std::to_string(seq.frames.front().pixel_count()) +
                                  " pixels per frame, vocabulary expects " +
                                  std::to_string(vocab.pixels_per_frame()));
        if (seq.frames.front().height() != height || seq.frames.front().width() != width)
            throw ValidationError("sequence '" + seq.label +
                                  "' does not match the corpus frame geometry " +
                                  std::to_string(height) + "x" + std::to_string(width));
        total_frames += seq.frames.size();
    }

    const uint64_t sl = vocab.pixels_per_frame();
    std::vector<uint64_t> counts;
    if (threads <= 1 || corpus.size() == 1) {
        counts = count_slot_activations(corpus, sl);
    } else {
        const size_t workers = std::min<size_t>(threads, corpus.size());
        std::vector<std::vector<uint64_t>> partial(workers);
        std::vector<std::thread> pool;
        const size_t per = (corpus.size() + workers - 1) / workers;
        for (size_t w = 0; w < workers; ++w) {
            const size_t begin = std::min(corpus.size(), w * per);
            const size_t end = std::min(corpus.size(), begin + per);
            pool.emplace_back([&, w, begin, end] {
                partial[w] = count_slot_activations(corpus.subspan(begin, end - begin), sl);
            });
        }
        for (auto& t : pool) t.join();
        counts.assign(kChannelCount * sl, 0);
        for (const auto& p : partial)
            for (uint64_t i = 0; i < counts.size(); ++i) counts[i] += p[i];
    }

    FrequencyTable table;
    table.frame_count = total_frames;
    table.f_min = f_min;
    table.frequency.resize(counts.size());
    for (uint64_t i = 0; i < counts.size(); ++i)
        table.frequency[i] = static_cast<double>(counts[i]) / static_cast<double>(total_frames);

    const std::span<const double> freqs(table.frequency);
    table.mean_contour_frequency = mean_of_positive(freqs.subspan(0, sl));
    table.mean_velocity_frequency = mean_of_positive(freqs.subspan(sl, sl));

    table.coefficient.resize(counts.size());
    for (uint64_t i = 0; i < counts.size(); ++i)
        table.coefficient[i] = table.mean_contour_frequency / std::max(table.frequency[i], f_min);
    return table;
}

TokenFrame encode_frame(const ContourMap& contour, const VelocityMap& velocity,
                        const VocabularyMap& vocab, const FrequencyTable& freq,
                        uint32_t frame_index) {
    if (!contour.grid.same_dimensions(velocity.grid))
        throw ValidationError("contour and velocity maps differ in size");
    if (contour.grid.pixel_count() != vocab.pixels_per_frame())
        throw ValidationError("frame has " + std::to_string(contour.grid.pixel_count()) +
                              " pixels, vocabulary expects " +
                              std::to_string(vocab.pixels_per_frame()));
    if (freq.frequency.size() != vocab.tokens_by_slot().size() ||
        freq.coefficient.size() != freq.frequency.size())
        throw ValidationError("frequency table does not match vocabulary layout");

    const uint32_t width = contour.grid.width();
    const uint32_t sl = vocab.pixels_per_frame();
    const auto tokens = vocab.tokens_by_slot();

    std::vector<std::pair<uint32_t, double>> entries;
    entries.reserve(contour.grid.popcount() + velocity.grid.popcount());
    contour.grid.for_each_set([&](uint32_t r, uint32_t c) {
        const uint32_t slot = r * width + c;
        entries.emplace_back(tokens[slot], freq.coefficient[slot]);
    });
    velocity.grid.for_each_set([&](uint32_t r, uint32_t c) {
        const uint32_t slot = sl + r * width + c;
        entries.emplace_back(tokens[slot], freq.coefficient[slot]);
    });
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    TokenFrame out;
    out.frame_index = frame_index;
    out.tokens.reserve(entries.size());
    out.weights.reserve(entries.size());
    for (const auto& [token, weight] : entries) {
        out.tokens.push_back(token);
        out.weights.push_back(weight);
    }
    return out;
}

std::vector<TokenFrame> encode_sequence(const SilhouetteSequence& seq,
                                        const VocabularyMap& vocab,
                                        const FrequencyTable& freq) {
    const auto maps = extract_sequence_maps(seq);
    std::vector<TokenFrame> out;
    out.reserve(maps.size());
    for (size_t t = 0; t < maps.size(); ++t)
        out.push_back(encode_frame(maps[t].first, maps[t].second, vocab, freq,
                                   static_cast<uint32_t>(t)));
    return out;
}

std::vector<double> project_frame(const TokenFrame& frame, const ProjectionStub& stub,
                                  uint32_t vocab_size) {
    std::vector<double> acc(stub.dimension, 0.0);
    if (frame.tokens.empty()) return acc;
    if (frame.tokens.size() != frame.weights.size())
        throw ValidationError("token frame has mismatched token/weight lengths");

    for (size_t i = 0; i < frame.tokens.size(); ++i) {
        const uint32_t token = frame.tokens[i];
        if (token >= vocab_size)
            throw ValidationError("token id " + std::to_string(token) +
                                  " outside vocabulary of size " + std::to_string(vocab_size));
        const double w = frame.weights[i];
        for (uint32_t d = 0; d < stub.dimension; ++d) acc[d] += w * stub.value(token, d);
    }
    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : acc) v *= inv;
    }
    return acc;
}

namespace {

void write_sparse_real_array(std::ostream& out, std::span<const uint32_t> tokens_by_slot,
                             std::span<const double> values) {
    // Pairs sorted by token id so the layout is independent of slot order.
    std::vector<std::pair<uint32_t, double>> pairs(tokens_by_slot.size());
    for (size_t slot = 0; slot < tokens_by_slot.size(); ++slot)
        pairs[slot] = {tokens_by_slot[slot], values[slot]};
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out << '[';
    for (size_t i = 0; i < pairs.size(); ++i) {
        if (i != 0) out << ',';
        out << '[' << pairs[i].first << ',' << format_real17(pairs[i].second) << ']';
    }
    out << ']';
}

} // namespace

void write_vocabulary_file(std::ostream& out, const VocabularyFile& file) {
    const auto& map = file.map;
    const auto& freq = file.freq;
    if (freq.frequency.size() != map.tokens_by_slot().size())
        throw ValidationError("frequency table does not match vocabulary layout");

    out << "{\n";
    out << "  \"version\": 1,\n";
    out << "  \"S_L\": " << map.pixels_per_frame() << ",\n";
    out << "  \"height\": " << file.height << ",\n";
    out << "  \"width\": " << file.width << ",\n";
    out << "  \"N\": " << map.vocab_size() << ",\n";
    out << "  \"seed\": " << map.seed() << ",\n";
    out << "  \"channel_offsets\": [0," << map.pixels_per_frame() << "],\n";
    out << "  \"frequencies\": ";
    write_sparse_real_array(out, map.tokens_by_slot(), freq.frequency);
    out << ",\n";
    out << "  \"coefficients\": ";
    write_sparse_real_array(out, map.tokens_by_slot(), freq.coefficient);
    out << ",\n";
    out << "  \"f_min\": " << format_real17(freq.f_min) << ",\n";
    out << "  \"mean_contour_frequency\": " << format_real17(freq.mean_contour_frequency)
        << "\n";
    out << "}\n";
}

VocabularyFile read_vocabulary_file(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("vocabulary file is not valid JSON: ") + e.what());
    }

    auto require = [&](const char* key) -> const nlohmann::json& {
        const auto it = doc.find(key);
        if (it == doc.end())
            throw ValidationError(std::string("vocabulary file is missing key '") + key + "'");
        return *it;
    };

    if (require("version").get<int>() != 1)
        throw ValidationError("unsupported vocabulary file version " +
                              require("version").dump());

    VocabularyFile file;
    const uint32_t sl = require("S_L").get<uint32_t>();
    file.height = require("height").get<uint32_t>();
    file.width = require("width").get<uint32_t>();
    if (uint64_t{file.height} * file.width != sl)
        throw ValidationError("vocabulary file S_L=" + std::to_string(sl) +
                              " does not equal height*width=" +
                              std::to_string(uint64_t{file.height} * file.width));
    const uint32_t n = require("N").get<uint32_t>();
    const uint64_t seed = require("seed").get<uint64_t>();

    const auto& offsets = require("channel_offsets");
    if (!offsets.is_array() || offsets.size() != kChannelCount ||
        offsets[0].get<uint32_t>() != 0 || offsets[1].get<uint32_t>() != sl)
        throw ValidationError("vocabulary file has unexpected channel_offsets: " +
                              offsets.dump());

    file.map = VocabularyMap::build(sl, n, seed);

    std::unordered_map<uint32_t, uint32_t> slot_of_token;
    slot_of_token.reserve(file.map.tokens_by_slot().size() * 2);
    for (uint32_t slot = 0; slot < file.map.tokens_by_slot().size(); ++slot)
        slot_of_token.emplace(file.map.tokens_by_slot()[slot], slot);

    auto read_sparse = [&](const nlohmann::json& arr, const char* key) {
        std::vector<double> values(file.map.tokens_by_slot().size(), 0.0);
        if (!arr.is_array() || arr.size() != values.size())
            throw ValidationError(std::string("vocabulary file key '") + key + "' must list " +
                                  std::to_string(values.size()) + " [token, value] pairs");
        for (const auto& pair : arr) {
            if (!pair.is_array() || pair.size() != 2)
                throw ValidationError(std::string("malformed entry in '") + key +
                                      "': " + pair.dump());
            const uint32_t token = pair[0].get<uint32_t>();
            const auto it = slot_of_token.find(token);
            if (it == slot_of_token.end())
                throw ValidationError("token id " + std::to_string(token) + " in '" + key +
                                      "' is not produced by (S_L, N, seed)");
            values[it->second] = pair[1].get<double>();
        }
        return values;
    };

    file.freq.frequency = read_sparse(require("frequencies"), "frequencies");
    file.freq.coefficient = read_sparse(require("coefficients"), "coefficients");
    file.freq.f_min = require("f_min").get<double>();
    file.freq.mean_contour_frequency = require("mean_contour_frequency").get<double>();
    file.freq.mean_velocity_frequency =
        mean_of_positive(std::span<const double>(file.freq.frequency).subspan(sl, sl));
    file.freq.frame_count = 0;  // not persisted in the file format
    return file;
}

} // namespace siltok

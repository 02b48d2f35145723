#include "siltok/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "siltok/pgm.hpp"
#include "siltok/silb.hpp"

namespace siltok {

namespace fs = std::filesystem;

namespace {

bool parse_numeric_stem(const std::string& stem, uint64_t& value) {
    if (stem.empty()) return false;
    value = 0;
    for (const char c : stem) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        value = value * 10 + static_cast<uint64_t>(c - '0');
        if (value > 0xFFFFFFFFull) return false;
    }
    return true;
}

SilhouetteSequence load_pgm_sequence(const fs::path& dir) {
    struct FrameFile {
        uint64_t number;
        fs::path path;
    };
    std::vector<FrameFile> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const fs::path& p = entry.path();
        if (!entry.is_regular_file())
            throw ValidationError("corpus: unexpected entry in sequence directory: " +
                                  p.string());
        if (p.extension() != ".pgm")
            throw ValidationError("corpus: non-PGM file in sequence directory: " + p.string());
        uint64_t number = 0;
        if (!parse_numeric_stem(p.stem().string(), number))
            throw ValidationError("corpus: frame filename is not numeric: " + p.string());
        files.push_back({number, p});
    }
    if (files.empty())
        throw ValidationError("corpus: sequence directory has no frames: " + dir.string());
    std::sort(files.begin(), files.end(), [](const FrameFile& a, const FrameFile& b) {
        return a.number < b.number;
    });
    for (size_t i = 1; i < files.size(); ++i)
        if (files[i].number == files[i - 1].number)
            throw ValidationError("corpus: duplicate frame number in " + dir.string() + ": " +
                                  files[i - 1].path.filename().string() + " vs " +
                                  files[i].path.filename().string());

    SilhouetteSequence seq;
    seq.label = dir.filename().string();
    seq.source = dir.string();
    seq.frames.reserve(files.size());
    for (const auto& f : files) {
        std::ifstream in(f.path, std::ios::binary);
        if (!in) throw IoError("corpus: cannot open " + f.path.string());
        try {
            seq.frames.push_back(read_pgm(in));
        } catch (const ValidationError& e) {
            throw ValidationError(f.path.string() + ": " + e.what());
        }
        if (seq.frames.back().height() != seq.frames.front().height() ||
            seq.frames.back().width() != seq.frames.front().width())
            throw ValidationError("corpus: " + f.path.string() + " is " +
                                  std::to_string(seq.frames.back().height()) + "x" +
                                  std::to_string(seq.frames.back().width()) +
                                  " but the sequence started with " +
                                  std::to_string(seq.frames.front().height()) + "x" +
                                  std::to_string(seq.frames.front().width()));
    }
    return seq;
}

} // namespace

std::vector<SilhouetteSequence> load_corpus(const fs::path& root) {
    if (!fs::exists(root)) throw IoError("corpus: path does not exist: " + root.string());
    if (!fs::is_directory(root)) throw IoError("corpus: not a directory: " + root.string());

    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(root)) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<SilhouetteSequence> corpus;
    for (const fs::path& p : entries) {
        if (fs::is_directory(p)) {
            corpus.push_back(load_pgm_sequence(p));
        } else if (p.extension() == ".silb") {
            std::ifstream in(p, std::ios::binary);
            if (!in) throw IoError("corpus: cannot open " + p.string());
            try {
                corpus.push_back(read_packed(in, p.stem().string(), p.string()));
            } catch (const ValidationError& e) {
                throw ValidationError(p.string() + ": " + e.what());
            }
        } else {
            throw ValidationError("corpus: unexpected entry (want a directory or *.silb): " +
                                  p.string());
        }
    }
    if (corpus.empty()) throw ValidationError("corpus: no sequences under " + root.string());
    return corpus;
}

void write_corpus_pgm_tree(const fs::path& root, std::span<const SilhouetteSequence> corpus) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("corpus: cannot create " + root.string() + ": " + ec.message());
    for (const auto& seq : corpus) {
        seq.validate();
        const fs::path dir = root / seq.label;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("corpus: cannot create " + dir.string() + ": " + ec.message());
        for (size_t i = 0; i < seq.frames.size(); ++i) {
            char name[16];
            std::snprintf(name, sizeof name, "%03zu.pgm", i + 1);
            const fs::path file = dir / name;
            std::ofstream out(file, std::ios::binary);
            if (!out) throw IoError("corpus: cannot write " + file.string());
            write_pgm(out, seq.frames[i]);
        }
    }
}

void write_corpus_silb(const fs::path& root, std::span<const SilhouetteSequence> corpus) {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("corpus: cannot create " + root.string() + ": " + ec.message());
    for (const auto& seq : corpus) {
        const fs::path file = root / (seq.label + ".silb");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw IoError("corpus: cannot write " + file.string());
        write_packed(out, seq);
    }
}

std::pair<uint32_t, uint32_t> corpus_dimensions(std::span<const SilhouetteSequence> corpus) {
    if (corpus.empty()) throw ValidationError("corpus is empty");
    corpus.front().validate();
    const uint32_t h = corpus.front().frames.front().height();
    const uint32_t w = corpus.front().frames.front().width();
    for (const auto& seq : corpus) {
        seq.validate();
        if (seq.frames.front().height() != h || seq.frames.front().width() != w)
            throw ValidationError("corpus mixes frame sizes: sequence '" + seq.label + "' is " +
                                  std::to_string(seq.frames.front().height()) + "x" +
                                  std::to_string(seq.frames.front().width()) + ", expected " +
                                  std::to_string(h) + "x" + std::to_string(w));
    }
    return {h, w};
}

} // namespace siltok

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "siltok/corpus.hpp"
#include "siltok/pgm.hpp"
#include "siltok/silb.hpp"
#include "siltok/tokenstream.hpp"

using namespace siltok;
namespace fs = std::filesystem;

namespace {

BitGrid parse_pgm(const std::string& bytes) {
    std::istringstream in(bytes);
    return read_pgm(in);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("siltok-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

} // namespace

TEST_CASE("P5 thresholds samples against maxval/2") {
    const std::string bytes = std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\xff' + '\x00';
    const BitGrid g = parse_pgm(bytes);
    CHECK_FALSE(g.get(0, 0));
    CHECK(g.get(0, 1));
    CHECK(g.get(1, 0));
    CHECK_FALSE(g.get(1, 1));
}

TEST_CASE("P2 parses to the same grid as P5") {
    const std::string p5 = std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\xff' + '\x00';
    const std::string p2 = "P2\n# comment line\n2 2\n255\n0 255\n255 0\n";
    CHECK(parse_pgm(p2) == parse_pgm(p5));
}

TEST_CASE("16-bit samples use big-endian byte order") {
    // 0x8000 = 32768 > 65535/2; 0x7fff = 32767 is background
    std::string bytes = "P5\n2 1\n65535\n";
    bytes += '\x80';
    bytes += '\x00';
    bytes += '\x7f';
    bytes += '\xff';
    const BitGrid g = parse_pgm(bytes);
    CHECK(g.get(0, 0));
    CHECK_FALSE(g.get(0, 1));
}

TEST_CASE("truncated P5 payload names expected and actual byte counts") {
    const std::string bytes = std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\xff';
    CHECK_THROWS_WITH_AS(parse_pgm(bytes), doctest::Contains("expected 4 bytes, got 3"),
                         ValidationError);
}

TEST_CASE("malformed PGM headers are rejected") {
    CHECK_THROWS_WITH_AS(parse_pgm("P6\n2 2\n255\n...."), doctest::Contains("P6"),
                         ValidationError);
    CHECK_THROWS_AS(parse_pgm(""), ValidationError);
    CHECK_THROWS_WITH_AS(parse_pgm("P5\n2 2\n65536\n"), doctest::Contains("maxval"),
                         ValidationError);
    CHECK_THROWS_AS(parse_pgm("P5\n0 2\n255\n"), ValidationError);
    CHECK_THROWS_AS(parse_pgm("P5\n2 x\n255\n"), ValidationError);
    CHECK_THROWS_AS(parse_pgm("P2\n2 2\n255\n0 0 0"), ValidationError);  // missing sample
    CHECK_THROWS_WITH_AS(parse_pgm("P2\n1 1\n10\n11"), doctest::Contains("exceeds maxval"),
                         ValidationError);
}

TEST_CASE("PGM write/read round trip on random grids") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const uint32_t h = 1 + rng() % 70;
        const uint32_t w = 1 + rng() % 70;
        const BitGrid g = oracle::random_grid(rng, h, w, 0.4);
        std::ostringstream out;
        write_pgm(out, g);
        CHECK(parse_pgm(out.str()) == g);
    }
}

TEST_CASE("SILB round trip is bit-exact and re-encode is byte-identical") {
    std::mt19937_64 rng(32);
    SilhouetteSequence seq;
    seq.label = "roundtrip";
    for (int t = 0; t < 30; ++t) seq.frames.push_back(oracle::random_grid(rng, 64, 44, 0.25));

    std::ostringstream first;
    write_packed(first, seq);
    std::istringstream in(first.str());
    const SilhouetteSequence loaded = read_packed(in, seq.label);
    REQUIRE(loaded.frames.size() == seq.frames.size());
    for (size_t t = 0; t < seq.frames.size(); ++t) CHECK(loaded.frames[t] == seq.frames[t]);

    std::ostringstream second;
    write_packed(second, loaded);
    CHECK(first.str() == second.str());

    // payload length invariant: header is 13 bytes, rows pad to whole bytes
    CHECK(first.str().size() == 13 + 30ull * 64 * ((44 + 7) / 8));
}

TEST_CASE("SILB rejects malformed input") {
    auto reject = [](std::string bytes, const char* needle) {
        std::istringstream in(bytes);
        CHECK_THROWS_WITH_AS(read_packed(in), doctest::Contains(needle), ValidationError);
    };
    reject("SILX", "magic");
    reject(std::string("SILB") + '\x02', "version");
    {
        // valid header for 1 frame of 2x2 but a short payload
        std::string bytes("SILB");
        bytes += '\x01';
        bytes += std::string("\x02\x00\x02\x00", 4);
        bytes += std::string("\x01\x00\x00\x00", 4);
        bytes += '\xC0';  // one row instead of two
        reject(bytes, "truncated payload");
    }
    {
        std::string bytes("SILB");
        bytes += '\x01';
        bytes += std::string("\x02\x00\x02\x00", 4);
        bytes += std::string("\x00\x00\x00\x00", 4);  // zero frames
        reject(bytes, "no frames");
    }
    {
        std::string bytes("SILB");
        bytes += '\x01';
        bytes += std::string("\x01\x00\x01\x00", 4);
        bytes += std::string("\x01\x00\x00\x00", 4);
        bytes += '\x80';
        bytes += "extra";
        reject(bytes, "trailing bytes");
    }
}

TEST_CASE("SILB write rejects invalid sequences") {
    std::ostringstream out;
    SilhouetteSequence empty{{}, "e", ""};
    CHECK_THROWS_AS(write_packed(out, empty), ValidationError);

    SilhouetteSequence wide{{BitGrid(2, 70000)}, "w", ""};
    CHECK_THROWS_WITH_AS(write_packed(out, wide), doctest::Contains("16-bit"), ValidationError);
}

TEST_CASE("MSB-first bit packing in SILB payload") {
    BitGrid g(1, 9);
    g.set(0, 0, true);
    g.set(0, 8, true);
    SilhouetteSequence seq{{g}, "bits", ""};
    std::ostringstream out;
    write_packed(out, seq);
    const std::string bytes = out.str();
    REQUIRE(bytes.size() == 13 + 2);
    CHECK(static_cast<uint8_t>(bytes[13]) == 0x80);  // col 0 -> bit 7 of byte 0
    CHECK(static_cast<uint8_t>(bytes[14]) == 0x80);  // col 8 -> bit 7 of byte 1
}

TEST_CASE("corpus loading orders sequences and frames correctly") {
    TempDir tmp("corpus-order");
    BitGrid a(8, 8), b(8, 8);
    a.set(1, 1, true);
    b.set(2, 2, true);

    // frames 2.pgm and 10.pgm: numeric order, not lexicographic
    fs::create_directories(tmp.path / "walk");
    {
        std::ofstream f2(tmp.path / "walk" / "2.pgm", std::ios::binary);
        write_pgm(f2, a);
        std::ofstream f10(tmp.path / "walk" / "10.pgm", std::ios::binary);
        write_pgm(f10, b);
    }
    // a packed sequence ordered before "walk"
    SilhouetteSequence packed{{b, b}, "apack", ""};
    {
        std::ofstream out(tmp.path / "apack.silb", std::ios::binary);
        write_packed(out, packed);
    }

    const auto corpus = load_corpus(tmp.path);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].label == "apack");
    CHECK(corpus[1].label == "walk");
    REQUIRE(corpus[1].frames.size() == 2);
    CHECK(corpus[1].frames[0] == a);   // 2.pgm first
    CHECK(corpus[1].frames[1] == b);   // 10.pgm second
    CHECK(corpus[1].source == (tmp.path / "walk").string());
}

TEST_CASE("corpus loading rejects broken layouts by path") {
    TempDir tmp("corpus-bad");

    SUBCASE("mixed dimensions within a sequence") {
        fs::create_directories(tmp.path / "seq");
        {
            std::ofstream f1(tmp.path / "seq" / "1.pgm", std::ios::binary);
            write_pgm(f1, BitGrid(64, 44));
            std::ofstream f2(tmp.path / "seq" / "2.pgm", std::ios::binary);
            write_pgm(f2, BitGrid(64, 32));
        }
        CHECK_THROWS_WITH_AS(load_corpus(tmp.path), doctest::Contains("2.pgm"),
                             ValidationError);
    }
    SUBCASE("non-numeric frame name") {
        fs::create_directories(tmp.path / "seq");
        write_file(tmp.path / "seq" / "frame.pgm", "P5\n1 1\n255\n\xff");
        CHECK_THROWS_WITH_AS(load_corpus(tmp.path), doctest::Contains("frame.pgm"),
                             ValidationError);
    }
    SUBCASE("stray file in corpus root") {
        write_file(tmp.path / "notes.txt", "hello");
        CHECK_THROWS_WITH_AS(load_corpus(tmp.path), doctest::Contains("notes.txt"),
                             ValidationError);
    }
    SUBCASE("corrupt pgm names the file") {
        fs::create_directories(tmp.path / "seq");
        write_file(tmp.path / "seq" / "1.pgm", "P5\n4 4\n255\nxx");
        CHECK_THROWS_WITH_AS(load_corpus(tmp.path), doctest::Contains("1.pgm"),
                             ValidationError);
    }
    SUBCASE("empty sequence directory") {
        fs::create_directories(tmp.path / "seq");
        CHECK_THROWS_WITH_AS(load_corpus(tmp.path), doctest::Contains("no frames"),
                             ValidationError);
    }
    SUBCASE("missing corpus directory") {
        CHECK_THROWS_AS(load_corpus(tmp.path / "nope"), IoError);
    }
}

TEST_CASE("corpus writers round trip through load_corpus") {
    TempDir tmp("corpus-rt");
    std::mt19937_64 rng(44);
    std::vector<SilhouetteSequence> corpus;
    for (int s = 0; s < 3; ++s) {
        SilhouetteSequence seq;
        seq.label = "s" + std::to_string(s);
        for (int t = 0; t < 5; ++t) seq.frames.push_back(oracle::random_grid(rng, 32, 22, 0.3));
        corpus.push_back(std::move(seq));
    }

    write_corpus_pgm_tree(tmp.path / "pgm", corpus);
    const auto from_pgm = load_corpus(tmp.path / "pgm");
    REQUIRE(from_pgm.size() == corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s) {
        CHECK(from_pgm[s].label == corpus[s].label);
        CHECK(from_pgm[s].frames == corpus[s].frames);
    }

    write_corpus_silb(tmp.path / "silb", corpus);
    const auto from_silb = load_corpus(tmp.path / "silb");
    REQUIRE(from_silb.size() == corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s)
        CHECK(from_silb[s].frames == corpus[s].frames);
}

TEST_CASE("binary token stream round trips") {
    std::vector<SequenceTokens> stream(2);
    stream[0].label = "alpha";
    stream[0].frames.resize(2);
    stream[0].frames[0].frame_index = 0;
    stream[0].frames[0].tokens = {3, 17, 2816};
    stream[0].frames[0].weights = {0.5, 1.25, 3.0};
    stream[0].frames[1].frame_index = 1;
    stream[1].label = "beta \"quoted\"";
    stream[1].frames.resize(1);
    stream[1].frames[0].tokens = {9};
    stream[1].frames[0].weights = {0.125};

    std::ostringstream out;
    write_token_stream_binary(out, stream);
    std::istringstream in(out.str());
    const auto loaded = read_token_stream_binary(in);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].label == "alpha");
    CHECK(loaded[0].frames[0].tokens == stream[0].frames[0].tokens);
    CHECK(loaded[0].frames[0].weights == stream[0].frames[0].weights);
    CHECK(loaded[1].label == stream[1].label);
    CHECK(loaded[1].frames[0].tokens == stream[1].frames[0].tokens);

    std::istringstream bad("STOKx");
    CHECK_THROWS_AS(read_token_stream_binary(bad), ValidationError);
}

TEST_CASE("JSONL escapes labels and lists frames in order") {
    std::vector<SequenceTokens> stream(1);
    stream[0].label = "a\"b\\c";
    stream[0].frames.resize(1);
    stream[0].frames[0].tokens = {1, 2};
    stream[0].frames[0].weights = {0.5, 0.25};
    std::ostringstream out;
    write_token_stream_jsonl(out, stream);
    CHECK(out.str() ==
          "{\"seq\":\"a\\\"b\\\\c\",\"t\":0,\"tokens\":[1,2],\"weights\":[0.5,0.25]}\n");
}

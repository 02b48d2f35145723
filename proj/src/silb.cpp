#include "siltok/silb.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <vector>

namespace siltok {

namespace {

constexpr char kMagic[4] = {'S', 'I', 'L', 'B'};
constexpr uint8_t kVersion = 1;

uint64_t read_le(std::istream& in, unsigned bytes, const char* what) {
    uint64_t value = 0;
    for (unsigned i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == EOF)
            throw ValidationError(std::string("silb: truncated header while reading ") + what);
        value |= uint64_t{static_cast<uint8_t>(c)} << (8 * i);
    }
    return value;
}

void write_le(std::ostream& out, uint64_t value, unsigned bytes) {
    for (unsigned i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
}

} // namespace

SilhouetteSequence read_packed(std::istream& in, std::string label, std::string source) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || magic[0] != kMagic[0] || magic[1] != kMagic[1] ||
        magic[2] != kMagic[2] || magic[3] != kMagic[3])
        throw ValidationError("silb: bad magic, not a packed corpus file");
    const auto version = static_cast<uint8_t>(read_le(in, 1, "version"));
    if (version != kVersion)
        throw ValidationError("silb: unsupported version " + std::to_string(version));
    const auto height = static_cast<uint32_t>(read_le(in, 2, "height"));
    const auto width = static_cast<uint32_t>(read_le(in, 2, "width"));
    const auto frame_count = static_cast<uint32_t>(read_le(in, 4, "frame count"));
    if (height == 0 || width == 0)
        throw ValidationError("silb: dimensions must be positive, got " + std::to_string(height) +
                              "x" + std::to_string(width));
    if (frame_count == 0) throw ValidationError("silb: sequence has no frames");

    const uint64_t row_bytes = (width + 7) / 8;
    const uint64_t payload = uint64_t{frame_count} * height * row_bytes;
    std::vector<char> buf(payload);
    in.read(buf.data(), static_cast<std::streamsize>(payload));
    const auto got = static_cast<uint64_t>(in.gcount());
    if (got != payload)
        throw ValidationError("silb: truncated payload, expected " + std::to_string(payload) +
                              " bytes, got " + std::to_string(got));
    if (in.get() != EOF)
        throw ValidationError("silb: trailing bytes after payload");

    SilhouetteSequence seq;
    seq.label = std::move(label);
    seq.source = std::move(source);
    seq.frames.reserve(frame_count);
    const char* p = buf.data();
    for (uint32_t f = 0; f < frame_count; ++f) {
        BitGrid grid(height, width);
        for (uint32_t r = 0; r < height; ++r) {
            for (uint64_t b = 0; b < row_bytes; ++b) {
                const auto byte = static_cast<uint8_t>(*p++);
                if (byte == 0) continue;
                const uint32_t base = static_cast<uint32_t>(b * 8);
                for (uint32_t k = 0; k < 8 && base + k < width; ++k)
                    if (byte & (0x80u >> k)) grid.set(r, base + k, true);
            }
        }
        seq.frames.push_back(std::move(grid));
    }
    return seq;
}

void write_packed(std::ostream& out, const SilhouetteSequence& seq) {
    seq.validate();
    const uint32_t height = seq.frames.front().height();
    const uint32_t width = seq.frames.front().width();
    if (height > 65535 || width > 65535)
        throw ValidationError("silb: dimensions " + std::to_string(height) + "x" +
                              std::to_string(width) + " overflow the 16-bit header fields");
    if (seq.frames.size() > 0xFFFFFFFFull)
        throw ValidationError("silb: frame count overflows the 32-bit header field");

    out.write(kMagic, 4);
    write_le(out, kVersion, 1);
    write_le(out, height, 2);
    write_le(out, width, 2);
    write_le(out, seq.frames.size(), 4);

    const uint64_t row_bytes = (width + 7) / 8;
    std::vector<char> row(row_bytes);
    for (const BitGrid& grid : seq.frames) {
        for (uint32_t r = 0; r < height; ++r) {
            std::fill(row.begin(), row.end(), 0);
            for (uint32_t c = 0; c < width; ++c)
                if (grid.get(r, c)) row[c / 8] |= static_cast<char>(0x80u >> (c % 8));
            out.write(row.data(), static_cast<std::streamsize>(row_bytes));
        }
    }
    if (!out) throw IoError("silb: stream write failed");
}

} // namespace siltok

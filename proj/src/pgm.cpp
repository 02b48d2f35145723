#include "siltok/pgm.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace siltok {

namespace {

// Header scanner that tracks the byte offset for diagnostics.
class HeaderReader {
public:
    explicit HeaderReader(std::istream& in) : in_(in) {}

    uint64_t offset() const { return offset_; }

    int get() {
        const int c = in_.get();
        if (c != EOF) ++offset_;
        return c;
    }

    void skip_separators() {
        for (;;) {
            const int c = in_.peek();
            if (c == '#') {
                while (in_.peek() != EOF && in_.peek() != '\n') get();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else {
                return;
            }
        }
    }

    uint64_t read_uint(const char* what, uint64_t max) {
        skip_separators();
        const uint64_t start = offset_;
        if (in_.peek() == EOF)
            throw ValidationError(std::string("pgm: missing ") + what + " at byte " +
                                  std::to_string(start));
        uint64_t value = 0;
        bool any = false;
        while (in_.peek() >= '0' && in_.peek() <= '9') {
            value = value * 10 + static_cast<uint64_t>(get() - '0');
            any = true;
            if (value > max)
                throw ValidationError(std::string("pgm: ") + what + " at byte " +
                                      std::to_string(start) + " exceeds maximum " +
                                      std::to_string(max));
        }
        if (!any)
            throw ValidationError(std::string("pgm: invalid ") + what + " at byte " +
                                  std::to_string(start) + " (expected digits, got '" +
                                  static_cast<char>(in_.peek()) + "')");
        return value;
    }

private:
    std::istream& in_;
    uint64_t offset_ = 0;
};

} // namespace

BitGrid read_pgm(std::istream& in) {
    HeaderReader header(in);
    const int m0 = header.get();
    const int m1 = header.get();
    if (m0 != 'P' || (m1 != '2' && m1 != '5')) {
        std::string magic;
        if (m0 != EOF) magic += static_cast<char>(m0);
        if (m1 != EOF) magic += static_cast<char>(m1);
        throw ValidationError("pgm: unsupported magic '" + magic + "' (want P2 or P5)");
    }
    const bool binary = m1 == '5';

    const auto width = static_cast<uint32_t>(header.read_uint("width", 1u << 20));
    const auto height = static_cast<uint32_t>(header.read_uint("height", 1u << 20));
    const auto maxval = header.read_uint("maxval", std::numeric_limits<uint64_t>::max());
    if (width == 0 || height == 0)
        throw ValidationError("pgm: dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    if (maxval == 0 || maxval > 65535)
        throw ValidationError("pgm: maxval must be in [1, 65535], got " + std::to_string(maxval));

    BitGrid grid(height, width);
    const uint64_t samples = uint64_t{height} * width;

    if (binary) {
        // Exactly one separator byte between maxval and the raster.
        const int sep = header.get();
        if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
            throw ValidationError("pgm: expected single whitespace after maxval at byte " +
                                  std::to_string(header.offset() - 1));
        const unsigned bytes_per_sample = maxval > 255 ? 2 : 1;
        std::vector<char> payload(samples * bytes_per_sample);
        in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
        const auto got = static_cast<uint64_t>(in.gcount());
        if (got != payload.size())
            throw ValidationError("pgm: truncated payload, expected " +
                                  std::to_string(payload.size()) + " bytes, got " +
                                  std::to_string(got));
        for (uint64_t i = 0; i < samples; ++i) {
            uint64_t v = static_cast<uint8_t>(payload[i * bytes_per_sample]);
            if (bytes_per_sample == 2)
                v = (v << 8) | static_cast<uint8_t>(payload[i * 2 + 1]);
            if (2 * v > maxval)
                grid.set(static_cast<uint32_t>(i / width), static_cast<uint32_t>(i % width),
                         true);
        }
    } else {
        for (uint64_t i = 0; i < samples; ++i) {
            const uint64_t v = header.read_uint("sample", 65535);
            if (v > maxval)
                throw ValidationError("pgm: sample " + std::to_string(v) + " at byte " +
                                      std::to_string(header.offset()) + " exceeds maxval " +
                                      std::to_string(maxval));
            if (2 * v > maxval)
                grid.set(static_cast<uint32_t>(i / width), static_cast<uint32_t>(i % width),
                         true);
        }
    }
    return grid;
}

void write_pgm(std::ostream& out, const BitGrid& grid) {
    out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    std::vector<char> row(grid.width());
    for (uint32_t r = 0; r < grid.height(); ++r) {
        for (uint32_t c = 0; c < grid.width(); ++c)
            row[c] = grid.get(r, c) ? static_cast<char>(0xFF) : 0;
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("pgm: stream write failed");
}

void write_pgm_gray(std::ostream& out, uint32_t height, uint32_t width,
                    std::span<const uint16_t> samples, uint16_t maxval) {
    if (maxval != 255 && maxval != 65535)
        throw ValidationError("pgm: gray maxval must be 255 or 65535");
    if (samples.size() != uint64_t{height} * width)
        throw ValidationError("pgm: sample count does not match dimensions");
    out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
    for (const uint16_t s : samples) {
        if (s > maxval) throw ValidationError("pgm: sample exceeds maxval");
        if (maxval == 65535) out.put(static_cast<char>(s >> 8));
        out.put(static_cast<char>(s & 0xFF));
    }
    if (!out) throw IoError("pgm: stream write failed");
}

} // namespace siltok

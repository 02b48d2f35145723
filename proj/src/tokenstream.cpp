#include "siltok/tokenstream.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "siltok/format.hpp"

namespace siltok {

namespace {

void write_json_string(std::ostream& out, const std::string& s) {
    out << '"';
    for (const char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            case '\t': out << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

void write_le(std::ostream& out, uint64_t value, unsigned bytes) {
    for (unsigned i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xFF));
}

uint64_t read_le(std::istream& in, unsigned bytes, const char* what) {
    uint64_t value = 0;
    for (unsigned i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == EOF)
            throw ValidationError(std::string("token stream: truncated while reading ") + what);
        value |= uint64_t{static_cast<uint8_t>(c)} << (8 * i);
    }
    return value;
}

} // namespace

void write_token_stream_jsonl(std::ostream& out, std::span<const SequenceTokens> stream) {
    for (const auto& seq : stream) {
        for (const auto& frame : seq.frames) {
            out << "{\"seq\":";
            write_json_string(out, seq.label);
            out << ",\"t\":" << frame.frame_index << ",\"tokens\":[";
            for (size_t i = 0; i < frame.tokens.size(); ++i) {
                if (i != 0) out << ',';
                out << frame.tokens[i];
            }
            out << "],\"weights\":[";
            for (size_t i = 0; i < frame.weights.size(); ++i) {
                if (i != 0) out << ',';
                out << format_real17(frame.weights[i]);
            }
            out << "]}\n";
        }
    }
    if (!out) throw IoError("token stream: write failed");
}

void write_token_stream_binary(std::ostream& out, std::span<const SequenceTokens> stream) {
    out.write("STOK", 4);
    write_le(out, 1, 1);
    write_le(out, stream.size(), 4);
    for (const auto& seq : stream) {
        if (seq.label.size() > 65535)
            throw ValidationError("token stream: label longer than 65535 bytes");
        write_le(out, seq.label.size(), 2);
        out.write(seq.label.data(), static_cast<std::streamsize>(seq.label.size()));
        write_le(out, seq.frames.size(), 4);
        for (const auto& frame : seq.frames) {
            write_le(out, frame.tokens.size(), 4);
            for (size_t i = 0; i < frame.tokens.size(); ++i) {
                write_le(out, frame.tokens[i], 4);
                write_le(out, std::bit_cast<uint64_t>(frame.weights[i]), 8);
            }
        }
    }
    if (!out) throw IoError("token stream: write failed");
}

std::vector<SequenceTokens> read_token_stream_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "STOK", 4) != 0)
        throw ValidationError("token stream: bad magic");
    if (read_le(in, 1, "version") != 1)
        throw ValidationError("token stream: unsupported version");

    const auto seq_count = static_cast<uint32_t>(read_le(in, 4, "sequence count"));
    std::vector<SequenceTokens> stream(seq_count);
    for (auto& seq : stream) {
        const auto label_len = static_cast<uint32_t>(read_le(in, 2, "label length"));
        seq.label.resize(label_len);
        in.read(seq.label.data(), label_len);
        if (static_cast<uint32_t>(in.gcount()) != label_len)
            throw ValidationError("token stream: truncated label");
        const auto frame_count = static_cast<uint32_t>(read_le(in, 4, "frame count"));
        seq.frames.resize(frame_count);
        for (uint32_t t = 0; t < frame_count; ++t) {
            TokenFrame& frame = seq.frames[t];
            frame.frame_index = t;
            const auto n = static_cast<uint32_t>(read_le(in, 4, "token count"));
            frame.tokens.resize(n);
            frame.weights.resize(n);
            for (uint32_t i = 0; i < n; ++i) {
                frame.tokens[i] = static_cast<uint32_t>(read_le(in, 4, "token"));
                frame.weights[i] = std::bit_cast<double>(read_le(in, 8, "weight"));
            }
        }
    }
    if (in.get() != EOF) throw ValidationError("token stream: trailing bytes after payload");
    return stream;
}

} // namespace siltok

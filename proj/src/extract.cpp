#include "siltok/extract.hpp"

#include <queue>
#include <string>

namespace siltok {

namespace {

inline bool test_bit(std::span<const uint64_t> row, uint32_t col) {
    return (row[col >> 6] >> (col & 63)) & 1u;
}

inline void set_bit(std::span<uint64_t> row, uint32_t col) {
    row[col >> 6] |= uint64_t{1} << (col & 63);
}

// Value of the left neighbor at every column: dst[c] = src[c-1], column 0 gets 0.
inline void shift_toward_high(std::span<const uint64_t> src, std::span<uint64_t> dst) {
    uint64_t carry = 0;
    for (size_t i = 0; i < src.size(); ++i) {
        dst[i] = (src[i] << 1) | carry;
        carry = src[i] >> 63;
    }
}

// Value of the right neighbor at every column: dst[c] = src[c+1]. Padding
// bits are zero, so the top column picks up the implicit out-of-bounds zero.
inline void shift_toward_low(std::span<const uint64_t> src, std::span<uint64_t> dst) {
    for (size_t i = 0; i < src.size(); ++i) {
        const uint64_t next = (i + 1 < src.size()) ? src[i + 1] : 0;
        dst[i] = (src[i] >> 1) | (next << 63);
    }
}

/// Background pixels 4-reachable from the grid border through background.
BitGrid border_reachable_background(const BitGrid& grid) {
    const uint32_t h = grid.height();
    const uint32_t w = grid.width();
    BitGrid reached(h, w);
    std::vector<uint64_t> stack;

    auto try_push = [&](uint32_t r, uint32_t c) {
        if (!test_bit(grid.row_words(r), c) && !test_bit(reached.row_words(r), c)) {
            set_bit(reached.row_words(r), c);
            stack.push_back(uint64_t{r} * w + c);
        }
    };

    for (uint32_t c = 0; c < w; ++c) {
        try_push(0, c);
        try_push(h - 1, c);
    }
    for (uint32_t r = 0; r < h; ++r) {
        try_push(r, 0);
        try_push(r, w - 1);
    }
    while (!stack.empty()) {
        const uint64_t idx = stack.back();
        stack.pop_back();
        const uint32_t r = static_cast<uint32_t>(idx / w);
        const uint32_t c = static_cast<uint32_t>(idx % w);
        if (r > 0) try_push(r - 1, c);
        if (r + 1 < h) try_push(r + 1, c);
        if (c > 0) try_push(r, c - 1);
        if (c + 1 < w) try_push(r, c + 1);
    }
    return reached;
}

/// 4-connected component labels for the pixels selected by `in_region`.
/// Unselected pixels get label -1. Returns the number of components.
template <typename Pred>
uint32_t label_components(const BitGrid& grid, Pred in_region, std::vector<int32_t>& labels) {
    const uint32_t h = grid.height();
    const uint32_t w = grid.width();
    labels.assign(uint64_t{h} * w, -1);
    uint32_t next = 0;
    std::vector<uint64_t> stack;
    for (uint32_t r0 = 0; r0 < h; ++r0) {
        for (uint32_t c0 = 0; c0 < w; ++c0) {
            const uint64_t start = uint64_t{r0} * w + c0;
            if (labels[start] != -1 || !in_region(r0, c0)) continue;
            const int32_t id = static_cast<int32_t>(next++);
            labels[start] = id;
            stack.push_back(start);
            while (!stack.empty()) {
                const uint64_t idx = stack.back();
                stack.pop_back();
                const uint32_t r = static_cast<uint32_t>(idx / w);
                const uint32_t c = static_cast<uint32_t>(idx % w);
                auto visit = [&](uint32_t rr, uint32_t cc) {
                    const uint64_t i = uint64_t{rr} * w + cc;
                    if (labels[i] == -1 && in_region(rr, cc)) {
                        labels[i] = id;
                        stack.push_back(i);
                    }
                };
                if (r > 0) visit(r - 1, c);
                if (r + 1 < h) visit(r + 1, c);
                if (c > 0) visit(r, c - 1);
                if (c + 1 < w) visit(r, c + 1);
            }
        }
    }
    return next;
}

BitGrid reconstruct_parity(const BitGrid& contour) {
    const uint32_t h = contour.height();
    const uint32_t w = contour.width();

    auto is_contour = [&](uint32_t r, uint32_t c) { return test_bit(contour.row_words(r), c); };
    auto is_open = [&](uint32_t r, uint32_t c) { return !test_bit(contour.row_words(r), c); };

    std::vector<int32_t> open_label;
    const uint32_t open_count = label_components(contour, is_open, open_label);
    std::vector<int32_t> contour_label;
    const uint32_t contour_count = label_components(contour, is_contour, contour_label);

    // Bipartite adjacency between contour components and open components.
    std::vector<std::vector<int32_t>> contour_adj(contour_count);
    for (uint32_t r = 0; r < h; ++r) {
        for (uint32_t c = 0; c < w; ++c) {
            const int32_t k = contour_label[uint64_t{r} * w + c];
            if (k == -1) continue;
            auto link = [&](uint32_t rr, uint32_t cc) {
                const int32_t b = open_label[uint64_t{rr} * w + cc];
                if (b != -1) contour_adj[k].push_back(b);
            };
            if (r > 0) link(r - 1, c);
            if (r + 1 < h) link(r + 1, c);
            if (c > 0) link(r, c - 1);
            if (c + 1 < w) link(r, c + 1);
        }
    }
    std::vector<std::vector<int32_t>> open_adj(open_count);
    for (uint32_t k = 0; k < contour_count; ++k)
        for (int32_t b : contour_adj[k]) open_adj[b].push_back(static_cast<int32_t>(k));

    // Depth 0 = everything merged with the implicit outside region. Border
    // contour components act as edges out of it, like any other component.
    std::vector<int32_t> depth(open_count, -1);
    std::vector<bool> contour_seen(contour_count, false);
    std::queue<int32_t> queue;
    auto seed_open = [&](int32_t b) {
        if (b != -1 && depth[b] == -1) {
            depth[b] = 0;
            queue.push(b);
        }
    };
    std::vector<int32_t> border_contours;
    for (uint32_t c = 0; c < w; ++c) {
        seed_open(open_label[c]);
        seed_open(open_label[uint64_t{h - 1} * w + c]);
        border_contours.push_back(contour_label[c]);
        border_contours.push_back(contour_label[uint64_t{h - 1} * w + c]);
    }
    for (uint32_t r = 0; r < h; ++r) {
        seed_open(open_label[uint64_t{r} * w]);
        seed_open(open_label[uint64_t{r} * w + (w - 1)]);
        border_contours.push_back(contour_label[uint64_t{r} * w]);
        border_contours.push_back(contour_label[uint64_t{r} * w + (w - 1)]);
    }
    for (int32_t k : border_contours) {
        if (k == -1 || contour_seen[k]) continue;
        contour_seen[k] = true;
        for (int32_t b : contour_adj[k]) {
            if (depth[b] == -1) {
                depth[b] = 1;
                queue.push(b);
            }
        }
    }
    while (!queue.empty()) {
        const int32_t a = queue.front();
        queue.pop();
        for (int32_t k : open_adj[a]) {
            if (contour_seen[k]) continue;
            contour_seen[k] = true;
            for (int32_t b : contour_adj[k]) {
                if (depth[b] == -1) {
                    depth[b] = depth[a] + 1;
                    queue.push(b);
                }
            }
        }
    }

    BitGrid out = contour;
    for (uint32_t r = 0; r < h; ++r) {
        auto row = out.row_words(r);
        for (uint32_t c = 0; c < w; ++c) {
            const int32_t b = open_label[uint64_t{r} * w + c];
            if (b != -1 && depth[b] > 0 && (depth[b] & 1)) set_bit(row, c);
        }
    }
    return out;
}

} // namespace

ContourMap extract_contour(const BitGrid& silhouette) {
    const uint32_t h = silhouette.height();
    const uint32_t wpr = silhouette.words_per_row();
    BitGrid out(silhouette.height(), silhouette.width());
    std::vector<uint64_t> left(wpr), right(wpr);
    const std::vector<uint64_t> zeros(wpr, 0);

    for (uint32_t r = 0; r < h; ++r) {
        const auto cur = silhouette.row_words(r);
        const auto up = r > 0 ? silhouette.row_words(r - 1) : std::span<const uint64_t>(zeros);
        const auto down =
            r + 1 < h ? silhouette.row_words(r + 1) : std::span<const uint64_t>(zeros);
        shift_toward_high(cur, left);
        shift_toward_low(cur, right);
        auto dst = out.row_words(r);
        for (uint32_t wi = 0; wi < wpr; ++wi) {
            const uint64_t interior = cur[wi] & up[wi] & down[wi] & left[wi] & right[wi];
            dst[wi] = cur[wi] & ~interior;
        }
    }
    return ContourMap{std::move(out)};
}

BitGrid reconstruct_silhouette(const ContourMap& contour, FillMode mode) {
    if (mode == FillMode::parity) return reconstruct_parity(contour.grid);
    return fill_holes(contour.grid);
}

VelocityMap extract_velocity(const ContourMap& current, const ContourMap& previous) {
    if (!current.grid.same_dimensions(previous.grid))
        throw ValidationError(
            "velocity inputs differ in size: " + std::to_string(current.grid.height()) + "x" +
            std::to_string(current.grid.width()) + " vs " +
            std::to_string(previous.grid.height()) + "x" + std::to_string(previous.grid.width()));
    BitGrid out(current.grid.height(), current.grid.width());
    auto dst = out.words();
    const auto a = current.grid.words();
    const auto b = previous.grid.words();
    for (uint64_t i = 0; i < dst.size(); ++i) dst[i] = a[i] ^ b[i];
    return VelocityMap{std::move(out)};
}

std::vector<std::pair<ContourMap, VelocityMap>>
extract_sequence_maps(const SilhouetteSequence& seq) {
    seq.validate();
    std::vector<std::pair<ContourMap, VelocityMap>> out;
    out.reserve(seq.frames.size());
    for (size_t t = 0; t < seq.frames.size(); ++t) {
        ContourMap contour = extract_contour(seq.frames[t]);
        VelocityMap velocity =
            t == 0 ? VelocityMap{BitGrid(contour.grid.height(), contour.grid.width())}
                   : extract_velocity(contour, out[t - 1].first);
        out.emplace_back(std::move(contour), std::move(velocity));
    }
    return out;
}

BitGrid fill_holes(const BitGrid& silhouette) {
    const BitGrid background = border_reachable_background(silhouette);
    BitGrid out(silhouette.height(), silhouette.width());
    auto dst = out.words();
    const auto bg = background.words();
    const uint64_t mask = out.last_word_mask();
    const uint32_t wpr = out.words_per_row();
    for (uint64_t i = 0; i < dst.size(); ++i) {
        dst[i] = ~bg[i];
        if ((i + 1) % wpr == 0) dst[i] &= mask;
    }
    return out;
}

bool is_hole_free(const BitGrid& silhouette) {
    const BitGrid background = border_reachable_background(silhouette);
    return background.popcount() == silhouette.pixel_count() - silhouette.popcount();
}

} // namespace siltok

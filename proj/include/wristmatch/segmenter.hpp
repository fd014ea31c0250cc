#ifndef WRISTMATCH_SEGMENTER_HPP
#define WRISTMATCH_SEGMENTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wristmatch/decision_forest.hpp"
#include "wristmatch/image.hpp"
#include "wristmatch/image_io.hpp"
#include "wristmatch/slic.hpp"
#include "wristmatch/superpixel_features.hpp"

namespace wristmatch {

/// Binary skin mask in the 200-pixel-height working frame. `empty` flags an
/// image where no superpixel was classified skin; callers treat that as a
/// data condition, not an exception.
struct SkinMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;
    bool empty = false;

    std::uint8_t at(int r, int c) const {
        return mask[static_cast<std::size_t>(r) * width + c];
    }
    std::uint8_t& at(int r, int c) {
        return mask[static_cast<std::size_t>(r) * width + c];
    }

    ImagePlane to_plane() const {
        ImagePlane p(width, height);
        for (std::size_t i = 0; i < mask.size(); ++i)
            p.data[i] = mask[i] ? 1.0 : 0.0;
        return p;
    }
};

struct SegmentOptions {
    int superpixel_k = 200;
    double compactness = 10.0;
};

namespace detail {

/// Keep only the largest 4-connected foreground component, then fill every
/// enclosed background hole smaller than 1% of that component's area.
inline void cleanup_mask(std::vector<std::uint8_t>& mask, int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::int32_t> comp(n, -1);
    std::vector<std::size_t> stack;
    std::int32_t comp_count = 0;
    std::vector<std::size_t> comp_size;
    for (std::size_t s = 0; s < n; ++s) {
        if (!mask[s] || comp[s] >= 0) continue;
        std::size_t size = 0;
        stack.push_back(s);
        comp[s] = comp_count;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++size;
            const int r = static_cast<int>(i / w);
            const int c = static_cast<int>(i % w);
            const int drs[4] = {-1, 1, 0, 0};
            const int dcs[4] = {0, 0, -1, 1};
            for (int t = 0; t < 4; ++t) {
                const int rr = r + drs[t];
                const int cc = c + dcs[t];
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
                if (mask[j] && comp[j] < 0) {
                    comp[j] = comp_count;
                    stack.push_back(j);
                }
            }
        }
        comp_size.push_back(size);
        ++comp_count;
    }
    if (comp_count == 0) return;
    std::int32_t largest = 0;
    for (std::int32_t i = 1; i < comp_count; ++i)
        if (comp_size[i] > comp_size[largest]) largest = i;
    for (std::size_t i = 0; i < n; ++i)
        mask[i] = (mask[i] && comp[i] == largest) ? 1 : 0;

    // Flood the background from the border; unreached background pixels are
    // holes. Holes below 1% of the kept area are filled.
    std::vector<std::uint8_t> outside(n, 0);
    auto push_bg = [&](std::size_t i) {
        if (!mask[i] && !outside[i]) {
            outside[i] = 1;
            stack.push_back(i);
        }
    };
    for (int c = 0; c < w; ++c) {
        push_bg(static_cast<std::size_t>(c));
        push_bg(static_cast<std::size_t>(h - 1) * w + c);
    }
    for (int r = 0; r < h; ++r) {
        push_bg(static_cast<std::size_t>(r) * w);
        push_bg(static_cast<std::size_t>(r) * w + (w - 1));
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int r = static_cast<int>(i / w);
        const int c = static_cast<int>(i % w);
        const int drs[4] = {-1, 1, 0, 0};
        const int dcs[4] = {0, 0, -1, 1};
        for (int t = 0; t < 4; ++t) {
            const int rr = r + drs[t];
            const int cc = c + dcs[t];
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            push_bg(static_cast<std::size_t>(rr) * w + cc);
        }
    }
    const double hole_limit = 0.01 * static_cast<double>(comp_size[largest]);
    std::vector<std::int32_t> hole(n, -1);
    std::int32_t hole_count = 0;
    std::vector<std::vector<std::size_t>> hole_members;
    for (std::size_t s = 0; s < n; ++s) {
        if (mask[s] || outside[s] || hole[s] >= 0) continue;
        std::vector<std::size_t> members{s};
        hole[s] = hole_count;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int r = static_cast<int>(i / w);
            const int c = static_cast<int>(i % w);
            const int drs[4] = {-1, 1, 0, 0};
            const int dcs[4] = {0, 0, -1, 1};
            for (int t = 0; t < 4; ++t) {
                const int rr = r + drs[t];
                const int cc = c + dcs[t];
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
                if (!mask[j] && !outside[j] && hole[j] < 0) {
                    hole[j] = hole_count;
                    members.push_back(j);
                    stack.push_back(j);
                }
            }
        }
        hole_members.push_back(std::move(members));
        ++hole_count;
    }
    for (const auto& members : hole_members)
        if (static_cast<double>(members.size()) < hole_limit)
            for (std::size_t i : members) mask[i] = 1;
}

} // namespace detail

/// Segment skin in a 200-height RGB image: SLIC superpixels, 450-dim
/// statistics, majority-vote classification, then largest-component and
/// small-hole cleanup. Zero skin superpixels give an empty-flagged mask.
inline SkinMask segment(const RgbImage& img, const SkinClassifier& classifier,
                        const SegmentOptions& opts = {}) {
    if (img.empty()) throw UsageError("segment: empty image");
    const ColorStack stack = to_color_stack(img);
    const GradientMapSet grads = gradient_maps(luma(img));
    const SuperpixelLabeling sp = slic(stack, opts.superpixel_k, opts.compactness);
    const Matrix feats = superpixel_features(sp, stack, grads);
    if (classifier.feature_dim != feats.cols)
        throw UsageError("segment: classifier feature dimension mismatch");

    std::vector<std::uint8_t> skin_label(sp.count, 0);
    bool any_skin = false;
    for (int l = 0; l < sp.count; ++l) {
        skin_label[l] = classifier.predict(feats.row(l));
        any_skin = any_skin || skin_label[l];
    }

    SkinMask out;
    out.width = img.width();
    out.height = img.height();
    out.mask.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    if (!any_skin) {
        out.empty = true;
        return out;
    }
    for (std::size_t i = 0; i < out.mask.size(); ++i)
        out.mask[i] = skin_label[sp.labels[i]];
    detail::cleanup_mask(out.mask, out.width, out.height);
    return out;
}

inline void save_mask(const SkinMask& mask, const std::string& path) {
    write_mask_png(path, mask.mask, mask.width, mask.height);
}

inline SkinMask load_mask(const std::string& path) {
    SkinMask m;
    m.mask = read_mask_png(path, m.width, m.height);
    m.empty = true;
    for (auto v : m.mask)
        if (v) { m.empty = false; break; }
    return m;
}

} // namespace wristmatch

#endif

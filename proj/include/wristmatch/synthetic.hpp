#ifndef WRISTMATCH_SYNTHETIC_HPP
#define WRISTMATCH_SYNTHETIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/image.hpp"
#include "wristmatch/image_io.hpp"
#include "wristmatch/manifest.hpp"
#include "wristmatch/rng.hpp"

namespace wristmatch {

// Generator constants, version 1. Changing any of them changes every
// benchmark number downstream, so they are frozen here rather than exposed
// as options; bump the version when they move.
inline constexpr int kSynthVersion = 1;
inline constexpr int kSynthWidth = 320;
inline constexpr int kSynthHeight = 240;
inline constexpr double kSynthBandTop = 60.0;
inline constexpr double kSynthBandBottom = 180.0;
inline constexpr double kSynthBandWobble = 4.0;   // boundary sine amplitude
inline constexpr int kSynthControlRows = 9;       // per wrinkle polyline
inline constexpr int kSynthLattice = 64;          // jitter quantization steps
// The two primary grooves must stay the two cheapest corridors of the
// wrinkle graph after the working-frame downsamples, so their gradient
// slope (depth / sigma) is budgeted at ~7x the faint ones'.
inline constexpr double kSynthPrimaryJitter = 10.0;
inline constexpr double kSynthPrimaryDepth = 0.60;
inline constexpr double kSynthPrimarySigma = 3.5;
inline constexpr double kSynthFaintJitter = 12.0;
inline constexpr double kSynthFaintDepth = 0.06;
inline constexpr double kSynthFaintSigma = 3.5;
inline constexpr double kSynthWrinkleWobble = 1.5;
inline constexpr int kSynthTextureWaves = 4;
// Perturbation amplitudes at difficulty 1; every one of them scales linearly
// with difficulty, so difficulty 0 renders each identity's images
// bit-identically (the illumination gain degenerates to exactly 1).
inline constexpr double kSynthGainAmp = 0.25;
inline constexpr double kSynthRotationAmp = 0.06; // radians
inline constexpr double kSynthScaleAmp = 0.08;
inline constexpr double kSynthShiftAmp = 8.0;     // pixels
inline constexpr double kSynthNoiseAmp = 0.04;

struct SynthOptions {
    int identities = 10;
    int gallery_per_id = 4;
    int probe_per_id = 2;
    double difficulty = 0.2;
    std::uint64_t seed = 1;
    std::string subdir = "synth";
};

/// One sinusoidal luminance wave of the per-identity skin texture.
struct SynthWave {
    double ux = 0.0, uy = 0.0; // direction / wavelength, cycles per pixel
    double phase = 0.0;
    double amp = 0.0;
};

/// A rendered wrinkle: polyline control points plus its profile. Control
/// rows are shared by construction; each wrinkle's columns are its base
/// column shifted onto an interleaved per-identity lattice plus a small
/// identity-independent row wobble, so two identities can never share a
/// control point while every identity's grooves stay near vertical.
struct SynthWrinkle {
    std::vector<std::array<double, 2>> control; // (row, col), top to bottom
    double depth = 0.0;
    double sigma = 0.0;
    double min_col = 0.0, max_col = 0.0;
};

struct SynthIdentity {
    int index = 0;
    double top_phase = 0.0, bottom_phase = 0.0;
    std::array<SynthWave, kSynthTextureWaves> waves;
    std::vector<SynthWrinkle> wrinkles; // 2 primary then 3 faint
};

namespace detail {

inline SynthWrinkle make_wrinkle(Rng& rng, double base_col, double jitter,
                                 double depth, double sigma, int identity,
                                 int identity_count) {
    SynthWrinkle w;
    w.depth = depth;
    w.sigma = sigma;
    w.min_col = kSynthWidth;
    w.max_col = 0.0;
    // Interleaved lattice: distinct identities draw distinct residues mod
    // identity_count, hence distinct columns at every shared control row.
    const auto step = static_cast<double>(rng.below(kSynthLattice));
    const double u = (step * identity_count + identity) /
                         (static_cast<double>(kSynthLattice) * identity_count) -
                     0.5;
    const double shift = 2.0 * jitter * u;
    // Control rows overshoot the canvas so the curve crosses the whole band
    // under any pose jitter. The row wobble depends only on the base column,
    // never on the identity, so it cannot break lattice disjointness.
    const double r0 = -10.0;
    const double r1 = kSynthHeight + 10.0;
    for (int j = 0; j < kSynthControlRows; ++j) {
        const double r = r0 + (r1 - r0) * j / (kSynthControlRows - 1.0);
        const double c = base_col + shift +
                         kSynthWrinkleWobble *
                             std::sin(6.283185307179586 * j /
                                          (kSynthControlRows - 1.0) +
                                      0.1 * base_col);
        w.control.push_back({r, c});
        w.min_col = std::min(w.min_col, c);
        w.max_col = std::max(w.max_col, c);
    }
    return w;
}

inline double dist_to_segment(double pr, double pc,
                              const std::array<double, 2>& a,
                              const std::array<double, 2>& b) {
    const double vr = b[0] - a[0], vc = b[1] - a[1];
    const double wr = pr - a[0], wc = pc - a[1];
    const double vv = vr * vr + vc * vc;
    double t = vv > 0.0 ? (wr * vr + wc * vc) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dr = wr - t * vr, dc = wc - t * vc;
    return std::sqrt(dr * dr + dc * dc);
}

inline double wrinkle_factor(const SynthWrinkle& w, double r, double c) {
    // 4 sigma out the dip is < 1e-6 of the depth, invisible after 8-bit
    // quantization; skip the polyline walk entirely.
    if (c < w.min_col - 4.0 * w.sigma || c > w.max_col + 4.0 * w.sigma)
        return 1.0;
    double d = 1e30;
    for (std::size_t j = 0; j + 1 < w.control.size(); ++j)
        d = std::min(d, dist_to_segment(r, c, w.control[j], w.control[j + 1]));
    const double z = d / w.sigma;
    if (z * z > 16.0) return 1.0;
    return 1.0 - w.depth * std::exp(-z * z);
}

} // namespace detail

/// Deterministic per-identity geometry; identical for any difficulty.
inline SynthIdentity synth_identity(std::uint64_t seed, int index, int count) {
    if (count < 2) throw UsageError("synth: need at least 2 identities");
    if (index < 0 || index >= count)
        throw UsageError("synth: identity index out of range");
    Rng rng = Rng::keyed(seed, 0x4944u + static_cast<std::uint64_t>(index));
    SynthIdentity id;
    id.index = index;
    id.top_phase = rng.uniform(0.0, 6.283185307179586);
    id.bottom_phase = rng.uniform(0.0, 6.283185307179586);
    for (auto& wv : id.waves) {
        const double lambda = rng.uniform(11.0, 37.0);
        const double theta = rng.uniform(0.0, 6.283185307179586);
        wv.ux = std::cos(theta) / lambda;
        wv.uy = std::sin(theta) / lambda;
        wv.phase = rng.uniform(0.0, 6.283185307179586);
        wv.amp = rng.uniform(0.015, 0.03);
    }
    id.wrinkles.push_back(detail::make_wrinkle(rng, 115.0, kSynthPrimaryJitter,
                                               kSynthPrimaryDepth,
                                               kSynthPrimarySigma, index,
                                               count));
    id.wrinkles.push_back(detail::make_wrinkle(rng, 205.0, kSynthPrimaryJitter,
                                               kSynthPrimaryDepth,
                                               kSynthPrimarySigma, index,
                                               count));
    for (double base : {70.0, 160.0, 250.0})
        id.wrinkles.push_back(detail::make_wrinkle(
            rng, base, kSynthFaintJitter, kSynthFaintDepth, kSynthFaintSigma,
            index, count));
    return id;
}

/// Per-image pose and illumination draw. Every amplitude is proportional to
/// difficulty; difficulty 0 yields the exact identity transform and gain 1.
struct SynthPerturbation {
    double gain = 1.0;
    double rotation = 0.0;
    double scale = 1.0;
    double shift_r = 0.0, shift_c = 0.0;
    std::uint64_t noise_key = 0;
};

inline SynthPerturbation synth_perturbation(std::uint64_t seed, int identity,
                                            SetTag set, int image,
                                            double difficulty) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(identity) << 24) |
        (set == SetTag::kProbe ? 1ull << 20 : 0ull) |
        static_cast<std::uint64_t>(image);
    Rng rng = Rng::keyed(seed, 0x504f5345ull ^ key);
    SynthPerturbation p;
    p.gain = 1.0 + difficulty * kSynthGainAmp * rng.uniform(-1.0, 1.0);
    p.rotation = difficulty * kSynthRotationAmp * rng.uniform(-1.0, 1.0);
    p.scale = 1.0 + difficulty * kSynthScaleAmp * rng.uniform(-1.0, 1.0);
    p.shift_r = difficulty * kSynthShiftAmp * rng.uniform(-1.0, 1.0);
    p.shift_c = difficulty * kSynthShiftAmp * rng.uniform(-1.0, 1.0);
    p.noise_key = 0x4e4f4953ull ^ key;
    return p;
}

namespace detail {

/// Scene color at an identity-frame point, before gain and noise. The band
/// and wrinkle geometry are analytic, so pose jitter is applied by pulling
/// each output pixel back through the inverse pose with no resampling loss.
inline void scene_color(const SynthIdentity& id, double r, double c,
                        double* rgb, bool* skin) {
    const double top = kSynthBandTop +
                       kSynthBandWobble *
                           std::sin(c * (6.283185307179586 / 240.0) +
                                    id.top_phase);
    const double bottom = kSynthBandBottom +
                          kSynthBandWobble *
                              std::sin(c * (6.283185307179586 / 280.0) +
                                       id.bottom_phase);
    *skin = r >= top && r <= bottom;
    if (!*skin) {
        const double g = 0.03 * c / kSynthWidth;
        rgb[0] = 0.16 + g;
        rgb[1] = 0.19 + g;
        rgb[2] = 0.26 + g;
        return;
    }
    double lum = 1.0 + 0.06 * (c / kSynthWidth - 0.5) +
                 0.04 * (r / kSynthHeight - 0.5);
    for (const auto& wv : id.waves)
        lum += wv.amp *
               std::sin(6.283185307179586 * (c * wv.ux + r * wv.uy) +
                        wv.phase);
    for (const auto& w : id.wrinkles) lum *= wrinkle_factor(w, r, c);
    rgb[0] = 0.80 * lum;
    rgb[1] = 0.62 * lum;
    rgb[2] = 0.50 * lum;
}

} // namespace detail

/// Render one image: evaluate the scene through the inverse pose transform,
/// apply the illumination gain, then per-pixel luminance noise (difficulty-
/// scaled, keyed stream), clamped to [0, 1].
inline RgbImage render_synth_image(const SynthIdentity& id,
                                   const SynthPerturbation& p,
                                   std::uint64_t seed, double difficulty) {
    RgbImage img(kSynthWidth, kSynthHeight);
    const double cr = kSynthHeight / 2.0, cc = kSynthWidth / 2.0;
    const double cos_t = std::cos(p.rotation), sin_t = std::sin(p.rotation);
    Rng noise = Rng::keyed(seed, p.noise_key);
    const double namp = difficulty * kSynthNoiseAmp;
    for (int r = 0; r < kSynthHeight; ++r)
        for (int c = 0; c < kSynthWidth; ++c) {
            const double dr = r - cr - p.shift_r;
            const double dc = c - cc - p.shift_c;
            const double sr = (cos_t * dr - sin_t * dc) / p.scale + cr;
            const double sc = (sin_t * dr + cos_t * dc) / p.scale + cc;
            double rgb[3];
            bool skin;
            detail::scene_color(id, sr, sc, rgb, &skin);
            const double n = namp * noise.uniform(-1.0, 1.0);
            img.r.at(r, c) = std::clamp(rgb[0] * p.gain + n, 0.0, 1.0);
            img.g.at(r, c) = std::clamp(rgb[1] * p.gain + n, 0.0, 1.0);
            img.b.at(r, c) = std::clamp(rgb[2] * p.gain + n, 0.0, 1.0);
        }
    return img;
}

/// Ground-truth skin mask of the same render: the band predicate through the
/// same inverse pose, untouched by gain or noise.
inline std::vector<std::uint8_t> render_synth_mask(const SynthIdentity& id,
                                                   const SynthPerturbation& p) {
    std::vector<std::uint8_t> mask(
        static_cast<std::size_t>(kSynthWidth) * kSynthHeight, 0);
    const double cr = kSynthHeight / 2.0, cc = kSynthWidth / 2.0;
    const double cos_t = std::cos(p.rotation), sin_t = std::sin(p.rotation);
    for (int r = 0; r < kSynthHeight; ++r)
        for (int c = 0; c < kSynthWidth; ++c) {
            const double dr = r - cr - p.shift_r;
            const double dc = c - cc - p.shift_c;
            const double sr = (cos_t * dr - sin_t * dc) / p.scale + cr;
            const double sc = (sin_t * dr + cos_t * dc) / p.scale + cc;
            double rgb[3];
            bool skin;
            detail::scene_color(id, sr, sc, rgb, &skin);
            mask[static_cast<std::size_t>(r) * kSynthWidth + c] = skin ? 1 : 0;
        }
    return mask;
}

/// Ground-truth mask path convention: image stem + "_mask.png".
inline std::string mask_path_for(const std::string& image_path) {
    const auto dot = image_path.rfind('.');
    const std::string stem =
        dot == std::string::npos ? image_path : image_path.substr(0, dot);
    return stem + "_mask.png";
}

/// Generate the dataset under workspace/<subdir>: one PNG and one ground-
/// truth mask per image plus manifest.csv. Returns the validated manifest
/// (paths relative to the workspace root). Identity i doubles as subject i;
/// flip flags are 0 (the generator already renders a single-wrist frame).
inline DatasetManifest synth_dataset(const std::string& workspace,
                                     const SynthOptions& opts) {
    if (opts.identities < 2)
        throw UsageError("synth: need at least 2 identities");
    if (opts.gallery_per_id < 1 || opts.probe_per_id < 1)
        throw UsageError("synth: need at least one image per identity per set");
    if (!(opts.difficulty >= 0.0) || opts.difficulty > 1.0)
        throw UsageError("synth: difficulty must be in [0, 1]");

    const std::string dir = join_workspace(workspace, opts.subdir);
    std::filesystem::create_directories(dir);

    char buf[64];
    DatasetManifest m;
    for (int i = 0; i < opts.identities; ++i) {
        const SynthIdentity id = synth_identity(opts.seed, i, opts.identities);
        const int counts[2] = {opts.gallery_per_id, opts.probe_per_id};
        const SetTag tags[2] = {SetTag::kGallery, SetTag::kProbe};
        const char codes[2] = {'g', 'p'};
        for (int s = 0; s < 2; ++s)
            for (int k = 0; k < counts[s]; ++k) {
                std::snprintf(buf, sizeof buf, "id%02d_%c%02d.png", i,
                              codes[s], k);
                ManifestRecord rec;
                rec.path = opts.subdir + "/" + buf;
                std::snprintf(buf, sizeof buf, "w%02d", i);
                rec.wrist_id = buf;
                std::snprintf(buf, sizeof buf, "s%02d", i);
                rec.subject_id = buf;
                rec.set = tags[s];
                rec.flip = false;

                const SynthPerturbation p = synth_perturbation(
                    opts.seed, i, tags[s], k, opts.difficulty);
                const RgbImage img =
                    render_synth_image(id, p, opts.seed, opts.difficulty);
                write_png(join_workspace(workspace, rec.path), img);
                write_mask_png(
                    join_workspace(workspace, mask_path_for(rec.path)),
                    render_synth_mask(id, p), kSynthWidth, kSynthHeight);
                m.records.push_back(std::move(rec));
            }
    }
    validate_manifest(m);
    save_manifest(m, dir + "/manifest.csv");
    return m;
}

} // namespace wristmatch

#endif

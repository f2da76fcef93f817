#pragma once

#include <cmath>
#include <numbers>

#include "advmri/rng.hpp"
#include "advmri/types.hpp"

namespace advmri {

// Seeded generation of synthetic test data: ellipse phantoms in 2D and
// sparse / piecewise-constant signals in 1D. Generation is a pure function
// of the spec (including its seed); identical inputs give bitwise-identical
// output.

struct PhantomSpec {
    int n = 256;
    std::uint64_t seed = 0;
    int ellipse_count_min = 3;
    int ellipse_count_max = 10;
    double intensity_min = -0.6;
    double intensity_max = 0.9;
    double axis_min_frac = 0.05;  // semi-axes as fractions of n
    double axis_max_frac = 0.40;
};

/// Accumulates a rotated ellipse of the given intensity into img.
/// Coordinates are 1-based pixel centers, matching the image index grid.
inline void add_ellipse(Image& img, double cx, double cy, double a, double b,
                        double angle, double intensity) {
    require(a > 0.0 && b > 0.0, "add_ellipse: semi-axes must be positive");
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (int i = 0; i < img.n; ++i) {
        const double di = (i + 1) - cx;
        for (int j = 0; j < img.n; ++j) {
            const double dj = (j + 1) - cy;
            const double u = (di * ca + dj * sa) / a;
            const double v = (-di * sa + dj * ca) / b;
            if (u * u + v * v <= 1.0) img.at(i, j) += intensity;
        }
    }
}

/// Sum of randomly placed ellipses, accumulated and clipped to [0, 1].
/// Output is purely real.
inline Image gen_phantom(const PhantomSpec& spec) {
    require(spec.n >= 16, "gen_phantom: n must be >= 16");
    require(spec.ellipse_count_min >= 0 &&
                spec.ellipse_count_min <= spec.ellipse_count_max,
            "gen_phantom: empty ellipse count range");
    require(spec.intensity_min <= spec.intensity_max, "gen_phantom: empty intensity range");
    require(spec.axis_min_frac > 0.0 && spec.axis_min_frac <= spec.axis_max_frac,
            "gen_phantom: empty axis range");

    SplitMix64 g(spec.seed);
    Image img(spec.n);
    const int count =
        spec.ellipse_count_min +
        static_cast<int>(uniform_index(
            g, static_cast<std::uint64_t>(spec.ellipse_count_max - spec.ellipse_count_min) + 1));
    const double lo = 1.0 + 0.1 * (spec.n - 1);
    const double hi = 1.0 + 0.9 * (spec.n - 1);
    for (int e = 0; e < count; ++e) {
        const double cx = uniform_in(g, lo, hi);
        const double cy = uniform_in(g, lo, hi);
        const double a = uniform_in(g, spec.axis_min_frac * spec.n, spec.axis_max_frac * spec.n);
        const double b = uniform_in(g, spec.axis_min_frac * spec.n, spec.axis_max_frac * spec.n);
        const double angle = uniform_in(g, 0.0, std::numbers::pi);
        const double intensity = uniform_in(g, spec.intensity_min, spec.intensity_max);
        add_ellipse(img, cx, cy, a, b, angle, intensity);
    }
    for (cdouble& v : img.data) {
        const double clipped = std::min(1.0, std::max(0.0, v.real()));
        v = cdouble(clipped, 0.0);
    }
    return img;
}

enum class SparseMode { SpikeTrain, PiecewiseConstant };

struct SparseSpec1D {
    int n = 128;                // even
    int s = 3;                  // nonzeros, or gradient jumps in piecewise mode
    SparseMode mode = SparseMode::SpikeTrain;
    double min_magnitude = 0.5;
    std::uint64_t seed = 0;
};

/// Spike-train mode: exactly s nonzeros at distinct random indices != 0
/// (index 0 stays free for the unit spike, so x + delta is (s+1)-sparse).
/// Piecewise-constant mode: periodic gradient exactly s-sparse with jumps
/// at indices >= 2, so the spiked signal's gradient is (s+2)-sparse.
/// Entries are complex with magnitudes in [min_magnitude, 1].
inline Signal1D gen_signal_1d(const SparseSpec1D& spec) {
    require(spec.n >= 4 && spec.n % 2 == 0, "gen_signal_1d: n must be even and >= 4");
    require(spec.s >= 0 && spec.s < spec.n / 4, "gen_signal_1d: s too large for n");
    require(spec.min_magnitude > 0.0 && spec.min_magnitude <= 1.0,
            "gen_signal_1d: min_magnitude must be in (0, 1]");

    SplitMix64 g(spec.seed);
    Signal1D x(spec.n);

    auto random_phase = [&g]() {
        return uniform_in(g, 0.0, 2.0 * std::numbers::pi);
    };

    if (spec.mode == SparseMode::SpikeTrain) {
        // partial shuffle of {1, ..., n-1}
        std::vector<int> pool;
        for (int j = 1; j < spec.n; ++j) pool.push_back(j);
        for (int i = 0; i < spec.s; ++i) {
            const std::size_t j = i + uniform_index(g, pool.size() - i);
            std::swap(pool[i], pool[j]);
            const double mag = uniform_in(g, spec.min_magnitude, 1.0);
            const double ph = random_phase();
            x.data[pool[i]] = mag * cdouble(std::cos(ph), std::sin(ph));
        }
        return x;
    }

    // Piecewise-constant mode. A periodic signal cannot have exactly one
    // jump (differences telescope to zero around the circle).
    require(spec.s != 1, "gen_signal_1d: piecewise mode needs s == 0 or s >= 2");
    if (spec.s == 0) {
        const double mag = uniform_in(g, spec.min_magnitude, 1.0);
        const double ph = random_phase();
        const cdouble level = mag * cdouble(std::cos(ph), std::sin(ph));
        for (cdouble& v : x.data) v = level;
        return x;
    }

    std::vector<int> pool;
    for (int j = 2; j < spec.n; ++j) pool.push_back(j);
    std::vector<int> jumps;
    for (int i = 0; i < spec.s; ++i) {
        const std::size_t j = i + uniform_index(g, pool.size() - i);
        std::swap(pool[i], pool[j]);
        jumps.push_back(pool[i]);
    }
    std::sort(jumps.begin(), jumps.end());

    // Draw arc levels until every circularly adjacent pair differs by at
    // least min_magnitude, so each jump is a genuine nonzero of the gradient.
    std::vector<cdouble> levels(spec.s);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (cdouble& lv : levels) {
            const double mag = uniform_in(g, 0.0, 1.0);
            const double ph = random_phase();
            lv = mag * cdouble(std::cos(ph), std::sin(ph));
        }
        bool ok = true;
        for (int i = 0; i < spec.s && ok; ++i)
            ok = std::abs(levels[i] - levels[(i + 1) % spec.s]) >= spec.min_magnitude;
        if (ok) break;
        if (attempt == 9999)
            throw std::runtime_error("gen_signal_1d: could not draw separated levels");
    }

    // Arc [jumps[i], jumps[i+1]) carries levels[i]; the wrap-around arc
    // [jumps[s-1], n) u [0, jumps[0]) carries levels[s-1].
    for (int j = 0; j < spec.n; ++j) {
        int arc = spec.s - 1;
        for (int i = 0; i < spec.s; ++i) {
            if (j >= jumps[i] && (i + 1 == spec.s || j < jumps[i + 1])) {
                arc = i;
                break;
            }
        }
        x.data[j] = levels[arc];
    }
    return x;
}

}  // namespace advmri

#pragma once

#include <cmath>
#include <numbers>

#include "advmri/fft.hpp"
#include "advmri/rng.hpp"
#include "advmri/types.hpp"

namespace advmri {

// ---------------------------------------------------------------------------
// Discrete Fourier transforms.
//
// All transforms are unitary: the 2D pair is scaled by 1/n each way, the 1D
// pair by 1/sqrt(n). With this normalization the adjoint of the subsampled
// forward operator equals its pseudoinverse, and measurement perturbations
// keep their l2-norm when mapped back to image space.
//
// 2D spectra are stored in standard FFT order (frequency k lives at index
// k mod n). 1D spectra are stored in the centered order k = -n/2+1, ..., n/2,
// i.e. data[p] is the coefficient of frequency k = p - n/2 + 1.
// ---------------------------------------------------------------------------

/// Storage position of centered 1D frequency k in {-n/2+1, ..., n/2}.
inline int freq_pos_1d(int n, int k) { return k + n / 2 - 1; }

/// Centered frequency of storage position p.
inline int freq_of_pos_1d(int n, int p) { return p - n / 2 + 1; }

/// Centered value of a 2D FFT-order index in [0, n), range [-n/2, n/2-1].
inline int centered_freq(int n, int idx) { return idx < (n + 1) / 2 ? idx : idx - n; }

/// Unitary 2D DFT.
inline Image dft2(const Image& img) {
    Image out(img.n);
    detail::fft2_raw(img.data.data(), out.data.data(), img.n, false);
    const double s = 1.0 / img.n;
    for (cdouble& v : out.data) v *= s;
    return out;
}

/// Unitary 2D inverse DFT.
inline Image idft2(const Image& spec) {
    Image out(spec.n);
    detail::fft2_raw(spec.data.data(), out.data.data(), spec.n, true);
    const double s = 1.0 / spec.n;
    for (cdouble& v : out.data) v *= s;
    return out;
}

/// Unitary 1D DFT with centered output order (n must be even).
inline Signal1D dft1(const Signal1D& sig) {
    require(sig.n % 2 == 0, "dft1: n must be even");
    const int n = sig.n;
    std::vector<cdouble> std_order(n);
    detail::fft1_raw(sig.data.data(), std_order.data(), n, false);
    Signal1D out(n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int p = 0; p < n; ++p) {
        const int k = freq_of_pos_1d(n, p);
        out.data[p] = s * std_order[((k % n) + n) % n];
    }
    return out;
}

/// Inverse of dft1.
inline Signal1D idft1(const Signal1D& spec) {
    require(spec.n % 2 == 0, "idft1: n must be even");
    const int n = spec.n;
    std::vector<cdouble> std_order(n);
    for (int p = 0; p < n; ++p) {
        const int k = freq_of_pos_1d(n, p);
        std_order[((k % n) + n) % n] = spec.data[p];
    }
    Signal1D out(n);
    detail::fft1_raw(std_order.data(), out.data.data(), n, true);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (cdouble& v : out.data) v *= s;
    return out;
}

// ---------------------------------------------------------------------------
// Sampling masks.
// ---------------------------------------------------------------------------

inline SamplingMask make_full_mask(int n) {
    return make_mask(n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 1));
}

/// Union of L digital lines through the zero-frequency index at angles
/// k*pi/L, rasterized by rounding samples taken every 0.7 units of arc
/// length to the nearest integer frequency pair. The step width is pinned
/// to the sampling fractions reported for 25/40/80-line masks at 256^2
/// (11%, 17%, 32%); unit steps leave diagonal gaps and land below them.
/// The zero frequency is always retained.
inline SamplingMask make_radial_mask(int n, int lines) {
    require(n >= 2, "make_radial_mask: n must be >= 2");
    require(lines >= 1, "make_radial_mask: need at least one line");
    constexpr double step = 0.7;
    std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(n) * n, 0);
    const double half = n / 2.0;
    for (int l = 0; l < lines; ++l) {
        const double theta = std::numbers::pi * l / lines;
        const double cx = std::cos(theta), cy = std::sin(theta);
        const double reach = half / std::max(std::abs(cx), std::abs(cy));
        const int tmax = static_cast<int>(std::ceil(reach / step));
        for (int t = -tmax; t <= tmax; ++t) {
            const int fi = static_cast<int>(std::lround(step * t * cx));
            const int fj = static_cast<int>(std::lround(step * t * cy));
            if (fi < -n / 2 || fi > n / 2 || fj < -n / 2 || fj > n / 2) continue;
            const int i = ((fi % n) + n) % n;
            const int j = ((fj % n) + n) % n;
            bitmap[static_cast<std::size_t>(i) * n + j] = 1;
        }
    }
    bitmap[0] = 1;  // zero frequency
    return make_mask(n, std::move(bitmap));
}

/// m distinct frequency indices chosen uniformly at random (FFT order).
inline SamplingMask make_random_mask(int n, int m, std::uint64_t seed) {
    require(m >= 1 && m <= n * n, "make_random_mask: m out of range");
    SplitMix64 g(seed);
    std::vector<std::int32_t> pool(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<std::int32_t>(i);
    std::vector<std::uint8_t> bitmap(pool.size(), 0);
    for (int i = 0; i < m; ++i) {
        const std::size_t j = i + uniform_index(g, pool.size() - i);
        std::swap(pool[i], pool[j]);
        bitmap[pool[i]] = 1;
    }
    return make_mask(n, std::move(bitmap));
}

inline Mask1D full_mask_1d(int n) {
    std::vector<int> idx;
    for (int k = -n / 2 + 1; k <= n / 2; ++k) idx.push_back(k);
    return make_mask_1d(n, std::move(idx));
}

/// m distinct centered frequencies chosen uniformly at random from
/// {-n/2+1, ..., n/2}; optionally forces 0 into the mask (Theorem-2 style).
inline Mask1D random_mask_1d(int n, int m, std::uint64_t seed, bool include_zero = false) {
    require(m >= 1 && m <= n, "random_mask_1d: m out of range");
    SplitMix64 g(seed);
    std::vector<int> pool;
    for (int k = -n / 2 + 1; k <= n / 2; ++k) pool.push_back(k);
    std::vector<int> chosen;
    for (int i = 0; i < m; ++i) {
        const std::size_t j = i + uniform_index(g, pool.size() - i);
        std::swap(pool[i], pool[j]);
        chosen.push_back(pool[i]);
    }
    if (include_zero) chosen.push_back(0);
    return make_mask_1d(n, std::move(chosen));
}

// ---------------------------------------------------------------------------
// Subsampled MRI forward operator and its pseudoinverse.
// ---------------------------------------------------------------------------

/// A x = P_mask(F x), entries in the mask's canonical order.
inline MeasurementVector forward(const Image& img, const SamplingMask& mask) {
    require(img.n == mask.n, "forward: image/mask dimension mismatch");
    const Image spec = dft2(img);
    MeasurementVector y(mask.m());
    for (int i = 0; i < mask.m(); ++i) y.data[i] = spec.data[mask.order[i]];
    return y;
}

/// A^dagger y: embeds y into the full spectrum (zeros elsewhere) and inverts.
/// The result is the minimum-norm solution of A z = y, orthogonal to ker A.
inline Image pseudoinverse(const MeasurementVector& y, const SamplingMask& mask) {
    require(y.m == mask.m(), "pseudoinverse: measurement/mask size mismatch");
    Image spec(mask.n);
    for (int i = 0; i < mask.m(); ++i) spec.data[mask.order[i]] = y.data[i];
    return idft2(spec);
}

inline MeasurementVector forward_1d(const Signal1D& sig, const Mask1D& mask) {
    require(sig.n == mask.n, "forward_1d: signal/mask dimension mismatch");
    const Signal1D spec = dft1(sig);
    MeasurementVector y(mask.m());
    for (int i = 0; i < mask.m(); ++i)
        y.data[i] = spec.data[freq_pos_1d(mask.n, mask.retained[i])];
    return y;
}

inline Signal1D pseudoinverse_1d(const MeasurementVector& y, const Mask1D& mask) {
    require(y.m == mask.m(), "pseudoinverse_1d: measurement/mask size mismatch");
    Signal1D spec(mask.n);
    for (int i = 0; i < mask.m(); ++i)
        spec.data[freq_pos_1d(mask.n, mask.retained[i])] = y.data[i];
    return idft1(spec);
}

// ---------------------------------------------------------------------------
// Periodic finite differences. The forward difference convention is
// (grad z)_j = z_j - z_{j-1 mod n}, whose Fourier symbol is 1 - e^{-2 pi i k/n}.
// ---------------------------------------------------------------------------

inline GradientField grad2(const Image& img) {
    const int n = img.n;
    GradientField g(n);
    for (int i = 0; i < n; ++i) {
        const int im1 = i == 0 ? n - 1 : i - 1;
        for (int j = 0; j < n; ++j) {
            const int jm1 = j == 0 ? n - 1 : j - 1;
            g.dx[static_cast<std::size_t>(i) * n + j] = img.at(i, j) - img.at(i, jm1);
            g.dy[static_cast<std::size_t>(i) * n + j] = img.at(i, j) - img.at(im1, j);
        }
    }
    return g;
}

inline Image grad2_adjoint(const GradientField& g) {
    const int n = g.n;
    Image out(n);
    for (int i = 0; i < n; ++i) {
        const int ip1 = i == n - 1 ? 0 : i + 1;
        for (int j = 0; j < n; ++j) {
            const int jp1 = j == n - 1 ? 0 : j + 1;
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            out.data[idx] = g.dx[idx] - g.dx[static_cast<std::size_t>(i) * n + jp1] +
                            g.dy[idx] - g.dy[static_cast<std::size_t>(ip1) * n + j];
        }
    }
    return out;
}

inline Signal1D grad1(const Signal1D& sig) {
    const int n = sig.n;
    Signal1D out(n);
    for (int j = 0; j < n; ++j)
        out.data[j] = sig.data[j] - sig.data[j == 0 ? n - 1 : j - 1];
    return out;
}

inline Signal1D grad1_adjoint(const Signal1D& g) {
    const int n = g.n;
    Signal1D out(n);
    for (int j = 0; j < n; ++j)
        out.data[j] = g.data[j] - g.data[j == n - 1 ? 0 : j + 1];
    return out;
}

/// Fourier symbol of the periodic difference operator: 1 - e^{-2 pi i k / n}.
inline cdouble diff_symbol(int n, int k) {
    const double ang = -2.0 * std::numbers::pi * k / n;
    return cdouble(1.0, 0.0) - cdouble(std::cos(ang), std::sin(ang));
}

/// |diff symbol|^2 = 4 sin^2(pi k / n); valid for FFT-order or centered k.
inline double diff_symbol_sq(int n, int k) {
    const double s = std::sin(std::numbers::pi * k / n);
    return 4.0 * s * s;
}

}  // namespace advmri

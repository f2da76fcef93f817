#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace advmri {

using cdouble = std::complex<double>;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// n x n complex image, row-major. Phantoms are real-valued in [0, 1];
/// reconstructions are generally complex.
struct Image {
    int n = 0;
    std::vector<cdouble> data;

    Image() = default;
    explicit Image(int side) : n(side), data(static_cast<std::size_t>(side) * side) {
        require(side > 0, "Image: side must be positive");
    }

    cdouble& at(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
    const cdouble& at(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
    std::size_t size() const { return data.size(); }
};

/// Set of retained 2D frequency indices in standard FFT order. `order` lists
/// the retained indices by row-major scan of the bitmap and fixes the layout
/// of every measurement vector built from this mask.
struct SamplingMask {
    int n = 0;
    std::vector<std::uint8_t> retained;   // n*n bitmap
    std::vector<std::int32_t> order;      // flat indices, row-major scan

    int m() const { return static_cast<int>(order.size()); }
};

inline SamplingMask make_mask(int n, std::vector<std::uint8_t> bitmap) {
    require(n > 0, "make_mask: n must be positive");
    require(bitmap.size() == static_cast<std::size_t>(n) * n, "make_mask: bitmap size != n*n");
    SamplingMask mask;
    mask.n = n;
    mask.retained = std::move(bitmap);
    for (std::size_t idx = 0; idx < mask.retained.size(); ++idx)
        if (mask.retained[idx]) mask.order.push_back(static_cast<std::int32_t>(idx));
    require(!mask.order.empty(), "make_mask: mask retains no frequencies");
    return mask;
}

/// Length-m complex k-space samples, ordered by the originating mask's order.
struct MeasurementVector {
    int m = 0;
    std::vector<cdouble> data;

    MeasurementVector() = default;
    explicit MeasurementVector(int count) : m(count), data(static_cast<std::size_t>(count)) {
        require(count > 0, "MeasurementVector: m must be positive");
    }
};

/// Periodic finite differences of an image; dx holds horizontal (along-row)
/// differences, dy vertical ones. Entries of each component sum to zero.
struct GradientField {
    int n = 0;
    std::vector<cdouble> dx, dy;

    GradientField() = default;
    explicit GradientField(int side)
        : n(side),
          dx(static_cast<std::size_t>(side) * side),
          dy(static_cast<std::size_t>(side) * side) {}
};

/// 1D complex signal of even length (the §-theory experiments).
struct Signal1D {
    int n = 0;
    std::vector<cdouble> data;

    Signal1D() = default;
    explicit Signal1D(int len) : n(len), data(static_cast<std::size_t>(len)) {
        require(len > 0, "Signal1D: n must be positive");
    }
};

/// 1D sampling mask: retained centered frequencies, each in {-n/2+1, ..., n/2},
/// stored sorted ascending (the canonical measurement order).
struct Mask1D {
    int n = 0;
    std::vector<int> retained;

    int m() const { return static_cast<int>(retained.size()); }
};

inline Mask1D make_mask_1d(int n, std::vector<int> indices) {
    require(n >= 2 && n % 2 == 0, "make_mask_1d: n must be even and >= 2");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    require(!indices.empty(), "make_mask_1d: mask retains no frequencies");
    for (int k : indices)
        require(k > -n / 2 && k <= n / 2, "make_mask_1d: index outside {-n/2+1, ..., n/2}");
    return Mask1D{n, std::move(indices)};
}

// ---- norms ------------------------------------------------------------

inline double sqr_abs(cdouble v) {
    return v.real() * v.real() + v.imag() * v.imag();
}

inline double l2_norm(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (cdouble x : v) s += sqr_abs(x);
    return std::sqrt(s);
}

inline double linf_norm(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (cdouble x : v) s = std::max(s, sqr_abs(x));
    return std::sqrt(s);
}

inline double l1_norm(const std::vector<cdouble>& v) {
    double s = 0.0;
    for (cdouble x : v) s += std::abs(x);
    return s;
}

inline double l2_norm(const Image& img) { return l2_norm(img.data); }
inline double linf_norm(const Image& img) { return linf_norm(img.data); }
inline double l2_norm(const MeasurementVector& y) { return l2_norm(y.data); }
inline double l2_norm(const Signal1D& s) { return l2_norm(s.data); }
inline double linf_norm(const Signal1D& s) { return linf_norm(s.data); }
inline double l1_norm(const Signal1D& s) { return l1_norm(s.data); }

inline double l2_norm(const GradientField& g) {
    double s = 0.0;
    for (cdouble x : g.dx) s += sqr_abs(x);
    for (cdouble x : g.dy) s += sqr_abs(x);
    return std::sqrt(s);
}

/// Anisotropic l1-norm of a gradient field: sum of |dx| + |dy|.
inline double l1_norm(const GradientField& g) {
    return l1_norm(g.dx) + l1_norm(g.dy);
}

/// <a, b> = sum a_i * conj(b_i)
inline cdouble inner(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    require(a.size() == b.size(), "inner: size mismatch");
    cdouble s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

inline cdouble inner(const Image& a, const Image& b) { return inner(a.data, b.data); }

inline cdouble inner(const GradientField& a, const GradientField& b) {
    return inner(a.dx, b.dx) + inner(a.dy, b.dy);
}

}  // namespace advmri

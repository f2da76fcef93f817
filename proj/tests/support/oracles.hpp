#pragma once

// Independent reference implementations used by the test suites. Everything
// here is written straight from the defining formulas (direct double sums,
// scalar loops) and deliberately avoids the library's FFT-based code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "advmri/transforms.hpp"
#include "advmri/types.hpp"

namespace oracle {

using advmri::cdouble;
using advmri::Image;
using advmri::Mask1D;
using advmri::MeasurementVector;
using advmri::SamplingMask;
using advmri::Signal1D;

inline cdouble cis(double ang) { return {std::cos(ang), std::sin(ang)}; }

/// Unitary 2D DFT by direct O(n^4) summation.
inline Image dft2_direct(const Image& img, bool inverse = false) {
    const int n = img.n;
    const double sign = inverse ? 1.0 : -1.0;
    Image out(n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            cdouble acc = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    acc += img.at(a, b) *
                           cis(sign * 2.0 * std::numbers::pi * (static_cast<double>(k) * a + static_cast<double>(l) * b) / n);
            out.at(k, l) = acc / static_cast<double>(n);
        }
    }
    return out;
}

/// Unitary centered 1D DFT by direct O(n^2) summation; out[p] holds
/// frequency k = p - n/2 + 1.
inline Signal1D dft1_direct(const Signal1D& sig) {
    const int n = sig.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Signal1D out(n);
    for (int p = 0; p < n; ++p) {
        const int k = p - n / 2 + 1;
        cdouble acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += sig.data[j] * cis(-2.0 * std::numbers::pi * k * j / n);
        out.data[p] = scale * acc;
    }
    return out;
}

/// Inverse of dft1_direct (input in centered frequency order).
inline Signal1D idft1_direct(const Signal1D& spec) {
    const int n = spec.n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Signal1D out(n);
    for (int j = 0; j < n; ++j) {
        cdouble acc = 0.0;
        for (int p = 0; p < n; ++p) {
            const int k = p - n / 2 + 1;
            acc += spec.data[p] * cis(2.0 * std::numbers::pi * k * j / n);
        }
        out.data[j] = scale * acc;
    }
    return out;
}

/// Straight-line reimplementation of the unrolled TV-ADMM reconstruction,
/// built on the direct DFT above. Used as an independent oracle for the
/// attack objective.
inline Image tv_admm_direct(const MeasurementVector& y, const SamplingMask& mask, double lambda,
                            double tau, int iterations) {
    const int n = mask.n;
    const std::size_t nn = static_cast<std::size_t>(n) * n;

    auto fwd = [&](const Image& img) { return dft2_direct(img, false); };
    auto bwd = [&](const Image& spec) { return dft2_direct(spec, true); };

    // 2 A* y
    Image emb(n);
    for (int i = 0; i < mask.m(); ++i) emb.data[mask.order[i]] = y.data[i];
    Image b = bwd(emb);
    for (cdouble& v : b.data) v *= 2.0;

    std::vector<double> denom(nn);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cdouble di = cdouble(1.0, 0.0) - cis(-2.0 * std::numbers::pi * i / n);
            const cdouble dj = cdouble(1.0, 0.0) - cis(-2.0 * std::numbers::pi * j / n);
            denom[static_cast<std::size_t>(i) * n + j] =
                2.0 * mask.retained[static_cast<std::size_t>(i) * n + j] +
                tau * (std::norm(di) + std::norm(dj));
        }

    auto grad = [&](const Image& z, std::vector<cdouble>& gx, std::vector<cdouble>& gy) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * n + j;
                gx[idx] = z.at(i, j) - z.at(i, (j + n - 1) % n);
                gy[idx] = z.at(i, j) - z.at((i + n - 1) % n, j);
            }
    };
    auto div_adj = [&](const std::vector<cdouble>& gx, const std::vector<cdouble>& gy) {
        Image out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.at(i, j) = gx[static_cast<std::size_t>(i) * n + j] -
                               gx[static_cast<std::size_t>(i) * n + (j + 1) % n] +
                               gy[static_cast<std::size_t>(i) * n + j] -
                               gy[static_cast<std::size_t>((i + 1) % n) * n + j];
        return out;
    };
    auto soft = [](cdouble v, double t) {
        const double mag = std::abs(v);
        if (mag <= t) return cdouble(0.0, 0.0);
        return v * ((mag - t) / mag);
    };

    const double thresh = lambda / tau;
    Image z(n);
    std::vector<cdouble> wx(nn), wy(nn), ux(nn), uy(nn), px(nn), py(nn);
    for (int it = 0; it < iterations; ++it) {
        std::vector<cdouble> vx(nn), vy(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            vx[i] = wx[i] - ux[i];
            vy[i] = wy[i] - uy[i];
        }
        Image rhs = div_adj(vx, vy);
        for (std::size_t i = 0; i < nn; ++i) rhs.data[i] = b.data[i] + tau * rhs.data[i];
        Image spec = fwd(rhs);
        for (std::size_t i = 0; i < nn; ++i)
            spec.data[i] = denom[i] > 0.0 ? spec.data[i] / denom[i] : cdouble(0.0, 0.0);
        z = bwd(spec);
        grad(z, px, py);
        for (std::size_t i = 0; i < nn; ++i) {
            px[i] += ux[i];
            py[i] += uy[i];
            wx[i] = soft(px[i], thresh);
            wy[i] = soft(py[i], thresh);
            ux[i] = px[i] - wx[i];
            uy[i] = py[i] - wy[i];
        }
    }
    return z;
}

/// Direct equality-constrained TV solver in 1D:
/// min ||grad z||_1 s.t. A z = y, by ADMM with the splitting w = grad z and
/// an exact constrained least-squares z-step in the Fourier basis. This is
/// an independent algorithmic route from the integrate-the-gradient
/// reduction (the transforms themselves are the library's, which are
/// oracle-checked separately). Requires 0 in the mask so the mean is pinned.
inline Signal1D tv_eq_direct(const MeasurementVector& y, const Mask1D& mask, double tol = 1e-9,
                             int max_iterations = 200000) {
    const int n = mask.n;

    auto dft = [&](const Signal1D& s) { return advmri::dft1(s); };
    auto idft = [&](const Signal1D& spec) { return advmri::idft1(spec); };

    std::vector<bool> on_mask(n, false);
    for (int k : mask.retained) on_mask[k + n / 2 - 1] = true;
    std::vector<cdouble> pinned(n, cdouble(0, 0));
    for (int i = 0; i < mask.m(); ++i) pinned[mask.retained[i] + n / 2 - 1] = y.data[i];

    std::vector<cdouble> dsym(n);
    for (int p = 0; p < n; ++p) {
        const int k = p - n / 2 + 1;
        dsym[p] = cdouble(1.0, 0.0) - cis(-2.0 * std::numbers::pi * k / n);
    }

    auto grad = [&](const Signal1D& z) {
        Signal1D g(n);
        for (int j = 0; j < n; ++j) g.data[j] = z.data[j] - z.data[(j + n - 1) % n];
        return g;
    };
    auto soft = [](cdouble v, double t) {
        const double mag = std::abs(v);
        if (mag <= t) return cdouble(0.0, 0.0);
        return v * ((mag - t) / mag);
    };

    // data scale for the coupling parameter and the stopping rule
    double scale = 0.0;
    {
        Signal1D spec(n);
        for (int p = 0; p < n; ++p) spec.data[p] = pinned[p];
        const Signal1D zf = idft(spec);
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(zf.data[j]));
    }
    if (scale == 0.0) {
        Signal1D z(n);
        return z;  // y = 0: zero is feasible with zero TV
    }
    const double thresh = scale;  // = 1/tau

    Signal1D z(n), w(n), u(n);
    for (int it = 0; it < max_iterations; ++it) {
        // z-step: min ||grad z - (w - u)||^2 s.t. on-mask spectrum pinned
        Signal1D v(n);
        for (int j = 0; j < n; ++j) v.data[j] = w.data[j] - u.data[j];
        Signal1D vspec = dft(v);
        Signal1D zspec(n);
        for (int p = 0; p < n; ++p) {
            if (on_mask[p])
                zspec.data[p] = pinned[p];
            else if (std::norm(dsym[p]) > 0.0)
                zspec.data[p] = std::conj(dsym[p]) * vspec.data[p] / std::norm(dsym[p]);
            else
                zspec.data[p] = 0.0;
        }
        z = idft(zspec);

        const Signal1D gz = grad(z);
        double primal = 0.0, dual = 0.0, sc = 0.0;
        for (int j = 0; j < n; ++j) {
            const cdouble prev = w.data[j];
            w.data[j] = soft(gz.data[j] + u.data[j], thresh);
            u.data[j] += gz.data[j] - w.data[j];
            primal += std::norm(gz.data[j] - w.data[j]);
            dual += std::norm(w.data[j] - prev);
            sc = std::max(sc, std::max(std::abs(w.data[j]), std::abs(gz.data[j])));
        }
        if (std::sqrt(primal) <= tol * std::max(sc, 1e-30) * std::sqrt(static_cast<double>(n)) &&
            std::sqrt(dual) / thresh <=
                tol * std::max(sc, 1e-30) * std::sqrt(static_cast<double>(n)))
            break;
    }
    return z;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace oracle

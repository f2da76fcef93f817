#pragma once

#include <limits>
#include <optional>
#include <utility>

#include "advmri/parallel.hpp"
#include "advmri/transforms.hpp"

namespace advmri {

/// Proximal map of t * |.| on the complex plane: shrinks the modulus by t,
/// preserving the phase; zero inside the dead zone |v| <= t.
inline cdouble soft_threshold(cdouble v, double t) {
    require(t >= 0.0, "soft_threshold: threshold must be nonnegative");
    if (t == 0.0) return v;
    const double mag = std::sqrt(sqr_abs(v));
    if (mag <= t) return cdouble(0.0, 0.0);
    const double scale = (mag - t) / mag;
    return v * scale;
}

struct ReconConfig {
    double lambda = 1e-2;          // TV weight in Eq. (3)
    double penalty = 1e-2;         // ADMM coupling parameter
    int iterations = 200;          // fixed unroll length
    std::optional<Image> warm_start;
};

namespace detail {

// Fixed-length ADMM for  min_z ||A z - y||_2^2 + lambda ||grad z||_1  with
// the splitting w = grad z:
//   z-step:  (2 A*A + tau grad*grad) z = 2 A* y + tau grad*(w - u),
//            solved exactly in the Fourier basis (both operators diagonal),
//   w-step:  w = soft(grad z + u, lambda / tau)   (anisotropic),
//   u-step:  u <- u + grad z - w.
// The iteration count is fixed rather than residual-based so the attack can
// differentiate through a well-defined computation graph.
//
// run() optionally records the soft-threshold inputs p_t = grad z_t + u_{t-1}
// per iteration; vjp() replays them to pull a cotangent on the output image
// back to a cotangent on the measurement vector (Wirtinger convention:
// for a real objective J, the returned g satisfies dJ = Re<de, g>).
struct TvUnrolled {
    const SamplingMask* mask;
    double lambda, tau;
    int iterations;
    std::vector<double> denom;  // 2*mask + tau*(grad symbol)^2, FFT order

    TvUnrolled(const SamplingMask& msk, double lam, double pen, int iters)
        : mask(&msk), lambda(lam), tau(pen), iterations(iters) {
        require(lam >= 0.0, "TvUnrolled: lambda must be >= 0");
        require(pen > 0.0, "TvUnrolled: penalty must be positive");
        require(iters >= 1, "TvUnrolled: need at least one iteration");
        const int n = msk.n;
        denom.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            const double gi = diff_symbol_sq(n, i);
            for (int j = 0; j < n; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * n + j;
                denom[idx] = 2.0 * msk.retained[idx] + tau * (gi + diff_symbol_sq(n, j));
            }
        }
    }

    // Applies (2 A*A + tau grad*grad)^{-1}; frequencies where the operator is
    // singular (zero frequency off-mask) are projected out, which matches the
    // minimum-norm solution since the right-hand side vanishes there too.
    Image solve(const Image& rhs) const {
        Image spec = dft2(rhs);
        for (std::size_t idx = 0; idx < spec.data.size(); ++idx)
            spec.data[idx] = denom[idx] > 0.0 ? spec.data[idx] / denom[idx] : cdouble(0.0, 0.0);
        return idft2(spec);
    }

    /// Runs the fixed ADMM iteration. `tape`, when non-null, receives the
    /// per-iteration soft-threshold inputs. `kink_distance`, when non-null,
    /// receives min_t,i | |p_t,i| - lambda/tau |.
    Image run(const MeasurementVector& y, const Image* warm = nullptr,
              std::vector<GradientField>* tape = nullptr,
              double* kink_distance = nullptr) const {
        require(y.m == mask->m(), "TvUnrolled::run: measurement size mismatch");
        const int n = mask->n;
        const double thresh = tau > 0.0 ? lambda / tau : 0.0;

        // b = 2 A* y, constant across iterations
        Image b = pseudoinverse(y, *mask);
        for (cdouble& v : b.data) v *= 2.0;

        Image z(n);
        GradientField w(n), u(n);
        if (warm) {
            require(warm->n == n, "TvUnrolled::run: warm start dimension mismatch");
            z = *warm;
            w = grad2(z);
        }
        if (tape) {
            tape->clear();
            tape->reserve(iterations);
        }
        if (kink_distance) *kink_distance = std::numeric_limits<double>::infinity();

        for (int it = 0; it < iterations; ++it) {
            // z-step
            GradientField wu(n);
            for (std::size_t i = 0; i < w.dx.size(); ++i) {
                wu.dx[i] = w.dx[i] - u.dx[i];
                wu.dy[i] = w.dy[i] - u.dy[i];
            }
            Image rhs = grad2_adjoint(wu);
            for (std::size_t i = 0; i < rhs.data.size(); ++i)
                rhs.data[i] = b.data[i] + tau * rhs.data[i];
            z = solve(rhs);

            // w-step on p = grad z + u, then dual step u = p - w
            GradientField p = grad2(z);
            for (std::size_t i = 0; i < p.dx.size(); ++i) {
                p.dx[i] += u.dx[i];
                p.dy[i] += u.dy[i];
            }
            if (kink_distance) {
                for (cdouble v : p.dx)
                    *kink_distance = std::min(*kink_distance,
                                              std::abs(std::sqrt(sqr_abs(v)) - thresh));
                for (cdouble v : p.dy)
                    *kink_distance = std::min(*kink_distance,
                                              std::abs(std::sqrt(sqr_abs(v)) - thresh));
            }
            if (tape) tape->push_back(p);
            for (std::size_t i = 0; i < p.dx.size(); ++i) {
                w.dx[i] = soft_threshold(p.dx[i], thresh);
                w.dy[i] = soft_threshold(p.dy[i], thresh);
                u.dx[i] = p.dx[i] - w.dx[i];
                u.dy[i] = p.dy[i] - w.dy[i];
            }
        }
        return z;
    }

    // Real-Jacobian adjoint of the soft threshold at v (the Jacobian is
    // symmetric, so adjoint = Jacobian). Zero on the dead zone and at the
    // kink; identity when the threshold is zero.
    static cdouble soft_vjp(cdouble v, double t, cdouble cot) {
        if (t <= 0.0) return cot;
        const double mag = std::sqrt(sqr_abs(v));
        if (mag <= t) return cdouble(0.0, 0.0);
        const double proj = v.real() * cot.real() + v.imag() * cot.imag();
        return (1.0 - t / mag) * cot + (t * proj / (mag * mag * mag)) * v;
    }

    /// Pulls the output cotangent zbar back through the recorded iterations
    /// to the measurement input. tape must come from run() on this instance.
    MeasurementVector vjp(const std::vector<GradientField>& tape, const Image& zbar) const {
        require(static_cast<int>(tape.size()) == iterations, "TvUnrolled::vjp: tape length mismatch");
        const int n = mask->n;
        const double thresh = tau > 0.0 ? lambda / tau : 0.0;

        GradientField wbar(n), ubar(n);
        Image bbar(n);
        for (int it = iterations - 1; it >= 0; --it) {
            Image zb(n);
            if (it == iterations - 1) {
                // final iterate feeds the objective only
                zb = zbar;
            } else {
                const GradientField& p = tape[it];
                GradientField pbar(n);
                for (std::size_t i = 0; i < pbar.dx.size(); ++i) {
                    // u_t = p_t - w_t and w_t = soft(p_t)
                    const cdouble wx = wbar.dx[i] - ubar.dx[i];
                    const cdouble wy = wbar.dy[i] - ubar.dy[i];
                    pbar.dx[i] = ubar.dx[i] + soft_vjp(p.dx[i], thresh, wx);
                    pbar.dy[i] = ubar.dy[i] + soft_vjp(p.dy[i], thresh, wy);
                }
                zb = grad2_adjoint(pbar);  // p_t = grad z_t + u_{t-1}
                ubar = pbar;
            }
            const Image rbar = solve(zb);  // the diagonal solve is self-adjoint
            for (std::size_t i = 0; i < bbar.data.size(); ++i) bbar.data[i] += rbar.data[i];
            const GradientField gb = grad2(rbar);  // adjoint of tau * grad2_adjoint
            if (it == iterations - 1) {
                for (std::size_t i = 0; i < wbar.dx.size(); ++i) {
                    wbar.dx[i] = tau * gb.dx[i];
                    wbar.dy[i] = tau * gb.dy[i];
                    ubar.dx[i] = -tau * gb.dx[i];
                    ubar.dy[i] = -tau * gb.dy[i];
                }
            } else {
                for (std::size_t i = 0; i < wbar.dx.size(); ++i) {
                    const cdouble gx = tau * gb.dx[i];
                    const cdouble gy = tau * gb.dy[i];
                    wbar.dx[i] = gx;
                    wbar.dy[i] = gy;
                    ubar.dx[i] -= gx;
                    ubar.dy[i] -= gy;
                }
            }
        }
        // b = 2 A* (y + e)  =>  ebar = 2 A bbar
        const MeasurementVector eb = forward(bbar, *mask);
        MeasurementVector out(mask->m());
        for (int i = 0; i < out.m; ++i) out.data[i] = 2.0 * eb.data[i];
        return out;
    }
};

}  // namespace detail

/// TV-regularized reconstruction: runs exactly cfg.iterations ADMM steps of
/// the splitting above and returns the final iterate. Deterministic.
inline Image reconstruct_tv(const MeasurementVector& y, const SamplingMask& mask,
                            const ReconConfig& cfg) {
    require(cfg.lambda > 0.0, "reconstruct_tv: lambda must be positive");
    require(cfg.penalty > 0.0, "reconstruct_tv: penalty must be positive");
    require(cfg.iterations >= 1, "reconstruct_tv: iterations must be >= 1");
    const detail::TvUnrolled solver(mask, cfg.lambda, cfg.penalty, cfg.iterations);
    const Image* warm = cfg.warm_start ? &*cfg.warm_start : nullptr;
    return solver.run(y, warm);
}

/// Value of the Eq.-(3) objective ||A z - y||^2 + lambda ||grad z||_1.
inline double tv_objective(const Image& z, const MeasurementVector& y,
                           const SamplingMask& mask, double lambda) {
    const MeasurementVector az = forward(z, mask);
    double fid = 0.0;
    for (int i = 0; i < y.m; ++i) fid += sqr_abs(az.data[i] - y.data[i]);
    return fid + lambda * l1_norm(grad2(z));
}

struct CalibrationReport {
    std::vector<std::pair<double, double>> grid;  // (lambda, penalty)
    std::vector<double> scores;                   // mean relative l2 error
    std::pair<double, double> chosen;
    double noise_level = 0.0;
};

/// Default search grid: 8 log-spaced lambdas spanning [1e-4, 1] times the
/// per-pixel measurement scale, each with penalty in {0.1, 1, 10} * lambda.
inline std::vector<std::pair<double, double>> default_calibration_grid(double y_norm, int n) {
    const double scale = y_norm / n;
    std::vector<std::pair<double, double>> grid;
    for (int i = 0; i < 8; ++i) {
        const double lam = scale * std::pow(10.0, -4.0 + 4.0 * i / 7.0);
        for (double f : {0.1, 1.0, 10.0}) grid.emplace_back(lam, f * lam);
    }
    return grid;
}

/// Grid search for (lambda, penalty): adds seeded complex Gaussian noise of
/// the given relative l2 level to each sample's measurements, reconstructs,
/// and scores by mean relative l2 error against the sample. The same noise
/// draw is reused across grid points so the comparison is paired. Ties break
/// toward smaller lambda, then smaller penalty.
inline CalibrationReport calibrate(const std::vector<Image>& samples, const SamplingMask& mask,
                                   double noise_level,
                                   const std::vector<std::pair<double, double>>& grid,
                                   std::uint64_t seed, int iterations = 200, int threads = 1) {
    require(!samples.empty(), "calibrate: need at least one sample");
    require(!grid.empty(), "calibrate: need a nonempty grid");
    require(noise_level >= 0.0, "calibrate: noise level must be >= 0");

    struct Case {
        MeasurementVector y;
        double x_norm;
    };
    std::vector<Case> cases;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        require(samples[s].n == mask.n, "calibrate: sample dimension mismatch");
        MeasurementVector y = forward(samples[s], mask);
        if (noise_level > 0.0) {
            SplitMix64 g(seed_mix(seed, s));
            MeasurementVector noise(y.m);
            for (cdouble& v : noise.data) v = complex_normal(g);
            const double target = noise_level * l2_norm(y);
            const double nn = l2_norm(noise);
            if (nn > 0.0)
                for (int i = 0; i < y.m; ++i) y.data[i] += noise.data[i] * (target / nn);
        }
        cases.push_back({std::move(y), l2_norm(samples[s])});
    }

    CalibrationReport report;
    report.grid = grid;
    report.scores.assign(grid.size(), 0.0);
    report.noise_level = noise_level;

    parallel_for(grid.size(), threads, [&](std::size_t gi) {
        const auto [lam, pen] = grid[gi];
        double total = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const Image z = reconstruct_tv(cases[s].y, mask, {lam, pen, iterations, {}});
            double err = 0.0;
            for (std::size_t i = 0; i < z.data.size(); ++i)
                err += sqr_abs(z.data[i] - samples[s].data[i]);
            total += std::sqrt(err) / cases[s].x_norm;
        }
        report.scores[gi] = total / static_cast<double>(samples.size());
    });

    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        const auto& [lam, pen] = grid[gi];
        const auto& [blam, bpen] = grid[best];
        const auto key = std::tuple{report.scores[gi], lam, pen};
        const auto bkey = std::tuple{report.scores[best], blam, bpen};
        if (key < bkey) best = gi;
    }
    report.chosen = grid[best];
    return report;
}

}  // namespace advmri

#pragma once

#include "advmri/parallel.hpp"
#include "advmri/phantoms.hpp"
#include "advmri/transforms.hpp"
#include "advmri/tv.hpp"

namespace advmri {

// Constructive 1D counterparts of the 2D attack: the spike perturbation,
// equality-constrained l1/TV recovery, Monte Carlo validation of the exact
// recovery regime, and the sparse-artifact amplification bound.

/// The spike perturbation e = A(delta) = (1/sqrt(n))_{k in mask} together
/// with its image representation r = A^dagger e and amplification
/// alpha = 1 / ||r||_inf. Satisfies ||r||_2 = sqrt(m/n), ||r||_inf <= m/n
/// and alpha >= n/m; these identities are checked on construction.
struct SpikeAttack1D {
    int n = 0;
    Mask1D mask;
    MeasurementVector e;
    Signal1D r;
    double alpha = 0.0;
};

inline SpikeAttack1D spike_attack(const Mask1D& mask) {
    const int n = mask.n;
    const int m = mask.m();
    SpikeAttack1D out;
    out.n = n;
    out.mask = mask;
    out.e = MeasurementVector(m);
    const cdouble amp(1.0 / std::sqrt(static_cast<double>(n)), 0.0);
    for (cdouble& v : out.e.data) v = amp;
    out.r = pseudoinverse_1d(out.e, mask);
    const double r_inf = linf_norm(out.r);
    out.alpha = 1.0 / r_inf;

    const double ratio = static_cast<double>(m) / n;
    if (std::abs(l2_norm(out.r) - std::sqrt(ratio)) > 1e-12)
        throw std::logic_error("spike_attack: ||r||_2 != sqrt(m/n)");
    if (r_inf > ratio + 1e-12)
        throw std::logic_error("spike_attack: ||r||_inf exceeds m/n");
    if (out.alpha < (static_cast<double>(n) / m) * (1.0 - 1e-12))
        throw std::logic_error("spike_attack: alpha below the subsampling factor");
    return out;
}

struct EqSolve1D {
    Signal1D z;
    bool converged = false;
    int iterations = 0;
};

/// Equality-constrained basis pursuit  min ||z||_1  s.t.  A z = y  over
/// complex signals, by ADMM with the splitting z = w. The z-step is the
/// exact projection onto the affine constraint (replace the on-mask Fourier
/// coefficients), the w-step a complex soft threshold. The coupling
/// parameter adapts to the data scale, which makes the iteration exactly
/// scale-equivariant. Returns the feasible z-iterate.
inline EqSolve1D l1_min_eq(const MeasurementVector& y, const Mask1D& mask,
                           double tol = 1e-8, int max_iterations = 50000) {
    require(y.m == mask.m(), "l1_min_eq: measurement/mask size mismatch");
    const int n = mask.n;

    // affine projection: keep v's off-mask spectrum, pin on-mask values to y
    const auto project = [&](const Signal1D& v) {
        Signal1D spec = dft1(v);
        for (int i = 0; i < mask.m(); ++i)
            spec.data[freq_pos_1d(n, mask.retained[i])] = y.data[i];
        return idft1(spec);
    };

    EqSolve1D out;
    const double scale = linf_norm(pseudoinverse_1d(y, mask));
    if (scale == 0.0) {  // y = 0: zero is feasible and l1-minimal
        out.z = Signal1D(n);
        out.converged = true;
        return out;
    }
    const double thresh = scale;  // = 1/tau

    Signal1D w(n), u(n), z(n);
    for (int it = 1; it <= max_iterations; ++it) {
        Signal1D wu(n);
        for (int j = 0; j < n; ++j) wu.data[j] = w.data[j] - u.data[j];
        z = project(wu);

        double dual_sq = 0.0, primal_sq = 0.0, znorm_sq = 0.0, wnorm_sq = 0.0;
        for (int j = 0; j < n; ++j) {
            const cdouble prev = w.data[j];
            w.data[j] = soft_threshold(z.data[j] + u.data[j], thresh);
            u.data[j] += z.data[j] - w.data[j];
            dual_sq += sqr_abs(w.data[j] - prev);
            primal_sq += sqr_abs(z.data[j] - w.data[j]);
            znorm_sq += sqr_abs(z.data[j]);
            wnorm_sq += sqr_abs(w.data[j]);
        }
        out.iterations = it;
        const double sc = std::sqrt(std::max(znorm_sq, wnorm_sq));
        if (std::sqrt(primal_sq) <= tol * sc && std::sqrt(dual_sq) / thresh <= tol * sc) {
            out.converged = true;
            break;
        }
    }
    out.z = std::move(z);
    return out;
}

/// Equality-constrained TV minimization  min ||grad z||_1  s.t.  A z = y,
/// via the reduction to basis pursuit: the measurement of grad x at
/// frequency k equals (1 - e^{-2 pi i k/n}) times the measurement of x, so
/// the gradient is recovered by l1_min_eq on transformed data, integrated,
/// and pinned to the correct mean using the k = 0 measurement. Requires
/// 0 in the mask.
inline EqSolve1D tv_min_eq(const MeasurementVector& y, const Mask1D& mask,
                           double tol = 1e-8, int max_iterations = 50000) {
    require(y.m == mask.m(), "tv_min_eq: measurement/mask size mismatch");
    const int n = mask.n;
    int zero_pos = -1;
    for (int i = 0; i < mask.m(); ++i)
        if (mask.retained[i] == 0) zero_pos = i;
    require(zero_pos >= 0, "tv_min_eq: mask must contain the zero frequency");

    MeasurementVector grad_y(y.m);
    for (int i = 0; i < y.m; ++i)
        grad_y.data[i] = diff_symbol(n, mask.retained[i]) * y.data[i];

    EqSolve1D sub = l1_min_eq(grad_y, mask, tol, max_iterations);

    // integrate: z_j = t + sum_{l<=j} w_l, then fix t from the mean
    // constraint sum_j z_j = sqrt(n) * y_0
    Signal1D z(n);
    cdouble csum = 0.0, total = 0.0;
    for (int j = 1; j < n; ++j) {
        csum += sub.z.data[j];
        z.data[j] = csum;
        total += csum;
    }
    const cdouble t = (std::sqrt(static_cast<double>(n)) * y.data[zero_pos] - total) /
                      static_cast<double>(n);
    for (int j = 0; j < n; ++j) z.data[j] += t;

    sub.z = std::move(z);
    return sub;
}

enum class RecoveryMode { L1, TV };

struct RecoveryTrial {
    int n = 128;
    int s = 3;
    int m = 40;
    int trials = 100;
    double failure_tolerance = 1e-3;  // l-infinity recovery threshold
    RecoveryMode mode = RecoveryMode::L1;
    std::uint64_t seed = 0;
    double min_magnitude = 0.5;
};

struct RecoveryOutcome {
    double rate = 0.0;         // clean-signal recovery rate
    double spiked_rate = 0.0;  // recovery rate for x + delta
    int trials = 0;
    int solver_failures = 0;   // iteration cap hit before tolerance
};

/// Empirical validation of the exact-recovery regime: draws seeded signals
/// and uniform-random masks, solves the equality-constrained program, and
/// scores recovery by l-infinity error. Each trial also solves for the
/// spiked signal x + delta, whose sparsity is one (l1) or two (TV) higher,
/// confirming that the recovery guarantee transports the spike artifact.
inline RecoveryOutcome recovery_experiment(const RecoveryTrial& trial, int threads = 1) {
    require(trial.trials >= 1, "recovery_experiment: need at least one trial");
    require(trial.m >= 1 && trial.m <= trial.n, "recovery_experiment: m out of range");

    struct TrialResult {
        bool clean = false, spiked = false;
        int failures = 0;
    };
    std::vector<TrialResult> results(trial.trials);

    parallel_for(trial.trials, threads, [&](std::size_t t) {
        const std::uint64_t seed_t = seed_mix(trial.seed, t);
        SparseSpec1D sig_spec;
        sig_spec.n = trial.n;
        sig_spec.s = trial.s;
        sig_spec.mode = trial.mode == RecoveryMode::L1 ? SparseMode::SpikeTrain
                                                       : SparseMode::PiecewiseConstant;
        sig_spec.min_magnitude = trial.min_magnitude;
        sig_spec.seed = seed_mix(seed_t, 1);
        const Signal1D x = gen_signal_1d(sig_spec);
        const Mask1D mask = random_mask_1d(trial.n, trial.m, seed_mix(seed_t, 2),
                                           trial.mode == RecoveryMode::TV);

        const auto solve = [&](const Signal1D& truth) {
            const MeasurementVector y = forward_1d(truth, mask);
            const EqSolve1D sol = trial.mode == RecoveryMode::L1 ? l1_min_eq(y, mask)
                                                                 : tv_min_eq(y, mask);
            if (!sol.converged) results[t].failures++;
            double err = 0.0;
            for (int j = 0; j < trial.n; ++j)
                err = std::max(err, std::sqrt(sqr_abs(sol.z.data[j] - truth.data[j])));
            return err < trial.failure_tolerance;
        };

        results[t].clean = solve(x);
        Signal1D spiked = x;
        spiked.data[0] += 1.0;
        results[t].spiked = solve(spiked);
    });

    RecoveryOutcome out;
    out.trials = trial.trials;
    for (const TrialResult& r : results) {
        out.rate += r.clean ? 1.0 : 0.0;
        out.spiked_rate += r.spiked ? 1.0 : 0.0;
        out.solver_failures += r.failures;
    }
    out.rate /= trial.trials;
    out.spiked_rate /= trial.trials;
    return out;
}

struct ArtifactBound {
    double lower_bound = 0.0;  // (||rho||_inf / ||rho||_1) * (n / m)
    double achieved = 0.0;     // ||rho||_inf / ||A^dagger A rho||_inf
};

/// The general sparse-artifact amplification bound: for any artifact rho,
/// the image perturbation r = A^dagger A rho satisfies
/// ||r||_inf <= ||rho||_1 * m/n, so the achieved amplification is at least
/// (||rho||_inf / ||rho||_1) * (n/m). Checked before returning.
inline ArtifactBound artifact_bound(const Signal1D& rho, const Mask1D& mask) {
    require(rho.n == mask.n, "artifact_bound: signal/mask dimension mismatch");
    const double rho_inf = linf_norm(rho);
    const double rho_l1 = l1_norm(rho);
    require(rho_inf > 0.0, "artifact_bound: artifact is zero");

    const Signal1D r = pseudoinverse_1d(forward_1d(rho, mask), mask);
    const double r_inf = linf_norm(r);

    ArtifactBound out;
    out.lower_bound = (rho_inf / rho_l1) * (static_cast<double>(mask.n) / mask.m());
    out.achieved = r_inf > 0.0 ? rho_inf / r_inf : std::numeric_limits<double>::infinity();
    if (out.achieved < out.lower_bound * (1.0 - 1e-12))
        throw std::logic_error("artifact_bound: achieved amplification below the bound");
    return out;
}

}  // namespace advmri

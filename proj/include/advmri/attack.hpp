#pragma once

#include <array>

#include "advmri/tv.hpp"

namespace advmri {

/// Indicator image of the disk of radius sigma centered at mu (1-based pixel
/// coordinates): 1 where (i - mu1)^2 + (j - mu2)^2 <= sigma^2, else 0.
inline Image disk_weight(double mu1, double mu2, double sigma, int n) {
    require(sigma > 0.0, "disk_weight: sigma must be positive");
    require(mu1 >= 1.0 && mu1 <= n && mu2 >= 1.0 && mu2 <= n,
            "disk_weight: center outside [1, n]^2");
    Image w(n);
    const double s2 = sigma * sigma;
    for (int i = 0; i < n; ++i) {
        const double di = (i + 1) - mu1;
        for (int j = 0; j < n; ++j) {
            const double dj = (j + 1) - mu2;
            if (di * di + dj * dj <= s2) w.at(i, j) = 1.0;
        }
    }
    return w;
}

struct AttackConfig {
    double eta = 0.0;        // absolute l2 budget for the perturbation
    int steps = 100;         // projected gradient ascent iterations
    double step_size = 0.2;  // fraction of eta moved per normalized step
    int grid1 = 8, grid2 = 8;
    double sigma = 5.0;      // disk radius in pixels
    int unroll_K = 50;       // ADMM iterations inside the attack objective
    int recon_K = 200;       // ADMM iterations for the reported artifact
    double lambda = 1e-2;    // reconstruction regularization
    double penalty = 1e-2;   // reconstruction ADMM parameter
    std::uint64_t seed = 0;
};

struct AttackResult {
    MeasurementVector e;              // adversarial perturbation, ||e||_2 = eta
    Image r;                          // A^dagger e
    Image rho;                        // rec(y+e) - rec(y) at full quality
    std::array<double, 2> mu_chosen{};
    double alpha = 0.0;               // ||rho||_inf / ||r||_inf
    struct Norms {
        double e_l2 = 0, r_l2 = 0, r_linf = 0, rho_l2 = 0, rho_linf = 0;
    } norms;
    std::vector<std::pair<std::array<double, 2>, double>> per_center_scores;
    bool zero_gradient = false;       // ascent stalled on a flat objective
    std::vector<double> best_objective_history;
};

/// Ratio of entrywise-modulus maxima, the severity gain of the artifact
/// relative to its encoded seed.
inline double amplification(const Image& r, const Image& rho) {
    const double denom = linf_norm(r);
    require(denom > 0.0, "amplification: ||r||_inf is zero");
    return linf_norm(rho) / denom;
}

namespace detail {

// Shared state for one attack: the measurements under attack, both solver
// configurations, and the cached clean reconstructions.
struct AttackProblem {
    const MeasurementVector* y;
    const SamplingMask* mask;
    AttackConfig cfg;
    TvUnrolled unroll, full;
    Image base_unroll, base_full;

    AttackProblem(const MeasurementVector& yy, const SamplingMask& msk, const AttackConfig& c)
        : y(&yy),
          mask(&msk),
          cfg(c),
          unroll(msk, c.lambda, c.penalty, c.unroll_K),
          full(msk, c.lambda, c.penalty, c.recon_K) {
        require(yy.m == msk.m(), "attack: measurement/mask size mismatch");
        require(c.eta > 0.0, "attack: perturbation budget must be positive");
        require(c.steps >= 1, "attack: need at least one ascent step");
        require(c.step_size > 0.0, "attack: step size must be positive");
        base_unroll = unroll.run(yy);
        base_full = full.run(yy);
    }

    MeasurementVector perturbed(const MeasurementVector& e) const {
        MeasurementVector out(y->m);
        for (int i = 0; i < y->m; ++i) out.data[i] = y->data[i] + e.data[i];
        return out;
    }

    /// || weight . (rec(y+e) - rec(y)) ||_2 with the unroll-length solver.
    double objective(const MeasurementVector& e, const Image& weight) const {
        const Image z = unroll.run(perturbed(e));
        double s = 0.0;
        for (std::size_t i = 0; i < z.data.size(); ++i)
            s += sqr_abs(weight.data[i]) * sqr_abs(z.data[i] - base_unroll.data[i]);
        return std::sqrt(s);
    }

    /// Objective value and its exact reverse-mode ascent direction: for the
    /// returned g, J(e + h d) = J(e) + h Re<d, g> + o(h).
    std::pair<double, MeasurementVector> objective_gradient(const MeasurementVector& e,
                                                            const Image& weight) const {
        std::vector<GradientField> tape;
        const Image z = unroll.run(perturbed(e), nullptr, &tape);
        Image q(z.n);
        double s = 0.0;
        for (std::size_t i = 0; i < z.data.size(); ++i) {
            q.data[i] = weight.data[i] * (z.data[i] - base_unroll.data[i]);
            s += sqr_abs(q.data[i]);
        }
        const double value = std::sqrt(s);
        if (value == 0.0) {
            MeasurementVector zero(y->m);
            return {0.0, std::move(zero)};
        }
        Image zbar(z.n);
        for (std::size_t i = 0; i < z.data.size(); ++i)
            zbar.data[i] = weight.data[i] * q.data[i] / value;
        return {value, unroll.vjp(tape, zbar)};
    }

    AttackResult attack_at(double mu1, double mu2) const {
        const Image weight = disk_weight(mu1, mu2, cfg.sigma, mask->n);
        SplitMix64 g(seed_mix(cfg.seed, mu1, mu2));

        MeasurementVector e(y->m);
        for (cdouble& v : e.data) v = complex_normal(g);
        const double init_norm = l2_norm(e);
        const double init_target = cfg.eta / 10.0;
        for (cdouble& v : e.data) v *= init_target / init_norm;

        AttackResult result;
        double best_value = -1.0;
        MeasurementVector best_e = e;
        for (int step = 0; step <= cfg.steps; ++step) {
            const auto [value, grad] = objective_gradient(e, weight);
            if (value > best_value) {
                best_value = value;
                best_e = e;
            }
            result.best_objective_history.push_back(best_value);
            if (step == cfg.steps) break;
            const double gn = l2_norm(grad);
            if (gn == 0.0) {
                // ascent cannot move from a flat point; every remaining
                // iteration would be identical
                result.zero_gradient = true;
                break;
            }
            const double scale = cfg.step_size * cfg.eta / gn;
            for (int i = 0; i < e.m; ++i) e.data[i] += scale * grad.data[i];
            const double nrm = l2_norm(e);
            if (nrm > cfg.eta)
                for (cdouble& v : e.data) v *= cfg.eta / nrm;
        }

        // ascent makes the budget constraint active; report on the sphere
        const double bn = l2_norm(best_e);
        for (cdouble& v : best_e.data) v *= cfg.eta / bn;

        result.e = std::move(best_e);
        result.r = pseudoinverse(result.e, *mask);
        const Image zp = full.run(perturbed(result.e));
        result.rho = Image(mask->n);
        for (std::size_t i = 0; i < zp.data.size(); ++i)
            result.rho.data[i] = zp.data[i] - base_full.data[i];
        result.mu_chosen = {mu1, mu2};
        result.norms.e_l2 = l2_norm(result.e);
        result.norms.r_l2 = l2_norm(result.r);
        result.norms.r_linf = linf_norm(result.r);
        result.norms.rho_l2 = l2_norm(result.rho);
        result.norms.rho_linf = linf_norm(result.rho);
        result.alpha = amplification(result.r, result.rho);
        result.per_center_scores = {{result.mu_chosen, result.norms.rho_linf}};
        return result;
    }
};

}  // namespace detail

/// Eq.-(6) objective at a given perturbation. The clean reconstruction is
/// cached once per AttackProblem; this convenience wrapper rebuilds it.
inline double attack_objective(const MeasurementVector& e, const MeasurementVector& y,
                               const SamplingMask& mask, const Image& weight,
                               const AttackConfig& cfg) {
    return detail::AttackProblem(y, mask, cfg).objective(e, weight);
}

/// Reverse-mode gradient of attack_objective with respect to e (Wirtinger
/// ascent direction), plus the objective value.
inline std::pair<double, MeasurementVector> objective_gradient(const MeasurementVector& e,
                                                               const MeasurementVector& y,
                                                               const SamplingMask& mask,
                                                               const Image& weight,
                                                               const AttackConfig& cfg) {
    return detail::AttackProblem(y, mask, cfg).objective_gradient(e, weight);
}

/// Projected gradient ascent for a single disk center.
inline AttackResult attack_at(std::array<double, 2> mu, const MeasurementVector& y,
                              const SamplingMask& mask, const AttackConfig& cfg) {
    return detail::AttackProblem(y, mask, cfg).attack_at(mu[0], mu[1]);
}

/// Center of grid cell (k1, k2) on a regular g1 x g2 grid over [1, n]^2.
inline std::array<double, 2> grid_center(int n, int g1, int g2, int k1, int k2) {
    return {1.0 + (n - 1.0) * (2.0 * k1 - 1.0) / (2.0 * g1),
            1.0 + (n - 1.0) * (2.0 * k2 - 1.0) / (2.0 * g2)};
}

/// Runs attack_at on every center of the regular grid and returns the result
/// with the largest ||rho||_inf (ties broken by row-major center order).
/// Centers are independent; per-center seeds derive from (seed, mu).
inline AttackResult attack_grid(const MeasurementVector& y, const SamplingMask& mask,
                                const AttackConfig& cfg, int threads = 1) {
    require(cfg.grid1 >= 1 && cfg.grid2 >= 1, "attack_grid: grid dims must be >= 1");
    const detail::AttackProblem problem(y, mask, cfg);
    const std::size_t count = static_cast<std::size_t>(cfg.grid1) * cfg.grid2;
    std::vector<AttackResult> results(count);
    parallel_for(count, threads, [&](std::size_t idx) {
        const int k1 = static_cast<int>(idx) / cfg.grid2 + 1;
        const int k2 = static_cast<int>(idx) % cfg.grid2 + 1;
        const auto mu = grid_center(mask.n, cfg.grid1, cfg.grid2, k1, k2);
        results[idx] = problem.attack_at(mu[0], mu[1]);
    });

    std::size_t best = 0;
    std::vector<std::pair<std::array<double, 2>, double>> scores;
    bool stalled = false;
    for (std::size_t i = 0; i < count; ++i) {
        scores.emplace_back(results[i].mu_chosen, results[i].norms.rho_linf);
        stalled = stalled || results[i].zero_gradient;
        if (results[i].norms.rho_linf > results[best].norms.rho_linf) best = i;
    }
    AttackResult chosen = std::move(results[best]);
    chosen.per_center_scores = std::move(scores);
    chosen.zero_gradient = stalled;
    return chosen;
}

}  // namespace advmri

#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ellax/common.hpp"
#include "ellax/lax.hpp"
#include "ellax/phase_space.hpp"
#include "ellax/poisson.hpp"

namespace ellax {

/// Flow generated by the spectral invariant H = tr L(z0)^k / k.
struct FlowConfig {
    cplx z0{0.37, 0.21};
    int k = 2;
    double t_end = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    std::size_t max_steps = 200000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ExtendedPhasePoint> states;
    bool completed = true;  // false when the integrator aborted early
    std::string abort_reason;
};

/// Spectral-invariant Hamiltonian; gauge and rescale invariant.
template <class S>
S hamiltonian(const Torus& torus, const PhasePointT<S>& x, const FlowConfig& cfg) {
    return trace_power(lax(torus, x, S(cfg.z0)), cfg.k) / double(cfg.k);
}

namespace detail {

/// Dormand-Prince 5(4) tableau.
struct Dp54 {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double b5[7] = {35.0 / 384,    0.0,        500.0 / 1113, 125.0 / 192,
                                     -2187.0 / 6784, 11.0 / 84, 0.0};
    static constexpr double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

}  // namespace detail

/// Canonical flow of the chart coordinates, xdot = {x, H}: conjugate pairs
/// (pos, mom) satisfy pos_dot = s dH/dmom, mom_dot = -s dH/dpos with s the
/// pair sign. Integrated with an adaptive embedded 5(4) pair; every accepted
/// state is rebuilt from the chart (so the per-point constraint holds exactly
/// along the flow) and revalidated. Near-collisions or pole crossings shrink
/// the step until the integrator aborts with the partial trajectory.
inline Trajectory evolve(const Torus& torus, const ExtendedPhasePoint& x0, const FlowConfig& cfg,
                         const Chart& chart_in = {}, const BracketConvention& conv = {},
                         const ValidationLimits& lim = {}) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw ValidationError("integrator tolerances must be positive");
    const std::size_t n = x0.n;
    const Chart chart = chart_in.pivot.empty() ? Chart::uniform(n) : chart_in;
    validate(x0, torus, lim);

    const CoordLayout lay = CoordLayout::build(n, chart);
    DiffControl fast;
    fast.cross_check = false;  // cross-checking belongs to the certification suites

    auto ham = [&torus, &cfg](const auto& pt) {
        using S = std::decay_t<decltype(pt.q[0])>;
        return trace_power(lax(torus, pt, S(cfg.z0)), cfg.k) / double(cfg.k);
    };

    auto velocity = [&](const std::vector<cplx>& y) {
        const ExtendedPhasePoint pt = point_from_chart<cplx>(n, chart, y);
        const std::vector<cplx> dh = differentiate_scalar(ham, pt, chart, fast);
        std::vector<cplx> v(y.size());
        for (std::size_t t = 0; t + 1 < y.size(); t += 2) {
            const double s = (lay.ids[t].kind == CoordId::Kind::Q) ? 1.0 : conv.alpha_beta_sign;
            v[t] = s * dh[t + 1];
            v[t + 1] = -s * dh[t];
        }
        return v;
    };

    Trajectory traj;
    std::vector<cplx> y = chart_coordinates(x0, chart);
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(x0);

    if (cfg.t_end == 0.0) return traj;
    const double dir = (cfg.t_end > 0.0) ? 1.0 : -1.0;
    double h = dir * std::min(std::abs(cfg.initial_step), std::abs(cfg.t_end));

    using Tab = detail::Dp54;
    std::vector<std::vector<cplx>> k(7);
    bool have_first_stage = false;

    for (std::size_t step = 0; step < cfg.max_steps; ++step) {
        bool final_step = false;
        if (dir * (t + h) >= dir * cfg.t_end) {
            h = cfg.t_end - t;
            final_step = true;
        }

        bool stage_failed = false;
        try {
            if (!have_first_stage) k[0] = velocity(y);
            for (int s = 1; s < 7; ++s) {
                std::vector<cplx> ys = y;
                for (int u = 0; u < s; ++u) {
                    if (Tab::a[s][u] == 0.0) continue;
                    const cplx f = h * Tab::a[s][u];
                    for (std::size_t i = 0; i < y.size(); ++i) ys[i] += f * k[u][i];
                }
                k[s] = velocity(ys);
            }
        } catch (const PoleProximityError&) {
            stage_failed = true;
        }

        double err = 0.0;
        std::vector<cplx> y5(y.size());
        if (!stage_failed) {
            std::vector<cplx> diff(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                cplx acc5{}, acc4{};
                for (int s = 0; s < 7; ++s) {
                    acc5 += Tab::b5[s] * k[s][i];
                    acc4 += Tab::b4[s] * k[s][i];
                }
                y5[i] = y[i] + h * acc5;
                diff[i] = h * (acc5 - acc4);
            }
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double sc = cfg.abs_tol +
                                  cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(diff[i]) / sc);
            }
        }

        if (!stage_failed && err <= 1.0) {
            t = final_step ? cfg.t_end : t + h;
            y = std::move(y5);
            ExtendedPhasePoint pt = point_from_chart<cplx>(n, chart, y);
            try {
                validate(pt, torus, lim);
            } catch (const ValidationError& e) {
                traj.completed = false;
                traj.abort_reason = std::string("state validation failed: ") + e.what();
                return traj;
            }
            traj.times.push_back(t);
            traj.states.push_back(std::move(pt));
            if (final_step) return traj;
            k[0] = k[6];  // first-same-as-last
            have_first_stage = true;
            const double factor = std::min(5.0, std::max(0.2, 0.9 * std::pow(err + 1e-300, -0.2)));
            h *= factor;
        } else {
            h *= stage_failed ? 0.5 : std::min(1.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            have_first_stage = false;
        }

        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
            traj.completed = false;
            traj.abort_reason = "step size collapsed (near-collision or pole crossing)";
            return traj;
        }
    }
    traj.completed = false;
    traj.abort_reason = "step budget exhausted";
    return traj;
}

/// Per-probe conservation diagnostics along a trajectory.
struct ProbeDrift {
    cplx w;
    int k;
    double max_rel_drift;
};

inline std::vector<ProbeDrift> conservation_report(const Torus& torus, const Trajectory& traj,
                                                   const std::vector<std::pair<cplx, int>>& probes) {
    if (traj.states.empty()) throw ValidationError("conservation report needs a nonempty trajectory");
    std::vector<ProbeDrift> out;
    out.reserve(probes.size());
    for (const auto& [w, k] : probes) {
        const cplx i0 = trace_power(lax(torus, traj.states.front(), w), k);
        double drift = 0.0;
        for (const auto& st : traj.states) {
            const cplx it = trace_power(lax(torus, st, w), k);
            drift = std::max(drift, std::abs(it - i0));
        }
        out.push_back({w, k, drift / std::max(1.0, std::abs(i0))});
    }
    return out;
}

/// CSV export: t, then flattened real/imaginary parts of q, p, alpha, beta.
inline void write_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open trajectory output file: " + path);
    if (traj.states.empty()) throw ValidationError("empty trajectory");
    const std::size_t n = traj.states.front().n;
    os << "t";
    for (std::size_t a = 0; a < n; ++a) os << ",q" << a << "_re,q" << a << "_im";
    for (std::size_t a = 0; a < n; ++a) os << ",p" << a << "_re,p" << a << "_im";
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t i = 0; i < n; ++i)
            os << ",alpha" << a << i << "_re,alpha" << a << i << "_im";
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t i = 0; i < n; ++i)
            os << ",beta" << a << i << "_re,beta" << a << i << "_im";
    os << "\n";
    os.precision(17);
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const auto& x = traj.states[s];
        os << traj.times[s];
        for (std::size_t a = 0; a < n; ++a)
            os << "," << x.q[a].real() << "," << x.q[a].imag();
        for (std::size_t a = 0; a < n; ++a)
            os << "," << x.p[a].real() << "," << x.p[a].imag();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t i = 0; i < n; ++i)
                os << "," << x.alpha(a, i).real() << "," << x.alpha(a, i).imag();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t i = 0; i < n; ++i)
                os << "," << x.beta(a, i).real() << "," << x.beta(a, i).imag();
        os << "\n";
    }
}

}  // namespace ellax

#include "rod/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rod {

namespace {

// Gaussian elimination with partial pivoting for the tiny normal systems of the
// Casimir projection (at most 4 unknowns).
void solve_small(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const std::size_t k = b.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        if (A[col][col] == 0.0)
            throw NumericalError("casimir projection: singular normal matrix");
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < k; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t r = k; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < k; ++c) acc -= A[r][c] * b[c];
        b[r] = acc / A[r][r];
    }
}

// Newton step(s) of y <- y - Gc^T (Gc Gc^T)^{-1} (C(y) - target), pulling the
// state back onto the Casimir level set it started from.
void project_onto_casimirs(int level, const std::vector<double>& target,
                           std::vector<double>& y) {
    for (int pass = 0; pass < 2; ++pass) {
        const FieldState st = FieldState::from_flat(level, y);
        std::vector<double> defect = casimirs(st);
        const auto G = casimir_gradients(st);
        const std::size_t k = defect.size();
        double worst = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            defect[i] -= target[i];
            worst = std::max(worst, std::fabs(defect[i]));
        }
        if (worst < 1e-14) return;
        std::vector<std::vector<double>> A(k, std::vector<double>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < y.size(); ++c) acc += G[i][c] * G[j][c];
                A[i][j] = acc;
            }
        solve_small(A, defect);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < y.size(); ++c) y[c] -= G[i][c] * defect[i];
    }
}

}  // namespace

SimResult simulate(const FieldState& initial, const RodParams& params, double s_end,
                   const SimOptions& opt) {
    params.validate();
    FieldState::check_level(initial.level);
    if (s_end == 0.0) throw ConfigError("simulate: the arclength span must be nonzero");

    const int level = initial.level;
    RhsFn f = [&params, level](double, const std::vector<double>& y,
                               std::vector<double>& dy) {
        dy = rhs(FieldState::from_flat(level, y), params).flat();
    };

    IntegratorOptions iopt;
    iopt.tol = opt.tol;
    iopt.fixed_step = opt.fixed_step;
    const std::vector<double> target = casimirs(initial);
    if (opt.project_casimirs)
        iopt.post_accept = [level, target](double, std::vector<double>& y) {
            project_onto_casimirs(level, target, y);
        };

    SimResult res;
    res.initial = initial;
    res.trajectory = integrate(f, initial.flat(), 0.0, s_end, iopt);
    res.final_state = FieldState::from_flat(level, res.trajectory.y_end);

    const std::size_t ns = std::max<std::size_t>(opt.samples, 2);
    const InvariantLedger base = invariants(initial, params);
    res.casimir_drift.assign(base.casimirs.size(), 0.0);
    res.integral_drift.assign(base.integrals.size(), 0.0);
    res.sample_s.reserve(ns);
    res.sample_states.reserve(ns);
    res.sample_ledgers.reserve(ns);

    std::vector<double> ybuf;
    for (std::size_t i = 0; i < ns; ++i) {
        const double si = s_end * static_cast<double>(i) / static_cast<double>(ns - 1);
        res.trajectory.eval(si, ybuf);
        FieldState st = FieldState::from_flat(level, ybuf);
        InvariantLedger led = invariants(st, params);
        res.hamiltonian_drift =
            std::max(res.hamiltonian_drift, std::fabs(led.hamiltonian - base.hamiltonian));
        for (std::size_t c = 0; c < base.casimirs.size(); ++c)
            res.casimir_drift[c] =
                std::max(res.casimir_drift[c], std::fabs(led.casimirs[c] - base.casimirs[c]));
        for (std::size_t c = 0; c < base.integrals.size(); ++c)
            res.integral_drift[c] = std::max(
                res.integral_drift[c],
                std::fabs(led.integrals[c].value - base.integrals[c].value));
        res.sample_s.push_back(si);
        res.sample_states.push_back(st);
        res.sample_ledgers.push_back(std::move(led));
    }
    return res;
}

FramedCurve reconstruct(const Trajectory& field_trajectory, const RodParams& params,
                        std::size_t samples, double tol, const Quat& frame0,
                        const Vec3& origin) {
    if (field_trajectory.steps.empty())
        throw ConfigError("reconstruct: field trajectory carries no dense output");
    if (samples < 2) throw ConfigError("reconstruct: need at least two sample points");
    if (field_trajectory.dim % 3 != 0 || field_trajectory.dim < 3 ||
        field_trajectory.dim > 12)
        throw ConfigError("reconstruct: trajectory dimension is not a field stack");

    // State z = (quaternion, position); the frame spins with the strains u(s)
    // read off the moment history, the centreline follows the frame's third axis.
    std::vector<double> yf;
    RhsFn f = [&](double s, const std::vector<double>& z, std::vector<double>& dz) {
        field_trajectory.eval(s, yf);
        const Vec3 u = strains(Vec3{yf[0], yf[1], yf[2]}, params);
        const Quat q{z[0], z[1], z[2], z[3]};
        const Quat dq = q * Quat{0.0, u.x, u.y, u.z};
        const Vec3 d3 = rotation(q).col(2);
        dz.assign({0.5 * dq.w, 0.5 * dq.x, 0.5 * dq.y, 0.5 * dq.z, d3.x, d3.y, d3.z});
    };

    IntegratorOptions iopt;
    iopt.tol = tol;
    iopt.post_accept = [](double, std::vector<double>& z) {
        const double nq =
            std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3]);
        for (int i = 0; i < 4; ++i) z[i] /= nq;
    };

    const std::vector<double> z0 = {frame0.w, frame0.x, frame0.y, frame0.z,
                                    origin.x,  origin.y, origin.z};
    const Trajectory frame_traj = integrate(f, z0, field_trajectory.s_begin,
                                            field_trajectory.s_end, iopt);

    FramedCurve out;
    out.s.reserve(samples);
    out.centreline.reserve(samples);
    out.frames.reserve(samples);
    std::vector<double> z;
    for (std::size_t i = 0; i < samples; ++i) {
        const double si = field_trajectory.s_begin +
                          (field_trajectory.s_end - field_trajectory.s_begin) *
                              static_cast<double>(i) / static_cast<double>(samples - 1);
        frame_traj.eval(si, z);
        Quat q{z[0], z[1], z[2], z[3]};
        q.normalize();
        out.s.push_back(si);
        out.centreline.push_back({z[4], z[5], z[6]});
        out.frames.push_back(rotation(q));
    }
    return out;
}

}  // namespace rod

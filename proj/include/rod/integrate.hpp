// Explicit Runge-Kutta integrator of order 5(4) after Dormand & Prince, with
// the classic quartic interpolant for dense output and FSAL stage reuse.
// Solves y' = f(s, y) for a flat state vector; model layers wrap their own
// packing around it.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rod/errors.hpp"

namespace rod {

using RhsFn = std::function<void(double s, const std::vector<double>& y,
                                 std::vector<double>& dy)>;

struct IntegratorOptions {
    // Absolute and relative tolerance share one knob; must lie in [1e-13, 1e-3].
    double tol = 1e-10;
    double h_init = 0.0;    // 0 picks the starting step automatically
    double h_max = 0.0;     // 0 means the span length
    double fixed_step = 0.0;  // >0 disables error control and forces this step
    std::size_t max_steps = 20'000'000;
    bool store_dense = true;  // keep interpolation data for every accepted step
    // Called after each accepted step with (s, y); may adjust y in place
    // (frame renormalisation, invariant projection).  Costs one extra rhs
    // evaluation per step because the FSAL stage must be refreshed.
    std::function<void(double, std::vector<double>&)> post_accept;
};

// Interpolation record for one accepted step: coefficients of the quartic in
// theta = (s - s0)/h, stored as five contiguous blocks of dim doubles.
struct StepRecord {
    double s0 = 0.0;
    double h = 0.0;
    std::vector<double> rcont;
};

struct Trajectory {
    std::size_t dim = 0;
    double s_begin = 0.0;
    double s_end = 0.0;
    std::vector<double> y_end;
    std::vector<StepRecord> steps;  // empty when dense storage is off
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;

    // Dense-output evaluation anywhere in [s_begin, s_end].
    void eval(double s, std::vector<double>& y) const;
    std::vector<double> eval(double s) const;
};

Trajectory integrate(const RhsFn& rhs, const std::vector<double>& y0, double s0,
                     double s1, const IntegratorOptions& opt = {});

}  // namespace rod

#include "rod/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rod {

namespace {

// Dormand-Prince 5(4) tableau.
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
             a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
             a64 = 49.0 / 176, a65 = -5103.0 / 18656;
const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
             b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
             e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Weights of the extra dense-output polynomial term.
const double d1 = -12715105075.0 / 11282082432.0;
const double d3 = 87487479700.0 / 32700410799.0;
const double d4 = -10690763975.0 / 1880347072.0;
const double d5 = 701980252875.0 / 199316789632.0;
const double d6 = -1453857185.0 / 822651844.0;
const double d7 = 69997945.0 / 29380423.0;

const double kSafety = 0.9;
const double kShrinkLimit = 0.2;  // never shrink/grow a step by more than...
const double kGrowLimit = 10.0;

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Scaled RMS norm used both by the error control and the start-step heuristic.
double scaled_norm(const std::vector<double>& v, const std::vector<double>& scale) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double q = v[i] / scale[i];
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

double initial_step(const RhsFn& rhs, const std::vector<double>& y0,
                    const std::vector<double>& f0, double s0, double dir,
                    double tol, double hmax, std::size_t& n_rhs) {
    const std::size_t n = y0.size();
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = tol + tol * std::fabs(y0[i]);
    const double dn0 = scaled_norm(y0, scale);
    const double dn1 = scaled_norm(f0, scale);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, hmax);

    // One explicit Euler probe to estimate the second derivative.
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
    rhs(s0 + dir * h0, y1, f1);
    ++n_rhs;
    for (std::size_t i = 0; i < n; ++i) f1[i] -= f0[i];
    const double dn2 = scaled_norm(f1, scale) / h0;

    double h1;
    const double dmax = std::max(dn1, dn2);
    if (dmax <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, hmax});
}

}  // namespace

void Trajectory::eval(double s, std::vector<double>& y) const {
    if (steps.empty())
        throw std::out_of_range("trajectory: no dense-output data stored");
    const double dir = (s_end >= s_begin) ? 1.0 : -1.0;
    const double slack = 1e-9 * (1.0 + std::fabs(s_end - s_begin));
    if ((s - s_begin) * dir < -slack || (s - s_end) * dir > slack)
        throw std::out_of_range("trajectory: sample point outside integrated span");
    s = std::clamp(s, std::min(s_begin, s_end), std::max(s_begin, s_end));

    // Binary search for the step whose interval contains s.
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if ((s - (steps[mid].s0 + steps[mid].h)) * dir > 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    const StepRecord& rec = steps[lo];
    const double theta = (s - rec.s0) / rec.h;
    const double theta1 = 1.0 - theta;
    const double* r = rec.rcont.data();
    y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        y[i] = r[i] +
               theta * (r[dim + i] +
                        theta1 * (r[2 * dim + i] +
                                  theta * (r[3 * dim + i] + theta1 * r[4 * dim + i])));
    }
}

std::vector<double> Trajectory::eval(double s) const {
    std::vector<double> y;
    eval(s, y);
    return y;
}

Trajectory integrate(const RhsFn& rhs, const std::vector<double>& y0, double s0,
                     double s1, const IntegratorOptions& opt) {
    const std::size_t n = y0.size();
    if (n == 0) throw ConfigError("integrate: state vector is empty");
    const bool fixed = opt.fixed_step > 0.0;
    if (!fixed && !(opt.tol >= 1e-13 && opt.tol <= 1e-3))
        throw ConfigError("integrate: tol must lie in [1e-13, 1e-3], got " +
                          std::to_string(opt.tol));

    Trajectory tr;
    tr.dim = n;
    tr.s_begin = s0;
    tr.s_end = s0;
    tr.y_end = y0;
    if (s1 == s0) return tr;
    if (!all_finite(y0)) throw IntegrationError("integrate: non-finite initial state", s0);

    const double dir = (s1 > s0) ? 1.0 : -1.0;
    const double hmax =
        (opt.h_max > 0.0) ? std::min(opt.h_max, std::fabs(s1 - s0)) : std::fabs(s1 - s0);

    std::vector<double> y = y0, ytmp(n), ynew(n), errv(n), scale(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    double s = s0;
    rhs(s, y, k1);
    ++tr.n_rhs;

    double habs;
    if (fixed)
        habs = std::min(opt.fixed_step, std::fabs(s1 - s0));
    else if (opt.h_init > 0.0)
        habs = std::min(opt.h_init, hmax);
    else
        habs = initial_step(rhs, y, k1, s, dir, opt.tol, hmax, tr.n_rhs);

    bool rejected_last = false;
    while ((s1 - s) * dir > 0.0) {
        if (tr.n_accepted + tr.n_rejected >= opt.max_steps)
            throw IntegrationError("integrate: step budget exhausted", s);
        if (habs < 1e-14 * std::max(1.0, std::fabs(s)))
            throw IntegrationError("integrate: step size underflow", s);

        double h = dir * habs;
        if ((s + h - s1) * dir > 0.0) h = s1 - s;  // land exactly on the endpoint

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(s + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(s + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(s + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] =
                y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(s + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(s + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        rhs(s + h, ynew, k7);
        tr.n_rhs += 6;

        if (!all_finite(ynew))
            throw IntegrationError("integrate: state became non-finite", s);

        double err = 0.0;
        if (!fixed) {
            for (std::size_t i = 0; i < n; ++i) {
                errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
                scale[i] =
                    opt.tol + opt.tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            }
            err = scaled_norm(errv, scale);
            if (!std::isfinite(err))
                throw IntegrationError("integrate: error estimate became non-finite", s);
        }

        if (fixed || err <= 1.0) {
            if (opt.store_dense) {
                StepRecord rec;
                rec.s0 = s;
                rec.h = h;
                rec.rcont.resize(5 * n);
                double* r = rec.rcont.data();
                for (std::size_t i = 0; i < n; ++i) {
                    const double dy = ynew[i] - y[i];
                    const double bspl = h * k1[i] - dy;
                    r[i] = y[i];
                    r[n + i] = dy;
                    r[2 * n + i] = bspl;
                    r[3 * n + i] = dy - h * k7[i] - bspl;
                    r[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                        d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                tr.steps.push_back(std::move(rec));
            }
            s += h;
            y.swap(ynew);
            ++tr.n_accepted;
            if (opt.post_accept) {
                opt.post_accept(s, y);
                rhs(s, y, k1);  // the adjusted state invalidates the FSAL stage
                ++tr.n_rhs;
            } else {
                k1.swap(k7);
            }
            if (!fixed) {
                double fac = (err == 0.0) ? kGrowLimit
                                          : kSafety * std::pow(err, -0.2);
                fac = std::clamp(fac, kShrinkLimit, rejected_last ? 1.0 : kGrowLimit);
                habs = std::min(std::fabs(h) * fac, hmax);
                rejected_last = false;
            }
        } else {
            habs = std::fabs(h) *
                   std::max(kShrinkLimit, kSafety * std::pow(err, -0.2));
            ++tr.n_rejected;
            rejected_last = true;
        }
    }

    tr.s_end = s;
    tr.y_end = y;
    return tr;
}

}  // namespace rod

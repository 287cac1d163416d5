#include "rod/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rod/ensemble.hpp"
#include "rod/integrate.hpp"

namespace rod {

namespace {

RhsFn reduced_flow(const CasimirTriple& cas, const RodParams& p) {
    return [cas, p](double, const std::vector<double>& y, std::vector<double>& dy) {
        const CanonicalState z{y[0], y[1], y[2], y[3], y[4], y[5]};
        const std::array<double, 6> d = reduced_rhs(z, cas, p);
        dy.assign(d.begin(), d.end());
    };
}

CanonicalState state_from(const std::vector<double>& y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5]};
}

}  // namespace

bool in_window(const SectionPoint& pt, const SectionWindow& win) {
    return pt.theta > win.theta_min && pt.theta < win.theta_max &&
           pt.p_theta > win.p_theta_min && pt.p_theta < win.p_theta_max;
}

std::vector<SectionPoint> find_crossings(const CanonicalState& z0,
                                         const CasimirTriple& cas, const RodParams& p,
                                         const SectionSpec& spec,
                                         std::size_t orbit_id) {
    p.validate();
    if (!(spec.alpha > -1.0 && spec.alpha < 1.0))
        throw ConfigError("find_crossings: alpha must lie in (-1, 1)");
    if (!(spec.max_arclength > 0.0))
        throw ConfigError("find_crossings: max_arclength must be positive");

    const RhsFn f = reduced_flow(cas, p);
    IntegratorOptions io;
    io.tol = spec.tol;
    IntegratorOptions mini_io = io;
    mini_io.store_dense = false;

    std::vector<SectionPoint> out;
    std::vector<double> y(z0.flat().begin(), z0.flat().end());
    std::vector<double> buf;
    double s_base = 0.0;
    const double window = 50.0;  // integrate in chunks to bound dense storage

    auto section_fn = [&](const Trajectory& tr, double s) {
        tr.eval(s, buf);
        return std::cos(buf[1]) - spec.alpha;
    };

    while (s_base < spec.max_arclength && out.size() < spec.max_crossings) {
        const double s_hi = std::min(s_base + window, spec.max_arclength);
        const Trajectory tr = integrate(f, y, s_base, s_hi, io);

        for (const StepRecord& rec : tr.steps) {
            if (out.size() >= spec.max_crossings) break;
            constexpr int kSub = 8;  // bracket sign changes inside each step
            double prev_s = rec.s0;
            double prev_F = section_fn(tr, prev_s);
            for (int k = 1; k <= kSub; ++k) {
                const double sk = rec.s0 + rec.h * static_cast<double>(k) / kSub;
                const double Fk = section_fn(tr, sk);
                if (prev_F * Fk < 0.0) {
                    double a = prev_s, b = sk, Fa = prev_F;
                    for (int it = 0; it < 60 && (b - a) > 1e-12; ++it) {
                        const double mid = 0.5 * (a + b);
                        const double Fm = section_fn(tr, mid);
                        if (Fa * Fm <= 0.0) {
                            b = mid;
                        } else {
                            a = mid;
                            Fa = Fm;
                        }
                    }
                    double s_star = 0.5 * (a + b);

                    // Re-integrate from the step start so the reported state
                    // carries full integrator accuracy, not interpolant error.
                    // Spans below the integrator's step floor stay on the dense
                    // graph, which is anchored exactly at the step start.
                    std::vector<double> ystart(rec.rcont.begin(),
                                               rec.rcont.begin() + 6);
                    auto state_at = [&](double st) {
                        if (st - rec.s0 <= 1e-10 * (1.0 + std::fabs(rec.s0))) {
                            tr.eval(st, buf);
                            return state_from(buf);
                        }
                        return state_from(integrate(f, ystart, rec.s0, st, mini_io).y_end);
                    };
                    CanonicalState zs = state_at(s_star);

                    std::array<double, 6> dz = reduced_rhs(zs, cas, p);
                    double dcos = -std::sin(zs.psi) * dz[1];

                    // One Newton polish against the re-integrated state removes
                    // the residual interpolant error from the reported point.
                    if (std::fabs(dcos) > 1e-8) {
                        const double shift =
                            -(std::cos(zs.psi) - spec.alpha) / dcos;
                        const double s_new =
                            std::clamp(s_star + shift, rec.s0, rec.s0 + rec.h);
                        if (s_new != s_star) {
                            s_star = s_new;
                            zs = state_at(s_star);
                            dz = reduced_rhs(zs, cas, p);
                            dcos = -std::sin(zs.psi) * dz[1];
                        }
                    }
                    const bool keep =
                        spec.direction == CrossingDirection::kBoth ||
                        (spec.direction == CrossingDirection::kIncreasing && dcos > 0.0) ||
                        (spec.direction == CrossingDirection::kDecreasing && dcos < 0.0);
                    if (keep) {
                        out.push_back({orbit_id, s_star, zs.theta, zs.p_theta,
                                       std::fabs(std::cos(zs.psi) - spec.alpha), zs});
                        if (out.size() >= spec.max_crossings) break;
                    }
                }
                prev_s = sk;
                prev_F = Fk;
            }
        }
        y = tr.y_end;
        s_base = s_hi;
    }
    return out;
}

namespace {

// Innermost solve: p_psi on the integral level set at fixed (theta, psi,
// p_theta).  Scans the admissible interval for a sign change, then bisects.
std::optional<double> solve_p_psi(double theta, double psi, double p_theta,
                                  double p_phi, double iota,
                                  const CasimirTriple& cas, const RodParams& p) {
    const double bound =
        (2.0 * cas.C1 - cas.C2 * cas.C2 / cas.C3) / (2.0 * std::sqrt(cas.C3));
    const double hi = bound - 1e-12;
    const double lo = hi - 6.0 * (1.0 + std::fabs(iota));
    auto mismatch = [&](double p_psi) {
        const CanonicalState z{theta, psi, 0.0, p_theta, p_psi, p_phi};
        return integral_I(z, cas, p) - iota;
    };
    const int kScan = 160;
    double prev_x = lo, prev_g = mismatch(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / kScan;
        const double g = mismatch(x);
        if (prev_g * g <= 0.0) {
            double a = prev_x, b = x, ga = prev_g;
            for (int it = 0; it < 90 && (b - a) > 1e-15; ++it) {
                const double mid = 0.5 * (a + b);
                const double gm = mismatch(mid);
                if (ga * gm <= 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            return 0.5 * (a + b);
        }
        prev_x = x;
        prev_g = g;
    }
    return std::nullopt;
}

}  // namespace

std::vector<CanonicalState> seeds_on_level_set(double h, double iota, double alpha,
                                               double p_phi, const CasimirTriple& cas,
                                               const RodParams& p, std::size_t count) {
    p.validate();
    if (!p.isotropic())
        throw ConfigError("seeds_on_level_set: requires the isotropic reduced system");
    if (!(alpha > -1.0 && alpha < 1.0))
        throw ConfigError("seeds_on_level_set: alpha must lie in (-1, 1)");
    if (count == 0) throw ConfigError("seeds_on_level_set: count must be positive");

    std::vector<CanonicalState> found;
    const double psi_base = std::acos(alpha);

    for (int ti = 0; ti < 35 && found.size() < count; ++ti) {
        const double theta = 0.5 + (2.2 - 0.5) * static_cast<double>(ti) / 34.0;
        for (const double psi : {psi_base, -psi_base}) {
            if (found.size() >= count) break;

            // Energy mismatch at this (theta, psi) as a function of p_theta,
            // with p_psi eliminated through the integral level set.
            auto energy = [&](double p_theta) -> std::optional<double> {
                const auto p_psi = solve_p_psi(theta, psi, p_theta, p_phi, iota, cas, p);
                if (!p_psi) return std::nullopt;
                const CanonicalState z{theta, psi, 0.0, p_theta, *p_psi, p_phi};
                if (transverse_tension_sq(z.p_psi, cas) < 0.0) return std::nullopt;
                return reduced_hamiltonian(z, cas, p) - h;
            };

            const int kScan = 40;
            double prev_x = 0.0;
            std::optional<double> prev_g;
            for (int i = 0; i <= kScan; ++i) {
                const double x = -1.45 + 2.9 * static_cast<double>(i) / kScan;
                const std::optional<double> g = energy(x);
                if (prev_g && g && (*prev_g) * (*g) <= 0.0) {
                    double a = prev_x, b = x, ga = *prev_g;
                    bool ok = true;
                    for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
                        const double mid = 0.5 * (a + b);
                        const std::optional<double> gm = energy(mid);
                        if (!gm) {
                            ok = false;
                            break;
                        }
                        if (ga * (*gm) <= 0.0) {
                            b = mid;
                        } else {
                            a = mid;
                            ga = *gm;
                        }
                    }
                    if (ok) {
                        const double p_theta = 0.5 * (a + b);
                        const auto p_psi =
                            solve_p_psi(theta, psi, p_theta, p_phi, iota, cas, p);
                        if (p_psi) {
                            const CanonicalState z{theta, psi, 0.0,
                                                   p_theta, *p_psi, p_phi};
                            const double dh = reduced_hamiltonian(z, cas, p) - h;
                            const double di = integral_I(z, cas, p) - iota;
                            if (std::fabs(dh) < 1e-9 && std::fabs(di) < 1e-9) {
                                found.push_back(z);
                                break;  // at most one seed per (theta, psi) pair
                            }
                        }
                    }
                }
                prev_x = x;
                prev_g = g;
            }
        }
    }
    if (found.empty())
        throw NoSeedFound("seeds_on_level_set: no state matches the requested levels");
    return found;
}

ScanResult scan(const std::vector<CanonicalState>& seeds, const CasimirTriple& cas,
                const RodParams& p, const SectionSpec& spec, bool parallel) {
    std::vector<std::vector<SectionPoint>> buckets(seeds.size());
    parallel_for(
        seeds.size(),
        [&](std::size_t i) { buckets[i] = find_crossings(seeds[i], cas, p, spec, i); },
        parallel);

    ScanResult res;
    res.per_orbit.resize(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        res.per_orbit[i] = buckets[i].size();
        res.points.insert(res.points.end(), buckets[i].begin(), buckets[i].end());
    }
    return res;
}

CurveStats curve_statistic(const std::vector<SectionPoint>& pts,
                           const SectionWindow& win) {
    const std::size_t n = pts.size();
    if (n < 8)
        throw ConfigError("curve_statistic: need at least 8 points");
    const double sx = win.theta_max - win.theta_min;
    const double sy = win.p_theta_max - win.p_theta_min;

    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = pts[i].theta / sx;
        ys[i] = pts[i].p_theta / sy;
    }

    std::vector<double> thickness(n);
    double max_gap = 0.0;
    std::vector<std::pair<double, std::size_t>> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = xs[j] - xs[i], dy = ys[j] - ys[i];
            d2[j] = {dx * dx + dy * dy, j};
        }
        std::sort(d2.begin(), d2.end());
        max_gap = std::max(max_gap, std::sqrt(d2[1].first));  // d2[0] is the point itself

        // Covariance of the point and its 6 nearest neighbours.
        double mx = 0.0, my = 0.0;
        constexpr std::size_t kNbr = 7;
        for (std::size_t k = 0; k < kNbr; ++k) {
            mx += xs[d2[k].second];
            my += ys[d2[k].second];
        }
        mx /= kNbr;
        my /= kNbr;
        double cxx = 0.0, cxy = 0.0, cyy = 0.0;
        for (std::size_t k = 0; k < kNbr; ++k) {
            const double dx = xs[d2[k].second] - mx, dy = ys[d2[k].second] - my;
            cxx += dx * dx;
            cxy += dx * dy;
            cyy += dy * dy;
        }
        const double tr = cxx + cyy;
        const double det = cxx * cyy - cxy * cxy;
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        const double lmax = 0.5 * (tr + disc), lmin = 0.5 * (tr - disc);
        thickness[i] = (lmax > 0.0) ? std::sqrt(std::max(0.0, lmin) / lmax) : 0.0;
    }

    std::nth_element(thickness.begin(), thickness.begin() + n / 2, thickness.end());
    CurveStats st;
    st.median_thickness = thickness[n / 2];
    st.max_nn_gap = max_gap;
    return st;
}

}  // namespace rod

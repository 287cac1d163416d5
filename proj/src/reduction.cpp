#include "rod/reduction.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rod/so3.hpp"

namespace rod {

namespace {

constexpr double kGimbalTol = 1e-8;      // on |sin(theta)|
constexpr double kAlignTol = 1e-12;      // relative, on |n x B|
constexpr double kRadicandSlack = 1e-12;  // tolerated round-off below zero

double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

void check_triple(const CasimirTriple& cas, const char* who) {
    if (!(cas.C3 > 0.0))
        throw ConfigError(std::string(who) + ": C3 = |B|^2 must be positive");
}

// Square root of the transverse tension, with round-off slack below zero.
double vperp_from(double rad, const char* who) {
    if (rad < 0.0) {
        if (rad > -kRadicandSlack) return 0.0;
        throw NegativeRadicand(std::string(who) +
                               ": transverse tension squared is negative (" +
                               std::to_string(rad) + ")");
    }
    return std::sqrt(rad);
}

void check_alignment(const Vec3& n, const Vec3& B, const char* who) {
    const Vec3 c = cross(n, B);
    const double scale = std::max(1.0, norm(n) * norm(B));
    if (dot(c, c) <= kAlignTol * kAlignTol * scale * scale)
        throw AlignedState(std::string(who) +
                           ": force and field are parallel, the angle psi is undefined");
}

}  // namespace

CasimirTriple casimir_triple(const FieldState& s) {
    if (s.level != 2)
        throw ConfigError("casimir_triple: the chart applies to the level-2 system");
    return {0.5 * dot(s.n(), s.n()) + dot(s.m(), s.B()), dot(s.B(), s.n()),
            dot(s.B(), s.B())};
}

double angle_diff(double a, double b) {
    return std::remainder(a - b, 2.0 * std::numbers::pi);
}

double transverse_tension_sq(double p_psi, const CasimirTriple& cas) {
    return 2.0 * cas.C1 - cas.C2 * cas.C2 / cas.C3 - 2.0 * std::sqrt(cas.C3) * p_psi;
}

CanonicalState to_canonical(const FieldState& s) {
    if (s.level != 2)
        throw ConfigError("to_canonical: the chart applies to the level-2 system");
    const Vec3 m = s.m(), n = s.n(), B = s.B();
    const CasimirTriple cas = casimir_triple(s);
    check_triple(cas, "to_canonical");
    check_alignment(n, B, "to_canonical");

    const double sC3 = std::sqrt(cas.C3);
    const double rho2 = B.x * B.x + B.y * B.y;
    if (rho2 <= kGimbalTol * kGimbalTol * cas.C3)
        throw GimbalSingular("to_canonical: field direction is vertical, phi is undefined");

    CanonicalState z;
    z.theta = std::acos(clamp_unit(B.z / sC3));
    z.phi = std::atan2(B.y, -B.x);
    z.p_phi = m.z;
    z.p_psi = dot(m, B) / sC3;
    z.p_theta = (m.x * B.y - m.y * B.x) / std::sqrt(cas.C3 - B.z * B.z);

    // w = n - (C2/C3) B is the transverse part of the force; psi is its angle
    // around the field direction.
    const Vec3 w = n - (cas.C2 / cas.C3) * B;
    const double rho = std::sqrt(rho2);
    const double sin_phi = B.y / rho, cos_phi = -B.x / rho;
    const double s_term = -(sin_phi * w.x + cos_phi * w.y);
    const double c_term = w.z * sC3 / rho;  // = w.z / sin(theta)
    z.psi = std::atan2(s_term, c_term);
    return z;
}

CanonicalState to_canonical(const FieldState& s, const CasimirTriple& cas) {
    if (s.level != 2)
        throw ConfigError("to_canonical: the chart applies to the level-2 system");
    check_triple(cas, "to_canonical");
    const Vec3 m = s.m(), n = s.n(), B = s.B();
    check_alignment(n, B, "to_canonical");

    const double sC3 = std::sqrt(cas.C3);
    const double r2 = cas.C3 - B.z * B.z;
    if (r2 <= kGimbalTol * kGimbalTol * cas.C3)
        throw GimbalSingular("to_canonical: field direction is vertical, phi is undefined");
    const double rho2 = B.x * B.x + B.y * B.y;
    if (rho2 <= 0.0)
        throw GimbalSingular("to_canonical: field direction is vertical, phi is undefined");

    CanonicalState z;
    z.theta = std::acos(clamp_unit(B.z / sC3));
    z.phi = std::atan2(B.y, -B.x);
    z.p_phi = m.z;
    z.p_psi = dot(m, B) / sC3;
    z.p_theta = (m.x * B.y - m.y * B.x) / std::sqrt(r2);

    // Frozen-parameter psi in arccos form; off the level set this extension
    // differs from the one above, which is exactly why it is kept separate.
    const double N = n.z - cas.C2 * B.z / cas.C3;
    const double V2 = 2.0 * cas.C1 - cas.C2 * cas.C2 / cas.C3 - 2.0 * dot(m, B);
    if (V2 <= 0.0)
        throw AlignedState("to_canonical: transverse tension vanished in the frozen chart");
    const double S2 = 1.0 - B.z * B.z / cas.C3;
    const Vec3 w = n - (cas.C2 / cas.C3) * B;
    const double rho = std::sqrt(rho2);
    const double s_term = -((B.y / rho) * w.x + (-B.x / rho) * w.y);
    const double sg = (s_term >= 0.0) ? 1.0 : -1.0;
    z.psi = sg * std::acos(clamp_unit(N / std::sqrt(S2 * V2)));
    return z;
}

FieldState from_canonical(const CanonicalState& z, const CasimirTriple& cas) {
    check_triple(cas, "from_canonical");
    const double st = std::sin(z.theta), ct = std::cos(z.theta);
    if (std::fabs(st) < kGimbalTol)
        throw GimbalSingular("from_canonical: sin(theta) ~ 0, the chart degenerates");
    const double sC3 = std::sqrt(cas.C3);
    const double vperp = vperp_from(transverse_tension_sq(z.p_psi, cas), "from_canonical");
    const double vpar = cas.C2 / sC3;
    const double sp = std::sin(z.phi), cp = std::cos(z.phi);
    const double spsi = std::sin(z.psi), cpsi = std::cos(z.psi);
    const double X = (z.p_psi - z.p_phi * ct) / st;

    FieldState out(2);
    out.m() = Vec3{z.p_theta * sp - cp * X, z.p_theta * cp + sp * X, z.p_phi};
    out.B() = sC3 * Vec3{-st * cp, st * sp, ct};
    const Vec3 col3{-st * cp, st * sp, ct};
    const Vec3 col1{ct * cp * cpsi - sp * spsi, -ct * sp * cpsi - cp * spsi, st * cpsi};
    out.n() = vpar * col3 + vperp * col1;
    return out;
}

double reduced_hamiltonian(const CanonicalState& z, const CasimirTriple& cas,
                           const RodParams& p) {
    p.validate();
    check_triple(cas, "reduced_hamiltonian");
    const double st = std::sin(z.theta), ct = std::cos(z.theta);
    if (std::fabs(st) < kGimbalTol)
        throw GimbalSingular("reduced_hamiltonian: sin(theta) ~ 0");
    const double sp = std::sin(z.phi), cp = std::cos(z.phi);
    const double s2 = st * st;
    const double W = p.K1 * sp * sp + p.K2 * cp * cp;
    const double vperp =
        vperp_from(transverse_tension_sq(z.p_psi, cas), "reduced_hamiltonian");

    const double quad =
        z.p_theta * z.p_theta * s2 * (p.K2 - (p.K2 - p.K1) * cp * cp) +
        z.p_psi * z.p_psi * W +
        z.p_phi * z.p_phi * (ct * ct * W + (p.K1 * p.K2 / p.K3) * s2) +
        2.0 * (p.K2 - p.K1) * z.p_theta * z.p_phi * st * ct * sp * cp -
        2.0 * (p.K2 - p.K1) * z.p_theta * z.p_psi * st * sp * cp -
        2.0 * z.p_psi * z.p_phi * ct * W;
    return quad / (2.0 * p.K1 * p.K2 * s2) + (cas.C2 / std::sqrt(cas.C3)) * ct +
           st * std::cos(z.psi) * vperp;
}

std::array<double, 6> reduced_rhs(const CanonicalState& z, const CasimirTriple& cas,
                                  const RodParams& p) {
    p.validate();
    check_triple(cas, "reduced_rhs");
    if (!p.isotropic())
        throw ConfigError("reduced_rhs: the closed form requires K1 == K2");
    const double K = p.K1;
    const double st = std::sin(z.theta), ct = std::cos(z.theta);
    if (std::fabs(st) < kGimbalTol) throw GimbalSingular("reduced_rhs: sin(theta) ~ 0");
    const double sC3 = std::sqrt(cas.C3);
    const double vperp = vperp_from(transverse_tension_sq(z.p_psi, cas), "reduced_rhs");
    if (vperp == 0.0)
        throw AlignedState("reduced_rhs: transverse tension vanished, psi is singular");
    const double spsi = std::sin(z.psi), cpsi = std::cos(z.psi);
    const double X = z.p_psi - z.p_phi * ct;
    const double st2 = st * st;

    return {
        z.p_theta / K,
        X / (K * st2) - sC3 * cpsi * st / vperp,
        -X * ct / (K * st2) + z.p_phi / p.K3,
        (z.p_psi * ct - z.p_phi) * X / (K * st * st * st) +
            (cas.C2 / sC3) * st - ct * cpsi * vperp,
        st * spsi * vperp,
        0.0,
    };
}

double integral_I(const CanonicalState& z, const CasimirTriple& cas,
                  const RodParams& p) {
    p.validate();
    check_triple(cas, "integral_I");
    if (!p.isotropic())
        throw ConfigError("integral_I: conserved only in the isotropic case");
    const double st = std::sin(z.theta), ct = std::cos(z.theta);
    if (std::fabs(st) < kGimbalTol) throw GimbalSingular("integral_I: sin(theta) ~ 0");
    const double sC3 = std::sqrt(cas.C3);
    const double vperp = vperp_from(transverse_tension_sq(z.p_psi, cas), "integral_I");
    return sC3 * p.K1 * ct + cas.C2 * z.p_psi / sC3 -
           vperp * (z.p_theta * std::sin(z.psi) -
                    std::cos(z.psi) * (z.p_phi - z.p_psi * ct) / st);
}

Matrix chart_jacobian(const FieldState& s, const CasimirTriple& cas) {
    if (s.level != 2)
        throw ConfigError("chart_jacobian: the chart applies to the level-2 system");
    check_triple(cas, "chart_jacobian");
    const Vec3 m = s.m(), n = s.n(), B = s.B();
    const double sC3 = std::sqrt(cas.C3);
    const double r2 = cas.C3 - B.z * B.z;
    if (r2 <= kGimbalTol * kGimbalTol * cas.C3)
        throw GimbalSingular("chart_jacobian: field direction is vertical");
    const double r = std::sqrt(r2);
    const double den = B.x * B.x + B.y * B.y;
    if (den <= kGimbalTol * kGimbalTol * cas.C3)
        throw GimbalSingular("chart_jacobian: field direction is vertical");

    Matrix G(6, 9);  // columns m(0..2), n(3..5), B(6..8)
    // theta depends on B3 alone.
    G(0, 8) = -1.0 / r;
    // phi = atan2(B2, -B1).
    G(2, 6) = B.y / den;
    G(2, 7) = -B.x / den;
    // p_theta = (m1 B2 - m2 B1) / sqrt(C3 - B3^2).
    G(3, 0) = B.y / r;
    G(3, 1) = -B.x / r;
    G(3, 6) = -m.y / r;
    G(3, 7) = m.x / r;
    G(3, 8) = (m.x * B.y - m.y * B.x) * B.z / (r2 * r);
    // p_psi = m.B / sqrt(C3).
    G(4, 0) = B.x / sC3;
    G(4, 1) = B.y / sC3;
    G(4, 2) = B.z / sC3;
    G(4, 6) = m.x / sC3;
    G(4, 7) = m.y / sC3;
    G(4, 8) = m.z / sC3;
    // p_phi = m3.
    G(5, 2) = 1.0;

    // psi row, from psi = sg * arccos(N / (S V)) at frozen Casimir parameters.
    const double N = n.z - cas.C2 * B.z / cas.C3;
    const double V2 = 2.0 * cas.C1 - cas.C2 * cas.C2 / cas.C3 - 2.0 * dot(m, B);
    if (V2 <= 0.0) throw AlignedState("chart_jacobian: transverse tension vanished");
    const double S2 = 1.0 - B.z * B.z / cas.C3;
    const double disc = S2 * V2 - N * N;
    if (disc <= 0.0)
        throw NumericalError(
            "chart_jacobian: sin(psi) = 0, the psi derivatives are singular");
    const double Delta = V2 * std::sqrt(disc);
    const Vec3 w = n - (cas.C2 / cas.C3) * B;
    const double sg = (-(B.y * w.x - B.x * w.y) >= 0.0) ? 1.0 : -1.0;
    G(1, 0) = sg * (-N * B.x / Delta);
    G(1, 1) = sg * (-N * B.y / Delta);
    G(1, 2) = sg * (-N * B.z / Delta);
    G(1, 5) = sg * (-V2 / Delta);
    G(1, 6) = sg * (-N * m.x / Delta);
    G(1, 7) = sg * (-N * m.y / Delta);
    G(1, 8) = sg * (cas.C2 * V2 / cas.C3 - N * B.z * V2 / r2 - N * m.z) / Delta;
    return G;
}

Matrix chart_jacobian_fd(const FieldState& s, const CasimirTriple& cas, double step) {
    if (s.level != 2)
        throw ConfigError("chart_jacobian_fd: the chart applies to the level-2 system");
    Matrix G(6, 9);
    const std::vector<double> base = s.flat();
    for (std::size_t k = 0; k < 9; ++k) {
        std::vector<double> yp = base, ym = base;
        yp[k] += step;
        ym[k] -= step;
        const CanonicalState zp = to_canonical(FieldState::from_flat(2, yp), cas);
        const CanonicalState zm = to_canonical(FieldState::from_flat(2, ym), cas);
        const std::array<double, 6> fp = zp.flat(), fm = zm.flat();
        for (std::size_t i = 0; i < 6; ++i) {
            // psi and phi are angles; difference them across the branch cut.
            const double d = (i == 1 || i == 2) ? angle_diff(fp[i], fm[i])
                                                : fp[i] - fm[i];
            G(i, k) = d / (2.0 * step);
        }
    }
    return G;
}

double canonical_defect(const FieldState& s, double step) {
    const CasimirTriple cas = casimir_triple(s);
    const Matrix G = chart_jacobian_fd(s, cas, step);
    const Matrix J = structure_matrix(s, 2);
    Matrix D = G * J * G.transposed();
    for (std::size_t i = 0; i < 3; ++i) {
        D(i, 3 + i) -= 1.0;
        D(3 + i, i) += 1.0;
    }
    return D.max_abs();
}

}  // namespace rod

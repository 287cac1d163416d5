// Canonical chart for the level-2 system (moment, force, field direction):
// Euler angles of the frame plus conjugate momenta, with the three Casimirs as
// chart parameters.  Holds only where the force and field directions are not
// parallel and the field direction is off the vertical axis.
#pragma once

#include <array>

#include "rod/matrix.hpp"
#include "rod/models.hpp"

namespace rod {

struct CanonicalState {
    double theta = 0.0, psi = 0.0, phi = 0.0;
    double p_theta = 0.0, p_psi = 0.0, p_phi = 0.0;

    std::array<double, 6> flat() const { return {theta, psi, phi, p_theta, p_psi, p_phi}; }
    static CanonicalState from_flat(const std::array<double, 6>& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
};

// Chart parameters: C1 = |n|^2/2 + m.B, C2 = n.B, C3 = |B|^2.
struct CasimirTriple {
    double C1 = 0.0, C2 = 0.0, C3 = 1.0;
};

CasimirTriple casimir_triple(const FieldState& s);

// Difference of two angles wrapped into (-pi, pi].
double angle_diff(double a, double b);

// Squared transverse tension 2*C1 - C2^2/C3 - 2*sqrt(C3)*p_psi; its square
// root enters the reduced Hamiltonian and vanishes exactly on aligned states.
double transverse_tension_sq(double p_psi, const CasimirTriple& cas);

// Chart map and its inverse.  to_canonical reads the Casimirs off the state;
// the overload with an explicit triple keeps them frozen, which matters only
// for finite-difference probes off the level set (on it the two agree).
CanonicalState to_canonical(const FieldState& s);
CanonicalState to_canonical(const FieldState& s, const CasimirTriple& cas);
FieldState from_canonical(const CanonicalState& z, const CasimirTriple& cas);

double reduced_hamiltonian(const CanonicalState& z, const CasimirTriple& cas,
                           const RodParams& p);

// Hamilton's equations for the isotropic case (K1 = K2), where phi is cyclic.
// Order matches CanonicalState::flat.
std::array<double, 6> reduced_rhs(const CanonicalState& z, const CasimirTriple& cas,
                                  const RodParams& p);

// The extra conserved quantity of the isotropic reduced system, equal to
// n.m + K1*B3 composed with the chart inverse.
double integral_I(const CanonicalState& z, const CasimirTriple& cas,
                  const RodParams& p);

// 6x9 Jacobian of the chart (rows theta, psi, phi, p_theta, p_psi, p_phi;
// columns m, n, B), in closed form and by central differences of the frozen
// chart.  canonical_defect measures max |G J G^T - Jbar| with the canonical
// block structure Jbar = [[0, I], [-I, 0]].
Matrix chart_jacobian(const FieldState& s, const CasimirTriple& cas);
Matrix chart_jacobian_fd(const FieldState& s, const CasimirTriple& cas,
                         double step = 1e-6);
double canonical_defect(const FieldState& s, double step = 1e-6);

}  // namespace rod

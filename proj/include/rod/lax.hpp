// Spectral-parameter formulation of the isotropic hierarchy: the field stack
// becomes a matrix polynomial Gamma(mu) in hat form whose evolution is a
// commutator, so every coefficient of tr(Gamma^2) — equivalently of g.g for
// the underlying vector polynomial g(mu) — is a conserved quantity.
#pragma once

#include <array>
#include <complex>
#include <vector>

#include "rod/models.hpp"
#include "rod/vec3.hpp"

namespace rod {

struct LaxOperator {
    int level = 0;
    double K = 1.0;
    // coeff[j] multiplies mu^(1-j): K*d3, then the fields m, n, B, D as far
    // as the level goes (size level + 2).
    std::vector<Vec3> coeff;
};

// Requires K1 == K2; only then is the mu^1 coefficient constant in s.
LaxOperator lax_from_state(const FieldState& s, const RodParams& p);

Vec3 lax_vector(const LaxOperator& L, double mu);
Mat3 lax_matrix(const LaxOperator& L, double mu);

// The other half of the pair: hat(d3)*mu + hat(u).
Mat3 lax_flow_matrix(const LaxOperator& L, const RodParams& p, double mu);

// Coefficient-wise s-derivative, i.e. the commutator [Gamma, d3^ mu + u^]
// collected per power of mu.  The mu^1 slot comes out zero (isotropy).
LaxOperator lax_derivative(const LaxOperator& L, const RodParams& p);

Mat3 commutator(const Mat3& a, const Mat3& b);

// Half the mu^(-i) coefficients of g(mu).g(mu), i = -2 .. 2*level.  The low
// indices reproduce the hierarchy's first integrals, the high ones its
// Casimirs (the very top slot carries a factor 1/2).
struct SpectralInvariants {
    int level = 0;
    std::vector<double> values;  // values[i + 2] holds index i

    double at(int i) const { return values.at(static_cast<std::size_t>(i + 2)); }
    int min_index() const { return -2; }
    int max_index() const { return 2 * level; }
};

SpectralInvariants spectral_invariants(const LaxOperator& L);

// Full Hamiltonian recovered from two spectral coefficients:
// H = I_0/K + (K - K3)/(2 K K3) * (I_-1/K)^2.
double lax_hamiltonian(const LaxOperator& L, const RodParams& p);

// Eigenvalues of the antisymmetric Gamma(mu): {0, +i|g|, -i|g|}.
std::array<std::complex<double>, 3> lax_eigenvalues(const LaxOperator& L, double mu);

}  // namespace rod

#include "rod/lax.hpp"

#include <cmath>
#include <cstddef>

namespace rod {

LaxOperator lax_from_state(const FieldState& s, const RodParams& p) {
    p.validate();
    if (!p.isotropic())
        throw ConfigError("lax_from_state: the pair exists only for K1 == K2");
    LaxOperator L;
    L.level = s.level;
    L.K = p.K1;
    L.coeff.resize(static_cast<std::size_t>(s.level) + 2);
    L.coeff[0] = L.K * kD3;
    for (int i = 0; i <= s.level; ++i) L.coeff[static_cast<std::size_t>(i) + 1] = s.f[i];
    return L;
}

Vec3 lax_vector(const LaxOperator& L, double mu) {
    // Horner evaluation in 1/mu of the part below mu^1, then add the top term.
    Vec3 acc{0.0, 0.0, 0.0};
    for (std::size_t j = L.coeff.size(); j-- > 1;) acc = acc / mu + L.coeff[j];
    return acc + mu * L.coeff[0];
}

Mat3 lax_matrix(const LaxOperator& L, double mu) { return hat(lax_vector(L, mu)); }

Mat3 lax_flow_matrix(const LaxOperator& L, const RodParams& p, double mu) {
    const Vec3 m = L.coeff.size() > 1 ? L.coeff[1] : Vec3{};
    return hat(mu * kD3 + strains(m, p));
}

LaxOperator lax_derivative(const LaxOperator& L, const RodParams& p) {
    const Vec3 u = strains(L.coeff.size() > 1 ? L.coeff[1] : Vec3{}, p);
    LaxOperator d;
    d.level = L.level;
    d.K = L.K;
    d.coeff.resize(L.coeff.size());
    for (std::size_t j = 0; j < L.coeff.size(); ++j) {
        Vec3 v = cross(L.coeff[j], u);
        if (j + 1 < L.coeff.size()) v += cross(L.coeff[j + 1], kD3);
        d.coeff[j] = v;
    }
    return d;
}

Mat3 commutator(const Mat3& a, const Mat3& b) {
    const Mat3 ab = a * b, ba = b * a;
    Mat3 c;
    for (std::size_t i = 0; i < 9; ++i) c.a[i] = ab.a[i] - ba.a[i];
    return c;
}

SpectralInvariants spectral_invariants(const LaxOperator& L) {
    SpectralInvariants inv;
    inv.level = L.level;
    inv.values.assign(static_cast<std::size_t>(2 * L.level) + 3, 0.0);
    // g.g is a Laurent polynomial with powers 2 down to -2*level; the mu^(-i)
    // coefficient is the convolution sum over coeff pairs.
    for (std::size_t a = 0; a < L.coeff.size(); ++a)
        for (std::size_t b = 0; b < L.coeff.size(); ++b) {
            const int i = static_cast<int>(a + b) - 2;  // index of the mu^(-i) slot
            inv.values[static_cast<std::size_t>(i + 2)] +=
                0.5 * dot(L.coeff[a], L.coeff[b]);
        }
    return inv;
}

double lax_hamiltonian(const LaxOperator& L, const RodParams& p) {
    const SpectralInvariants inv = spectral_invariants(L);
    const double twist = inv.at(-1) / L.K;  // = m3
    return inv.at(0) / L.K + (L.K - p.K3) / (2.0 * L.K * p.K3) * twist * twist;
}

std::array<std::complex<double>, 3> lax_eigenvalues(const LaxOperator& L, double mu) {
    const Vec3 g = lax_vector(L, mu);
    const double r = std::sqrt(dot(g, g));
    return {std::complex<double>{0.0, 0.0}, std::complex<double>{0.0, r},
            std::complex<double>{0.0, -r}};
}

}  // namespace rod

// The four-level rod hierarchy: states, stiffness parameters, Hamiltonians,
// equations of motion, Casimirs, conditional first integrals and alignment.
//
// Levels: 0 force-free rod (m), 1 Kirchhoff rod (m, n), 2 conducting rod in a
// uniform magnetic field (m, n, B), 3 rod in a linearly varying field (m, n, B, D).
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rod/errors.hpp"
#include "rod/vec3.hpp"

namespace rod {

// Body-frame direction of the centreline tangent.
inline constexpr Vec3 kD3{0.0, 0.0, 1.0};

struct RodParams {
    double K1 = 1.0, K2 = 1.0, K3 = 1.0;   // bending (1,2) and torsional (3) stiffnesses

    // Special stiffness cases are exact algebraic conditions set deliberately by
    // the caller, so equality is tested at tight relative tolerance.
    static constexpr double kRelTol = 1e-12;

    bool isotropic() const { return rel_equal(K1, K2); }
    bool kovalevskaya() const { return rel_equal(K1, K3) && rel_equal(K1, 2.0 * K2); }
    bool chaplygin() const { return rel_equal(K1, 4.0 * K2) && rel_equal(K1, K3); }

    void validate() const {
        if (!(K1 > 0.0) || !(K2 > 0.0) || !(K3 > 0.0))
            throw ConfigError("RodParams: stiffnesses must be strictly positive");
    }

private:
    static bool rel_equal(double a, double b) {
        double scale = std::max(std::fabs(a), std::fabs(b));
        return std::fabs(a - b) <= kRelTol * std::max(scale, 1.0);
    }
};

// State of a level-n model: the n+1 body-frame field triples.
struct FieldState {
    int level = 0;                  // 0..3
    std::array<Vec3, 4> f{};        // f[0]=m, f[1]=n, f[2]=B, f[3]=D

    FieldState() = default;
    explicit FieldState(int lvl) : level(lvl) { check_level(lvl); }

    Vec3& m() { return f[0]; }
    Vec3& n() { return f[1]; }
    Vec3& B() { return f[2]; }
    Vec3& D() { return f[3]; }
    const Vec3& m() const { return f[0]; }
    const Vec3& n() const { return f[1]; }
    const Vec3& B() const { return f[2]; }
    const Vec3& D() const { return f[3]; }

    std::size_t dim() const { return 3 * static_cast<std::size_t>(level + 1); }

    std::vector<double> flat() const {
        std::vector<double> v(dim());
        for (int i = 0; i <= level; ++i)
            for (int j = 0; j < 3; ++j) v[3 * i + j] = f[i][j];
        return v;
    }

    static FieldState from_flat(int level, const std::vector<double>& v) {
        check_level(level);
        if (v.size() != 3 * static_cast<std::size_t>(level + 1))
            throw ConfigError("FieldState: flat vector size does not match level");
        FieldState s(level);
        for (int i = 0; i <= level; ++i)
            for (int j = 0; j < 3; ++j) s.f[i][j] = v[3 * i + j];
        return s;
    }

    static void check_level(int lvl) {
        if (lvl < 0 || lvl > 3) throw ConfigError("hierarchy level must be 0..3");
    }
};

// Hooke's law u_i = m_i / K_i.
inline Vec3 strains(const Vec3& m, const RodParams& p) {
    return {m.x / p.K1, m.y / p.K2, m.z / p.K3};
}

// H = (1/2) sum m_i^2 / K_i, plus n3 from level 1 on. Independent of B and D.
inline double hamiltonian(const FieldState& s, const RodParams& p) {
    const Vec3& m = s.m();
    double h = 0.5 * (m.x * m.x / p.K1 + m.y * m.y / p.K2 + m.z * m.z / p.K3);
    if (s.level >= 1) h += s.n().z;
    return h;
}

// Equations of motion. Each field rotates with the strain u; every field except
// the top one is additionally forced by the next field crossed with d3:
//   m' = m x u + n x d3,  n' = n x u + B x d3,  B' = B x u + D x d3,  D' = D x u
// truncated at the state's level.
inline FieldState rhs(const FieldState& s, const RodParams& p) {
    Vec3 u = strains(s.m(), p);
    FieldState d(s.level);
    for (int i = 0; i <= s.level; ++i) {
        d.f[i] = cross(s.f[i], u);
        if (i + 1 <= s.level) d.f[i] += cross(s.f[i + 1], kD3);
    }
    return d;
}

// The level's Casimir tuple, in the order the invariants are usually listed:
//   level 0: m.m
//   level 1: n.m, n.n
//   level 2: n.n/2 + m.B, B.n, B.B
//   level 3: m.D + n.B, B.B/2 + n.D, B.D, D.D
std::vector<double> casimirs(const FieldState& s);

// Gradients of the Casimirs with respect to the flat state, stacked per Casimir.
// Every gradient lies in the null space of the structure matrix.
std::vector<std::vector<double>> casimir_gradients(const FieldState& s);

// First integrals conditional on the stiffness parameters.
struct IntegralEntry {
    std::string name;    // "I_twist", "I_magnetic", "I_hyper", "I_kovalevskaya", "I_chaplygin"
    double value;
    bool active;         // stiffness (and m.n) condition satisfied
};

struct InvariantLedger {
    double hamiltonian = 0.0;
    std::vector<double> casimirs;
    std::vector<IntegralEntry> integrals;
};

// Evaluates every integral defined at the state's level and flags those whose
// applicability condition holds. K in the isotropic integrals is K1 (= K2 when active).
std::vector<IntegralEntry> first_integrals(const FieldState& s, const RodParams& p);

inline InvariantLedger invariants(const FieldState& s, const RodParams& p) {
    return {hamiltonian(s, p), casimirs(s), first_integrals(s, p)};
}

// |n x B| at level 2, |B x D| at level 3; zero on the superintegrable aligned
// subspace (all fields parallel to d3: twisted straight rods, which are fixed
// points of the flow).
inline double alignment_defect(const FieldState& s) {
    if (s.level < 2) throw ConfigError("alignment_defect requires level >= 2");
    double d = norm(cross(s.n(), s.B()));
    if (s.level == 3) d = std::max(d, norm(cross(s.B(), s.D())));
    return d;
}

}  // namespace rod

#include "rod/models.hpp"

namespace rod {

std::vector<double> casimirs(const FieldState& s) {
    const Vec3 &m = s.m(), &n = s.n(), &B = s.B(), &D = s.D();
    switch (s.level) {
        case 0: return {dot(m, m)};
        case 1: return {dot(n, m), dot(n, n)};
        case 2: return {0.5 * dot(n, n) + dot(m, B), dot(B, n), dot(B, B)};
        default:
            return {dot(m, D) + dot(n, B), 0.5 * dot(B, B) + dot(n, D), dot(B, D), dot(D, D)};
    }
}

namespace {

// Stacks per-field gradient triples into a flat gradient of dimension 3(level+1).
std::vector<double> stack(int level, const Vec3& gm, const Vec3& gn = {}, const Vec3& gB = {},
                          const Vec3& gD = {}) {
    std::array<Vec3, 4> g{gm, gn, gB, gD};
    std::vector<double> out(3 * static_cast<std::size_t>(level + 1));
    for (int i = 0; i <= level; ++i)
        for (int j = 0; j < 3; ++j) out[3 * i + j] = g[static_cast<std::size_t>(i)][j];
    return out;
}

}  // namespace

std::vector<std::vector<double>> casimir_gradients(const FieldState& s) {
    const Vec3 &m = s.m(), &n = s.n(), &B = s.B(), &D = s.D();
    switch (s.level) {
        case 0: return {stack(0, 2.0 * m)};
        case 1: return {stack(1, n, m), stack(1, Vec3{}, 2.0 * n)};
        case 2:
            return {stack(2, B, n, m), stack(2, Vec3{}, B, n), stack(2, Vec3{}, Vec3{}, 2.0 * B)};
        default:
            return {stack(3, D, B, n, m), stack(3, Vec3{}, D, B, n),
                    stack(3, Vec3{}, Vec3{}, D, B), stack(3, Vec3{}, Vec3{}, Vec3{}, 2.0 * D)};
    }
}

std::vector<IntegralEntry> first_integrals(const FieldState& s, const RodParams& p) {
    std::vector<IntegralEntry> out;
    if (s.level < 1) return out;   // level 0 carries only H and the Casimir

    const Vec3 &m = s.m(), &n = s.n(), &B = s.B(), &D = s.D();
    const double K = p.K1;
    const bool iso = p.isotropic();

    // Twist conservation (Lagrange case): I = K m3, needs K1 = K2.
    out.push_back({"I_twist", K * dot(m, kD3), iso});

    if (s.level >= 2)
        out.push_back({"I_magnetic", dot(n, m) + K * dot(B, kD3), iso});
    if (s.level >= 3)
        out.push_back({"I_hyper", 0.5 * dot(n, n) + dot(m, B) + K * dot(D, kD3), iso});

    // Kovalevskaya case (K1 = K3 = 2 K2), as printed.  Conserved only at level 1
    // and only at the absolute scale 2 K1^3 = 1; at level 2 it drifts, which is
    // the non-integrability evidence the tests assert.
    {
        double a = p.K1 * p.K1 * m.x * m.x - p.K3 * p.K3 * m.z * m.z + n.z;
        double b = 2.0 * p.K1 * p.K3 * m.x * m.z - n.x;
        out.push_back({"I_kovalevskaya", a * a + b * b, p.kovalevskaya()});
    }

    // Chaplygin-Goryachev case (K1 = 4 K2 = K3, m.n = 0).  The perp-moment factor
    // is (K1 m1)^2 + (K3 m3)^2; conserved at level 1 when K1^3 = 4.
    {
        double v = p.K2 * m.y * (p.K1 * p.K1 * m.x * m.x + p.K3 * p.K3 * m.z * m.z)
                 - p.K3 * m.z * n.y;
        double mn = dot(m, n);
        double scale = std::max({std::fabs(norm(m) * norm(n)), 1.0});
        bool planar = std::fabs(mn) <= RodParams::kRelTol * scale;
        out.push_back({"I_chaplygin", v, p.chaplygin() && planar});
    }
    return out;
}

}  // namespace rod

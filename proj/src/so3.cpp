#include "rod/so3.hpp"

namespace rod {

Matrix structure_matrix(const FieldState& s, int level) {
    FieldState::check_level(level);
    if (s.level < level)
        throw ConfigError("structure_matrix: state carries fewer triples than requested level");
    std::size_t nb = static_cast<std::size_t>(level) + 1;
    Matrix J(3 * nb, 3 * nb);
    for (std::size_t bi = 0; bi < nb; ++bi)
        for (std::size_t bj = 0; bj < nb; ++bj) {
            if (bi + bj > static_cast<std::size_t>(level)) continue;
            Mat3 h = hat(s.f[bi + bj]);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    J(3 * bi + i, 3 * bj + j) = h(i, j);
        }
    return J;
}

std::vector<double> num_gradient(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x, double step) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xi = x[i];
        auto eval = [&](double d) {
            xp[i] = xi + d;
            return f(xp);
        };
        // 4th-order: (-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / (12 h)
        g[i] = (-eval(2 * step) + 8 * eval(step) - 8 * eval(-step) + eval(-2 * step)) / (12 * step);
        xp[i] = xi;
    }
    return g;
}

double lie_poisson_bracket(const ScalarField& f, const ScalarField& g, const FieldState& s,
                           int level) {
    std::vector<double> z = s.flat();
    z.resize(3 * static_cast<std::size_t>(level + 1));
    std::vector<double> gf = f.gradient ? f.gradient(z) : num_gradient(f.value, z);
    std::vector<double> gg = g.gradient ? g.gradient(z) : num_gradient(g.value, z);
    Matrix J = structure_matrix(s, level);
    std::vector<double> Jg = J * gg;
    double acc = 0.0;
    for (std::size_t i = 0; i < gf.size(); ++i) acc += gf[i] * Jg[i];
    return acc;
}

}  // namespace rod

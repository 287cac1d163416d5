// Block structure matrices of the hierarchy brackets and the Lie-Poisson bracket
// itself, evaluated on scalar observables of the stacked state.
#pragma once

#include <functional>
#include <vector>

#include "rod/matrix.hpp"
#include "rod/models.hpp"
#include "rod/vec3.hpp"

namespace rod {

// Anti-triangular block layout:  block (i, j) = hat(f[i+j]) when i+j <= n, else 0.
// Level 2, for instance:
//     ( m^  n^  B^ )
//     ( n^  B^  0  )
//     ( B^  0   0  )
// J is antisymmetric because each hat block is, and J grad(H) reproduces the
// equations of motion.
Matrix structure_matrix(const FieldState& s, int level);

// A scalar observable of the flat state with an optional analytic gradient.
// When no gradient is supplied, 4th-order central differences with the
// documented step are used, so nested bracket evaluations stay within an
// understood accuracy budget.
struct ScalarField {
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;  // optional

    static constexpr double kGradStep = 1e-5;
};

// 4th-order central-difference gradient of f at x.
std::vector<double> num_gradient(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x, double step = ScalarField::kGradStep);

// {f, g}(z) = grad f . J(z) . grad g
//           = - sum over blocks of field_(i+j) . (grad_i f x grad_j g),
// which reproduces the printed per-level bracket formulas.
double lie_poisson_bracket(const ScalarField& f, const ScalarField& g, const FieldState& s,
                           int level);

}  // namespace rod

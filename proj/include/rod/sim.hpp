// Driving layer: integrates the field equations, tracks conserved quantities
// along the way, and rebuilds the space curve (frame + centreline) that a
// field history encodes.
#pragma once

#include <cstddef>
#include <vector>

#include "rod/integrate.hpp"
#include "rod/models.hpp"
#include "rod/vec3.hpp"

namespace rod {

struct SimOptions {
    double tol = 1e-10;
    double fixed_step = 0.0;   // >0 switches the integrator to fixed steps
    std::size_t samples = 201;  // equally spaced ledger/output points
    // Optional clean-up applied after every accepted step: a Newton projection
    // back onto the initial Casimir level set.  Off by default; the unprojected
    // drift is itself a correctness signal.
    bool project_casimirs = false;
};

struct SimResult {
    Trajectory trajectory;
    FieldState initial;
    FieldState final_state;
    std::vector<double> sample_s;
    std::vector<FieldState> sample_states;
    std::vector<InvariantLedger> sample_ledgers;
    // Largest |value(s) - value(0)| seen over the samples.
    double hamiltonian_drift = 0.0;
    std::vector<double> casimir_drift;
    std::vector<double> integral_drift;  // aligned with first_integrals() order
};

SimResult simulate(const FieldState& initial, const RodParams& params, double s_end,
                   const SimOptions& opt = {});

// Space curve recovered from a field trajectory: the frame follows the strains
// u(s) and the centreline follows the third frame vector.
struct FramedCurve {
    std::vector<double> s;
    std::vector<Vec3> centreline;
    std::vector<Mat3> frames;  // columns are the frame vectors in fixed coordinates
};

FramedCurve reconstruct(const Trajectory& field_trajectory, const RodParams& params,
                        std::size_t samples, double tol = 1e-12,
                        const Quat& frame0 = Quat{1.0, 0.0, 0.0, 0.0},
                        const Vec3& origin = Vec3{0.0, 0.0, 0.0});

}  // namespace rod

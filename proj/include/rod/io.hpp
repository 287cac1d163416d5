// CSV output with full round-trip precision (17 significant digits).
#pragma once

#include <string>
#include <vector>

#include "rod/poincare.hpp"
#include "rod/sim.hpp"

namespace rod {

std::string format_g17(double x);

// One row per ledger sample: s, field components, Hamiltonian, Casimirs and
// the (possibly inactive) named integrals.
void write_trajectory_csv(const std::string& path, const SimResult& res);

// Columns orbit_id, s, theta, p_theta, residual.
void write_section_csv(const std::string& path, const std::vector<SectionPoint>& pts);

// Reduced-system samples: s, the six chart coordinates and, when supplied,
// extra named columns (energy, integral) aligned with the rows.
void write_reduced_csv(const std::string& path, const std::vector<double>& s,
                       const std::vector<CanonicalState>& states,
                       const std::vector<std::string>& extra_names = {},
                       const std::vector<std::vector<double>>& extra_cols = {});

void write_curve_csv(const std::string& path, const FramedCurve& curve);

}  // namespace rod

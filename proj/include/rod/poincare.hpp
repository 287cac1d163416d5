// Section machinery for the isotropic reduced flow: detect crossings of the
// plane cos(psi) = alpha along orbits, manufacture seeds on prescribed level
// sets of the two integrals, and quantify whether the resulting point clouds
// trace curves (integrable signature) or scatter.
#pragma once

#include <cstddef>
#include <vector>

#include "rod/models.hpp"
#include "rod/reduction.hpp"

namespace rod {

enum class CrossingDirection { kBoth, kIncreasing, kDecreasing };

struct SectionSpec {
    double alpha = 0.5;  // section plane cos(psi) = alpha, |alpha| < 1
    CrossingDirection direction = CrossingDirection::kBoth;
    std::size_t max_crossings = 250;
    double max_arclength = 2500.0;
    double tol = 1e-12;  // integrator tolerance along the orbit
};

struct SectionPoint {
    std::size_t orbit_id = 0;
    double s = 0.0;
    double theta = 0.0;
    double p_theta = 0.0;
    double residual = 0.0;  // |cos(psi) - alpha| after refinement
    CanonicalState state;   // full chart coordinates at the crossing
};

// Plot window of the section plane; also sets the normalisation used by the
// curve statistics.
struct SectionWindow {
    double theta_min = 0.0, theta_max = 2.5;
    double p_theta_min = -1.5, p_theta_max = 1.5;
};

bool in_window(const SectionPoint& pt, const SectionWindow& win);

std::vector<SectionPoint> find_crossings(const CanonicalState& z0,
                                         const CasimirTriple& cas, const RodParams& p,
                                         const SectionSpec& spec,
                                         std::size_t orbit_id = 0);

// Deterministic grid-plus-bisection search for states on {H = h, I = iota,
// cos(psi) = alpha} at the given p_phi.  Returns up to `count` distinct seeds;
// throws NoSeedFound when none exists within the scanned region.
std::vector<CanonicalState> seeds_on_level_set(double h, double iota, double alpha,
                                               double p_phi, const CasimirTriple& cas,
                                               const RodParams& p,
                                               std::size_t count = 1);

struct ScanResult {
    std::vector<SectionPoint> points;    // ordered by orbit, then arclength
    std::vector<std::size_t> per_orbit;  // crossing counts
};

// Sections of many orbits; identical output whether run serially or with the
// OpenMP path, since each orbit fills its own slot.
ScanResult scan(const std::vector<CanonicalState>& seeds, const CasimirTriple& cas,
                const RodParams& p, const SectionSpec& spec, bool parallel = true);

// Shape of a section cloud in window-normalised coordinates:
//  - median over points of sqrt(lmin/lmax) of the covariance of the point and
//    its 6 nearest neighbours (local thickness; small on a curve), and
//  - the largest nearest-neighbour distance (large when points scatter or
//    leave gaps).
struct CurveStats {
    double median_thickness = 0.0;
    double max_nn_gap = 0.0;
};

CurveStats curve_statistic(const std::vector<SectionPoint>& pts,
                           const SectionWindow& win = {});

}  // namespace rod

// Error taxonomy: config errors exit 2 from the CLI, numerical errors exit 3.
#pragma once

#include <stdexcept>
#include <string>

namespace rod {

// Invalid user input: malformed config, bad level, inconsistent targets.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during a run (integration breakdown, chart singularity hit, ...).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// n parallel to B: the Euler-angle chart is undefined (v_perp = 0).
struct AlignedState : NumericalError {
    explicit AlignedState(const std::string& msg) : NumericalError(msg) {}
};

// sin(theta) ~ 0: Euler-angle gimbal singularity.
struct GimbalSingular : NumericalError {
    explicit GimbalSingular(const std::string& msg) : NumericalError(msg) {}
};

// v_perp^2 = 2C1 - C2^2/C3 - 2 sqrt(C3) p_psi went negative.
struct NegativeRadicand : NumericalError {
    explicit NegativeRadicand(const std::string& msg) : NumericalError(msg) {}
};

// seed_on_level_set exhausted its attempt budget.
struct NoSeedFound : NumericalError {
    explicit NoSeedFound(const std::string& msg) : NumericalError(msg) {}
};

// Adaptive stepper could not proceed (step underflow / non-finite state).
struct IntegrationError : NumericalError {
    double s_reached;
    IntegrationError(const std::string& msg, double s) : NumericalError(msg), s_reached(s) {}
};

}  // namespace rod

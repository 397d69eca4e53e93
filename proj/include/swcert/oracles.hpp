// Brute-force ground truth, independent of the LMI machinery: spectral
// radius of periodic cycle products and exhaustive search for instability
// witnesses. Absence of a witness is never a stability proof.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "swcert/cycles.hpp"
#include "swcert/eigen.hpp"
#include "swcert/matrix.hpp"
#include "swcert/system.hpp"

namespace swcert {

inline constexpr double kUnitCircleTol = 1e-9;

enum class PeriodicVerdict { Stable, Unstable, Indeterminate };

inline const char* to_string(PeriodicVerdict v) {
    switch (v) {
        case PeriodicVerdict::Stable: return "stable";
        case PeriodicVerdict::Unstable: return "unstable";
        case PeriodicVerdict::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

struct PeriodicOracleResult {
    double radius = 0.0;
    PeriodicVerdict verdict = PeriodicVerdict::Indeterminate;
};

namespace detail {

// repeating the cycle forever is itself an admissible signal only when the
// seam does not glue two activations of the same mode together
inline bool repetition_admissible(const CycleSpec& cycle) {
    return cycle.length() == 1 || cycle.modes.front() != cycle.modes.back();
}

}  // namespace detail

/// Periodic repetition test: the repeated cycle converges iff the spectral
/// radius of its transition product is below one. Radii inside the band
/// [1 - tol, 1 + tol] are reported indeterminate.
inline PeriodicOracleResult periodic_stability_oracle(const SwitchedSystem& sys, const CycleSpec& cycle,
                                                      double tol = kUnitCircleTol) {
    for (std::size_t i = 0; i < cycle.modes.size(); ++i) {
        const int m = cycle.modes[i];
        const int d = cycle.durations[i];
        if (m < 1 || m > sys.num_modes()) throw std::invalid_argument("cycle mode index out of range");
        if (d < sys.dwell_min || d > sys.dwell_max)
            throw std::invalid_argument("cycle duration outside dwell range");
        if (i > 0 && m == cycle.modes[i - 1])
            throw std::invalid_argument("cycle repeats a mode across consecutive activations");
    }
    if (!detail::repetition_admissible(cycle))
        throw std::invalid_argument("cycle repetition is inadmissible: first and last modes coincide");

    PeriodicOracleResult result;
    result.radius = spectral_radius(transition_matrix(sys, cycle), tol);
    if (result.radius < 1.0 - tol)
        result.verdict = PeriodicVerdict::Stable;
    else if (result.radius > 1.0 + tol)
        result.verdict = PeriodicVerdict::Unstable;
    else
        result.verdict = PeriodicVerdict::Indeterminate;
    return result;
}

struct WitnessReport {
    bool found = false;
    std::optional<CycleSpec> cycle;
    double radius = 0.0;
};

/// Scan all admissible cycles with admissible repetition for L = 1..L_max and
/// return the first whose product has spectral radius confidently at or above
/// one, in (L, rank) order. found == false proves nothing about stability.
inline WitnessReport instability_witness_search(const SwitchedSystem& sys, int length_max,
                                                long long cap = kDefaultCycleCap, double tol = kUnitCircleTol) {
    if (length_max < 1) throw std::invalid_argument("length_max must be positive");
    WitnessReport report;
    PowerCache cache(sys);
    for (int length = 1; length <= length_max; ++length) {
        const CycleFamily family = enumerate_cycles(sys, length, cap);
        for (const CycleSpec& cycle : family.cycles) {
            if (!detail::repetition_admissible(cycle)) continue;
            const double radius = spectral_radius(transition_matrix(sys, cycle, &cache), tol);
            if (radius >= 1.0 + tol) {
                report.found = true;
                report.cycle = cycle;
                report.radius = radius;
                return report;
            }
        }
    }
    return report;
}

}  // namespace swcert

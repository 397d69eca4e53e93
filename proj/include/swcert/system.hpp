// Switched linear system model: mode matrices with a ranged dwell-time
// constraint, admissible switching signals, and trajectory simulation.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "swcert/matrix.hpp"

namespace swcert {

/// Discrete-time switched linear system x(k+1) = A_m x(k) where the active
/// mode m is chosen by a switching signal whose dwell times lie in
/// [dwell_min, dwell_max]. Mode indices are 1-based externally.
struct SwitchedSystem {
    int state_dim = 0;
    std::vector<Matrix> modes;  // stored 0-based; mode(i) accepts 1-based i
    int dwell_min = 1;
    int dwell_max = 1;

    int num_modes() const { return static_cast<int>(modes.size()); }
    /// Number of admissible dwell values, dwell_max - dwell_min + 1.
    int dwell_count() const { return dwell_max - dwell_min + 1; }

    const Matrix& mode(int one_based) const {
        if (one_based < 1 || one_based > num_modes())
            throw std::invalid_argument("mode index out of range: " + std::to_string(one_based));
        return modes[static_cast<std::size_t>(one_based - 1)];
    }

    /// Copy of this system with the dwell interval replaced; used by sweeps
    /// that probe periodic switching with dwell [tau, tau].
    SwitchedSystem with_dwell(int lo, int hi) const {
        SwitchedSystem s = *this;
        s.dwell_min = lo;
        s.dwell_max = hi;
        if (!(1 <= lo && lo <= hi)) throw std::invalid_argument("dwell bounds: need 1 <= min <= max");
        return s;
    }
};

/// Validating constructor; every invariant failure carries a distinct message.
inline SwitchedSystem make_switched_system(int state_dim, std::vector<Matrix> modes, int dwell_min, int dwell_max) {
    if (state_dim <= 0) throw std::invalid_argument("state_dim must be positive");
    if (modes.size() < 2) throw std::invalid_argument("need at least two modes");
    if (!(1 <= dwell_min && dwell_min <= dwell_max))
        throw std::invalid_argument("dwell bounds: need 1 <= min <= max");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Matrix& m = modes[i];
        if (m.rows() != state_dim || m.cols() != state_dim)
            throw std::invalid_argument("dimension mismatch: mode " + std::to_string(i + 1) + " is " +
                                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                        ", expected " + std::to_string(state_dim) + "x" +
                                        std::to_string(state_dim));
        if (!m.all_finite())
            throw std::invalid_argument("mode " + std::to_string(i + 1) + " has non-finite entries");
    }
    SwitchedSystem sys;
    sys.state_dim = state_dim;
    sys.modes = std::move(modes);
    sys.dwell_min = dwell_min;
    sys.dwell_max = dwell_max;
    return sys;
}

struct Segment {
    int mode = 0;      // 1-based
    int duration = 0;  // steps
};

/// Piecewise-constant switching signal given as (mode, duration) segments.
struct SwitchingSignal {
    std::vector<Segment> segments;

    long long total_duration() const {
        long long t = 0;
        for (const Segment& s : segments) t += s.duration;
        return t;
    }
};

/// Throws std::invalid_argument naming the violated admissibility constraint.
inline void check_admissible(const SwitchedSystem& sys, const SwitchingSignal& sig) {
    if (sig.segments.empty()) throw std::invalid_argument("signal has no segments");
    int prev_mode = 0;
    for (std::size_t i = 0; i < sig.segments.size(); ++i) {
        const Segment& s = sig.segments[i];
        if (s.mode < 1 || s.mode > sys.num_modes())
            throw std::invalid_argument("signal segment " + std::to_string(i + 1) + ": mode index out of range");
        if (s.duration < sys.dwell_min || s.duration > sys.dwell_max)
            throw std::invalid_argument("signal segment " + std::to_string(i + 1) + ": duration " +
                                        std::to_string(s.duration) + " outside dwell range [" +
                                        std::to_string(sys.dwell_min) + "," + std::to_string(sys.dwell_max) + "]");
        if (static_cast<int>(i) > 0 && s.mode == prev_mode)
            throw std::invalid_argument("signal segment " + std::to_string(i + 1) +
                                        ": consecutive segments repeat mode " + std::to_string(s.mode));
        prev_mode = s.mode;
    }
}

/// Active mode at step k. Signals shorter than k repeat cyclically.
inline int signal_mode_at(const SwitchingSignal& sig, long long k) {
    const long long total = sig.total_duration();
    k %= total;
    for (const Segment& s : sig.segments) {
        if (k < s.duration) return s.mode;
        k -= s.duration;
    }
    return sig.segments.back().mode;  // unreachable
}

struct Trajectory {
    std::vector<std::vector<double>> states;  // x(0..K)
    std::vector<int> modes;                   // active mode per step, size K
};

/// Simulate K steps. The signal repeats cyclically past its end; a cyclic
/// wrap that would place the same mode on both sides of the seam is rejected
/// (a single-segment signal is a constant signal and is allowed).
inline Trajectory simulate(const SwitchedSystem& sys, const SwitchingSignal& sig, const std::vector<double>& x0,
                           long long horizon) {
    check_admissible(sys, sig);
    if (static_cast<int>(x0.size()) != sys.state_dim)
        throw std::invalid_argument("initial state has wrong dimension");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    if (sig.total_duration() < horizon && sig.segments.size() > 1 &&
        sig.segments.back().mode == sig.segments.front().mode)
        throw std::invalid_argument("cyclic repetition of the signal repeats mode " +
                                    std::to_string(sig.segments.front().mode) + " across the seam");

    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.modes.reserve(static_cast<std::size_t>(horizon));
    traj.states.push_back(x0);
    std::vector<double> x = x0;
    for (long long k = 0; k < horizon; ++k) {
        const int m = signal_mode_at(sig, k);
        x = sys.mode(m) * x;
        traj.states.push_back(x);
        traj.modes.push_back(m);
    }
    return traj;
}

/// Deterministic admissible signal: modes uniform over allowed successors,
/// durations uniform over the dwell range. Draws use explicit modular
/// arithmetic on mt19937_64 output so results do not depend on standard
/// library distribution internals.
inline SwitchingSignal random_admissible_signal(const SwitchedSystem& sys, std::uint64_t seed, int num_segments) {
    if (num_segments < 1) throw std::invalid_argument("num_segments must be positive");
    std::mt19937_64 gen(seed);
    const int n_modes = sys.num_modes();
    const int d = sys.dwell_count();
    SwitchingSignal sig;
    sig.segments.reserve(static_cast<std::size_t>(num_segments));
    int prev = 0;
    for (int i = 0; i < num_segments; ++i) {
        int mode;
        if (i == 0) {
            mode = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(n_modes));
        } else {
            // uniform over {1..N} \ {prev}
            int r = static_cast<int>(gen() % static_cast<std::uint64_t>(n_modes - 1));
            mode = (r + 1 <= prev - 1) ? r + 1 : r + 2;
        }
        const int duration = sys.dwell_min + static_cast<int>(gen() % static_cast<std::uint64_t>(d));
        sig.segments.push_back({mode, duration});
        prev = mode;
    }
    return sig;
}

}  // namespace swcert

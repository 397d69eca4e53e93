// Enumeration of switching cycles: blocks of L consecutive mode activations
// with no immediate repeats and dwell times in the admissible range, ordered
// lexicographically (mode sequence first, then duration tuple).
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swcert/matrix.hpp"
#include "swcert/system.hpp"

namespace swcert {

/// One switching cycle: L mode activations and their durations.
struct CycleSpec {
    std::vector<int> modes;      // 1-based, consecutive entries distinct
    std::vector<int> durations;  // same length as modes
    int index = 0;               // 1-based lexicographic rank within its family

    int length() const { return static_cast<int>(modes.size()); }

    int total_duration() const {
        int t = 0;
        for (int d : durations) t += d;
        return t;
    }

    /// Mode active at step k of the cycle, k in [0, total_duration).
    int mode_at_step(int k) const {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            if (k < durations[i]) return modes[i];
            k -= durations[i];
        }
        throw std::invalid_argument("mode_at_step: step index beyond cycle duration");
    }
};

struct CycleFamily {
    SwitchedSystem system;
    int L = 0;
    std::vector<CycleSpec> cycles;

    std::size_t size() const { return cycles.size(); }
    const CycleSpec& cycle(int h) const {  // 1-based
        if (h < 1 || h > static_cast<int>(cycles.size()))
            throw std::invalid_argument("cycle index out of range: " + std::to_string(h));
        return cycles[static_cast<std::size_t>(h - 1)];
    }
};

/// Number of cycles N(N-1)^(L-1) d^L. Saturates at a large sentinel instead
/// of overflowing.
inline long long cycle_count(int num_modes, int dwell_values, int length) {
    const long long kSat = 1LL << 62;
    long long c = num_modes;
    for (int i = 1; i < length; ++i) {
        c *= (num_modes - 1);
        if (c > kSat / (dwell_values + 1)) return kSat;
    }
    for (int i = 0; i < length; ++i) {
        c *= dwell_values;
        if (c > kSat) return kSat;
    }
    return c;
}

inline constexpr long long kDefaultCycleCap = 20000;

/// All admissible cycles of length L in lexicographic order: mode sequences
/// compared position by position, duration tuples as the secondary key.
inline CycleFamily enumerate_cycles(const SwitchedSystem& sys, int length, long long cap = kDefaultCycleCap) {
    if (length < 1) throw std::invalid_argument("cycle length must be positive");
    const int n_modes = sys.num_modes();
    const int d = sys.dwell_count();
    const long long count = cycle_count(n_modes, d, length);
    if (count > cap)
        throw std::invalid_argument("cycle enumeration would produce " + std::to_string(count) +
                                    " cycles, above the cap of " + std::to_string(cap));

    CycleFamily family;
    family.system = sys;
    family.L = length;
    family.cycles.reserve(static_cast<std::size_t>(count));

    std::vector<int> modes(static_cast<std::size_t>(length));
    std::vector<int> durations(static_cast<std::size_t>(length));

    // Iterate duration tuples for a fixed mode sequence, lexicographically.
    auto emit_durations = [&](auto&& self, int pos) -> void {
        if (pos == length) {
            CycleSpec c;
            c.modes = modes;
            c.durations = durations;
            c.index = static_cast<int>(family.cycles.size()) + 1;
            family.cycles.push_back(std::move(c));
            return;
        }
        for (int tau = sys.dwell_min; tau <= sys.dwell_max; ++tau) {
            durations[static_cast<std::size_t>(pos)] = tau;
            self(self, pos + 1);
        }
    };
    auto emit_modes = [&](auto&& self, int pos) -> void {
        if (pos == length) {
            emit_durations(emit_durations, 0);
            return;
        }
        for (int m = 1; m <= n_modes; ++m) {
            if (pos > 0 && m == modes[static_cast<std::size_t>(pos - 1)]) continue;
            modes[static_cast<std::size_t>(pos)] = m;
            self(self, pos + 1);
        }
    };
    emit_modes(emit_modes, 0);
    return family;
}

/// Lexicographic rank (1-based) of a cycle within enumerate_cycles' order.
inline int cycle_rank(const SwitchedSystem& sys, const std::vector<int>& modes, const std::vector<int>& durations) {
    if (modes.empty() || modes.size() != durations.size())
        throw std::invalid_argument("cycle_rank: modes and durations must be nonempty and equal length");
    const int n_modes = sys.num_modes();
    const int d = sys.dwell_count();
    const int length = static_cast<int>(modes.size());

    long long mode_rank = 0;
    for (int pos = 0; pos < length; ++pos) {
        const int m = modes[static_cast<std::size_t>(pos)];
        int digit;
        if (pos == 0) {
            digit = m - 1;
        } else {
            const int prev = modes[static_cast<std::size_t>(pos - 1)];
            if (m == prev) throw std::invalid_argument("cycle_rank: consecutive modes repeat");
            digit = (m < prev) ? m - 1 : m - 2;  // rank among {1..N} \ {prev}
        }
        const long long radix = (pos == 0) ? n_modes : n_modes - 1;
        mode_rank = mode_rank * radix + digit;
    }
    long long dur_rank = 0;
    for (int pos = 0; pos < length; ++pos) {
        const int tau = durations[static_cast<std::size_t>(pos)];
        if (tau < sys.dwell_min || tau > sys.dwell_max)
            throw std::invalid_argument("cycle_rank: duration outside dwell range");
        dur_rank = dur_rank * d + (tau - sys.dwell_min);
    }
    long long d_pow = 1;
    for (int i = 0; i < length; ++i) d_pow *= d;
    return static_cast<int>(mode_rank * d_pow + dur_rank + 1);
}

/// Memoizes mode-matrix powers; the sweep reuses them heavily.
class PowerCache {
public:
    explicit PowerCache(const SwitchedSystem& sys) : sys_(&sys) {}

    const Matrix& get(int mode, int exponent) {
        const auto key = std::make_pair(mode, exponent);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, mat_pow(sys_->mode(mode), exponent)).first;
        return it->second;
    }

private:
    const SwitchedSystem* sys_;
    std::map<std::pair<int, int>, Matrix> cache_;
};

/// State-transition product of a cycle: the last activation's power is the
/// leftmost factor, so x(T) = Phi x(0) along the cycle.
inline Matrix transition_matrix(const SwitchedSystem& sys, const CycleSpec& cycle, PowerCache* cache = nullptr) {
    Matrix phi = Matrix::identity(sys.state_dim);
    for (int i = 0; i < cycle.length(); ++i) {
        const int m = cycle.modes[static_cast<std::size_t>(i)];
        const int tau = cycle.durations[static_cast<std::size_t>(i)];
        const Matrix& power = cache ? cache->get(m, tau) : mat_pow(sys.mode(m), tau);
        phi = power * phi;
    }
    return phi;
}

enum class Condition { A, B };

struct ComplexityCounts {
    long long num_variables = 0;  // matrix-valued decision blocks
    long long num_lmis = 0;       // matrix-valued constraints
};

/// Decision-block and constraint counts for the two certificate forms.
/// Form B: (M, M^2). Form A: (sum_h (T_h + 1), M^2 + sum_h T_h); the step
/// constraints are counted per step, one for each k in [0, T_h - 1].
inline ComplexityCounts complexity_counts(const SwitchedSystem& sys, int length, Condition condition) {
    if (length < 1) throw std::invalid_argument("cycle length must be positive");
    const long long m_cycles = cycle_count(sys.num_modes(), sys.dwell_count(), length);
    ComplexityCounts counts;
    if (condition == Condition::B) {
        counts.num_variables = m_cycles;
        counts.num_lmis = m_cycles * m_cycles;
        return counts;
    }
    // sum over all cycles of T_h: durations are uniform over the dwell range,
    // so the closed form is M * L * (dwell_min + dwell_max) / 2.
    const long long sum_t = m_cycles * length * (sys.dwell_min + sys.dwell_max) / 2;
    counts.num_variables = sum_t + m_cycles;
    counts.num_lmis = m_cycles * m_cycles + sum_t;
    return counts;
}

/// Mode sequences for the fixed-step variant (dwell [1,1], immediate repeats
/// allowed): N^L sequences in lexicographic order, every duration 1.
inline std::vector<CycleSpec> enumerate_multistep(const SwitchedSystem& sys, int length,
                                                  long long cap = kDefaultCycleCap) {
    if (length < 1) throw std::invalid_argument("sequence length must be positive");
    const int n_modes = sys.num_modes();
    long long count = 1;
    for (int i = 0; i < length; ++i) {
        count *= n_modes;
        if (count > cap)
            throw std::invalid_argument("multistep enumeration would produce more than " + std::to_string(cap) +
                                        " sequences");
    }
    std::vector<CycleSpec> seqs;
    seqs.reserve(static_cast<std::size_t>(count));
    std::vector<int> modes(static_cast<std::size_t>(length), 1);
    for (long long r = 0; r < count; ++r) {
        long long v = r;
        for (int pos = length - 1; pos >= 0; --pos) {
            modes[static_cast<std::size_t>(pos)] = 1 + static_cast<int>(v % n_modes);
            v /= n_modes;
        }
        CycleSpec c;
        c.modes = modes;
        c.durations.assign(static_cast<std::size_t>(length), 1);
        c.index = static_cast<int>(r) + 1;
        seqs.push_back(std::move(c));
    }
    return seqs;
}

}  // namespace swcert

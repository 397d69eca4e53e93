// Assembly of the semidefinite feasibility systems behind the two
// certificate forms: clock-indexed Lyapunov sequences (condition "a") and
// per-cycle product-form Lyapunov matrices (condition "b"), plus the
// fixed-step variant for dwell range [1,1].
#pragma once

#include <string>
#include <vector>

#include "swcert/cycles.hpp"
#include "swcert/matrix.hpp"
#include "swcert/system.hpp"

namespace swcert {

/// One term sign * G^T X_b G of an affine matrix constraint.
struct LmiTerm {
    Matrix factor;    // G
    int block = 0;    // index into LmiProblem::blocks
    double sign = 1;  // +1 or -1
};

/// An affine constraint sum_terms sign * G^T X_b G required negative definite.
struct LmiConstraint {
    std::string label;
    int dim = 0;
    std::vector<LmiTerm> terms;
};

/// A symmetric decision block, tagged with its cycle and clock position.
/// clock == -1 marks a product-form block (one matrix per cycle).
struct LmiBlock {
    std::string label;
    int dim = 0;
    int cycle = 0;   // h, 1-based
    int clock = -1;  // k in [0, T_h] for clock-form blocks
};

/// Strict feasibility problem: find X_b > 0 with every constraint < 0.
/// Strictness is realized by the solver's margin formulation; the builder
/// emits the homogeneous forms only.
struct LmiProblem {
    std::vector<LmiBlock> blocks;
    std::vector<LmiConstraint> constraints;

    int block_index(int cycle, int clock) const {
        for (std::size_t i = 0; i < blocks.size(); ++i)
            if (blocks[i].cycle == cycle && blocks[i].clock == clock) return static_cast<int>(i);
        throw std::invalid_argument("no block for cycle " + std::to_string(cycle) + ", clock " +
                                    std::to_string(clock));
    }
};

/// Value of a constraint at a given block assignment.
inline Matrix eval_constraint(const LmiConstraint& con, const std::vector<SymMatrix>& assignment) {
    Matrix value(con.dim, con.dim);
    for (const LmiTerm& term : con.terms) {
        const Matrix& x = assignment.at(static_cast<std::size_t>(term.block)).as_matrix();
        Matrix contrib = term.factor.transposed() * x * term.factor;
        contrib *= term.sign;
        value += contrib;
    }
    return value;
}

/// Product-form system: blocks P_1..P_M, constraints
/// Phi_h^T P_h Phi_h - P_q < 0 over all ordered pairs (h, q), h = q included.
inline LmiProblem build_condition_b(const SwitchedSystem& sys, const CycleFamily& family) {
    const int n = sys.state_dim;
    const int m_cycles = static_cast<int>(family.size());
    LmiProblem problem;
    problem.blocks.reserve(static_cast<std::size_t>(m_cycles));
    for (int h = 1; h <= m_cycles; ++h)
        problem.blocks.push_back({"P" + std::to_string(h), n, h, -1});

    PowerCache cache(sys);
    std::vector<Matrix> products;
    products.reserve(static_cast<std::size_t>(m_cycles));
    for (int h = 1; h <= m_cycles; ++h) products.push_back(transition_matrix(sys, family.cycle(h), &cache));

    const Matrix eye = Matrix::identity(n);
    for (int h = 1; h <= m_cycles; ++h) {
        for (int q = 1; q <= m_cycles; ++q) {
            LmiConstraint con;
            con.label = "prod(h=" + std::to_string(h) + ",q=" + std::to_string(q) + ")";
            con.dim = n;
            con.terms.push_back({products[static_cast<std::size_t>(h - 1)], h - 1, +1.0});
            con.terms.push_back({eye, q - 1, -1.0});
            problem.constraints.push_back(std::move(con));
        }
    }
    return problem;
}

/// Clock-form system: per cycle h blocks P_h(0..T_h); step constraints
/// A_m^T P_h(k+1) A_m - P_h(k) < 0 with m the mode active at step k, and
/// coupling constraints P_h(0) - P_q(T_q) < 0 over all ordered pairs.
inline LmiProblem build_condition_a(const SwitchedSystem& sys, const CycleFamily& family) {
    const int n = sys.state_dim;
    const int m_cycles = static_cast<int>(family.size());
    LmiProblem problem;

    std::vector<int> offset(static_cast<std::size_t>(m_cycles) + 1, 0);
    for (int h = 1; h <= m_cycles; ++h) {
        const CycleSpec& c = family.cycle(h);
        offset[static_cast<std::size_t>(h)] = offset[static_cast<std::size_t>(h - 1)] + c.total_duration() + 1;
        for (int k = 0; k <= c.total_duration(); ++k)
            problem.blocks.push_back({"P" + std::to_string(h) + "(" + std::to_string(k) + ")", n, h, k});
    }

    const Matrix eye = Matrix::identity(n);
    for (int h = 1; h <= m_cycles; ++h) {
        const CycleSpec& c = family.cycle(h);
        const int base = offset[static_cast<std::size_t>(h - 1)];
        for (int k = 0; k < c.total_duration(); ++k) {
            LmiConstraint con;
            con.label = "step(h=" + std::to_string(h) + ",k=" + std::to_string(k) + ")";
            con.dim = n;
            con.terms.push_back({sys.mode(c.mode_at_step(k)), base + k + 1, +1.0});
            con.terms.push_back({eye, base + k, -1.0});
            problem.constraints.push_back(std::move(con));
        }
    }
    for (int h = 1; h <= m_cycles; ++h) {
        for (int q = 1; q <= m_cycles; ++q) {
            const int t_q = family.cycle(q).total_duration();
            LmiConstraint con;
            con.label = "join(h=" + std::to_string(h) + ",q=" + std::to_string(q) + ")";
            con.dim = n;
            con.terms.push_back({eye, offset[static_cast<std::size_t>(h - 1)], +1.0});
            con.terms.push_back({eye, offset[static_cast<std::size_t>(q - 1)] + t_q, -1.0});
            problem.constraints.push_back(std::move(con));
        }
    }
    return problem;
}

/// Fixed-step variant for arbitrary switching: dwell range must be [1,1] and
/// immediate repeats are allowed, so there are N^L sequences. Form B with
/// L = 1 is the classical switched Lyapunov system A_i^T P_i A_i - P_j < 0.
inline LmiProblem build_multistep(const SwitchedSystem& sys, int length, Condition form,
                                  long long cap = kDefaultCycleCap) {
    if (sys.dwell_min != 1 || sys.dwell_max != 1)
        throw std::invalid_argument("multistep form requires dwell range [1,1]");
    const std::vector<CycleSpec> seqs = enumerate_multistep(sys, length, cap);
    CycleFamily family;
    family.system = sys;
    family.L = length;
    family.cycles = seqs;
    return form == Condition::B ? build_condition_b(sys, family) : build_condition_a(sys, family);
}

}  // namespace swcert

#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "swcert/lmi.hpp"
#include "test_util.hpp"

using swcert::Condition;
using swcert::LmiProblem;
using swcert::Matrix;
using swcert::SwitchedSystem;
using swcert::SymMatrix;
using testutil::Rng;

namespace {

std::vector<SymMatrix> random_assignment(const LmiProblem& p, Rng& rng) {
    std::vector<SymMatrix> out;
    for (const auto& b : p.blocks) out.emplace_back(testutil::random_matrix(b.dim, b.dim, rng));
    return out;
}

}  // namespace

TEST_CASE("product-form system for the benchmark at dwell 10, length 1") {
    const SwitchedSystem sys = testutil::two_mode_system(10, 10);
    const auto family = swcert::enumerate_cycles(sys, 1);
    const LmiProblem p = swcert::build_condition_b(sys, family);

    REQUIRE(p.blocks.size() == 2);
    REQUIRE(p.constraints.size() == 4);
    // the transition factors are the pure powers A1^10 and A2^10
    CHECK(swcert::max_abs_diff(p.constraints[0].terms[0].factor, swcert::mat_pow(testutil::mode_a1(), 10)) == 0.0);
    CHECK(swcert::max_abs_diff(p.constraints[3].terms[0].factor, swcert::mat_pow(testutil::mode_a2(), 10)) == 0.0);
    // ordered pairs (h, q): first term owns P_h, second subtracts P_q
    CHECK(p.constraints[1].terms[0].block == 0);
    CHECK(p.constraints[1].terms[1].block == 1);
    CHECK(p.constraints[1].terms[1].sign == -1.0);
    CHECK(swcert::max_abs_diff(p.constraints[1].terms[1].factor, Matrix::identity(2)) == 0.0);
}

TEST_CASE("product-form factors for alternating cycles of length 2") {
    const SwitchedSystem sys = testutil::two_mode_system(4, 4);
    const auto family = swcert::enumerate_cycles(sys, 2);
    const LmiProblem p = swcert::build_condition_b(sys, family);
    REQUIRE(p.blocks.size() == 2);
    REQUIRE(p.constraints.size() == 4);
    const Matrix phi1 = swcert::mat_pow(testutil::mode_a2(), 4) * swcert::mat_pow(testutil::mode_a1(), 4);
    const Matrix phi2 = swcert::mat_pow(testutil::mode_a1(), 4) * swcert::mat_pow(testutil::mode_a2(), 4);
    CHECK(swcert::max_abs_diff(p.constraints[0].terms[0].factor, phi1) == 0.0);
    CHECK(swcert::max_abs_diff(p.constraints[2].terms[0].factor, phi2) == 0.0);
}

TEST_CASE("identity modes give the degenerate P_h - P_q system") {
    const Matrix eye = Matrix::identity(2);
    const SwitchedSystem sys = swcert::make_switched_system(2, {eye, eye}, 2, 2);
    const auto family = swcert::enumerate_cycles(sys, 1);
    const LmiProblem p = swcert::build_condition_b(sys, family);
    REQUIRE(p.constraints.size() == 4);  // h = q pairs are emitted too
    Rng rng(3);
    const auto assignment = random_assignment(p, rng);
    // pair (1,1): identity^T P1 identity - P1 == 0 exactly
    const Matrix diag = swcert::eval_constraint(p.constraints[0], assignment);
    CHECK(diag.max_abs() == 0.0);
}

TEST_CASE("clock-form system for the benchmark at dwell 10, length 1") {
    const SwitchedSystem sys = testutil::two_mode_system(10, 10);
    const auto family = swcert::enumerate_cycles(sys, 1);
    const LmiProblem p = swcert::build_condition_a(sys, family);

    REQUIRE(p.blocks.size() == 22);  // 11 per cycle
    int steps = 0, joins = 0;
    for (const auto& con : p.constraints) {
        if (con.label.rfind("step", 0) == 0) ++steps;
        if (con.label.rfind("join", 0) == 0) ++joins;
    }
    CHECK(steps == 20);
    CHECK(joins == 4);

    // structural equality with the directly-written clock-indexed system:
    // per mode i, blocks P_i(0..10), steps A_i^T P_i(k+1) A_i - P_i(k),
    // couplings P_i(0) - P_j(10) over ordered pairs.
    for (int h = 1; h <= 2; ++h) {
        const Matrix& a = sys.mode(h);
        for (int k = 0; k < 10; ++k) {
            const auto& con = p.constraints[static_cast<std::size_t>((h - 1) * 10 + k)];
            REQUIRE(con.terms.size() == 2);
            CHECK(swcert::max_abs_diff(con.terms[0].factor, a) == 0.0);
            CHECK(con.terms[0].block == p.block_index(h, k + 1));
            CHECK(con.terms[0].sign == 1.0);
            CHECK(con.terms[1].block == p.block_index(h, k));
            CHECK(con.terms[1].sign == -1.0);
        }
    }
    const auto& join21 = p.constraints[22];  // joins start after 20 steps: (1,1),(1,2),(2,1),(2,2)
    CHECK(join21.label == "join(h=2,q=1)");
    CHECK(join21.terms[0].block == p.block_index(2, 0));
    CHECK(join21.terms[1].block == p.block_index(1, 10));
}

TEST_CASE("clock-form with unit dwell has one step constraint per cycle") {
    const SwitchedSystem sys = testutil::two_mode_system(1, 1);
    const auto family = swcert::enumerate_cycles(sys, 1);
    const LmiProblem p = swcert::build_condition_a(sys, family);
    int steps = 0;
    for (const auto& con : p.constraints)
        if (con.label.rfind("step", 0) == 0) ++steps;
    CHECK(steps == 2);
    CHECK(p.blocks.size() == 4);
}

TEST_CASE("step constraints pick the segment-correct mode") {
    const SwitchedSystem sys = testutil::two_mode_system(2, 3);
    const auto family = swcert::enumerate_cycles(sys, 2);
    const LmiProblem p = swcert::build_condition_a(sys, family);
    // find cycle (modes 1,2; durations 3,2) and check its k=3 step uses mode 2
    const int h = swcert::cycle_rank(sys, {1, 2}, {3, 2});
    const auto& c = family.cycle(h);
    REQUIRE(c.mode_at_step(3) == 2);
    for (const auto& con : p.constraints) {
        if (con.label == "step(h=" + std::to_string(h) + ",k=3)") {
            CHECK(swcert::max_abs_diff(con.terms[0].factor, sys.mode(2)) == 0.0);
        }
        if (con.label == "step(h=" + std::to_string(h) + ",k=2)") {
            CHECK(swcert::max_abs_diff(con.terms[0].factor, sys.mode(1)) == 0.0);
        }
    }
}

TEST_CASE("emitted counts match complexity_counts") {
    for (int d = 1; d <= 2; ++d) {
        for (int length = 1; length <= 2; ++length) {
            const SwitchedSystem sys = testutil::two_mode_system(2, 1 + d);
            const auto family = swcert::enumerate_cycles(sys, length);
            const auto pb = swcert::build_condition_b(sys, family);
            const auto cb = swcert::complexity_counts(sys, length, Condition::B);
            CHECK(static_cast<long long>(pb.blocks.size()) == cb.num_variables);
            CHECK(static_cast<long long>(pb.constraints.size()) == cb.num_lmis);
            const auto pa = swcert::build_condition_a(sys, family);
            const auto ca = swcert::complexity_counts(sys, length, Condition::A);
            CHECK(static_cast<long long>(pa.blocks.size()) == ca.num_variables);
            CHECK(static_cast<long long>(pa.constraints.size()) == ca.num_lmis);
        }
    }
}

TEST_CASE("multistep systems") {
    SECTION("length 1 product form is the classical switched Lyapunov system") {
        const SwitchedSystem sys = testutil::two_mode_system(1, 1);
        const LmiProblem p = swcert::build_multistep(sys, 1, Condition::B);
        REQUIRE(p.blocks.size() == 2);
        REQUIRE(p.constraints.size() == 4);
        CHECK(swcert::max_abs_diff(p.constraints[0].terms[0].factor, testutil::mode_a1()) == 0.0);
        CHECK(swcert::max_abs_diff(p.constraints[2].terms[0].factor, testutil::mode_a2()) == 0.0);
    }
    SECTION("length 2 product form has 4 blocks and 16 constraints") {
        const SwitchedSystem sys = testutil::two_mode_system(1, 1);
        const LmiProblem p = swcert::build_multistep(sys, 2, Condition::B);
        CHECK(p.blocks.size() == 4);
        CHECK(p.constraints.size() == 16);
        // sequence (1,2) has product A2 * A1
        const Matrix expect = testutil::mode_a2() * testutil::mode_a1();
        CHECK(swcert::max_abs_diff(p.constraints[4].terms[0].factor, expect) == 0.0);
    }
    SECTION("length 2 clock form couples P_h(0) against P_q(2)") {
        const SwitchedSystem sys = testutil::two_mode_system(1, 1);
        const LmiProblem p = swcert::build_multistep(sys, 2, Condition::A);
        CHECK(p.blocks.size() == 12);  // 4 sequences x 3 clocks
        bool saw_join = false;
        for (const auto& con : p.constraints) {
            if (con.label == "join(h=1,q=3)") {
                saw_join = true;
                CHECK(con.terms[0].block == p.block_index(1, 0));
                CHECK(con.terms[1].block == p.block_index(3, 2));
            }
        }
        CHECK(saw_join);
    }
    SECTION("non-unit dwell rejected") {
        const SwitchedSystem sys = testutil::two_mode_system(1, 2);
        CHECK_THROWS_AS(swcert::build_multistep(sys, 2, Condition::B), std::invalid_argument);
    }
}

TEST_CASE("constraints are symmetric and homogeneous in the blocks") {
    const SwitchedSystem sys = testutil::two_mode_system(1, 2);
    const auto family = swcert::enumerate_cycles(sys, 2);
    Rng rng(19);
    for (const LmiProblem& p : {swcert::build_condition_b(sys, family), swcert::build_condition_a(sys, family)}) {
        const auto assignment = random_assignment(p, rng);
        const double c = 3.25;
        std::vector<SymMatrix> scaled;
        for (const auto& x : assignment) scaled.push_back(x.scaled(c));
        for (const auto& con : p.constraints) {
            const Matrix v = swcert::eval_constraint(con, assignment);
            CHECK(swcert::max_abs_diff(v, v.transposed()) < 1e-14 * std::max(1.0, v.max_abs()));
            const Matrix vc = swcert::eval_constraint(con, scaled);
            Matrix expect = v;
            expect *= c;
            CHECK(swcert::max_abs_diff(vc, expect) < 1e-12 * std::max(1.0, expect.max_abs()));
        }
    }
}

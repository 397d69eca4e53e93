#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "swcert/cycles.hpp"
#include "swcert/eigen.hpp"
#include "swcert/system.hpp"
#include "test_util.hpp"

using swcert::Condition;
using swcert::CycleSpec;
using swcert::SwitchedSystem;
using testutil::Rng;

namespace {

SwitchedSystem three_mode_system(int dwell_lo, int dwell_hi) {
    // contents are irrelevant to enumeration; sizes must agree
    swcert::Matrix a{{0.5, 0.0}, {0.0, 0.5}};
    swcert::Matrix b{{0.4, 0.1}, {0.0, 0.6}};
    swcert::Matrix c{{0.3, 0.0}, {0.2, 0.2}};
    return swcert::make_switched_system(2, {a, b, c}, dwell_lo, dwell_hi);
}

// Independent brute-force enumeration used as the counting oracle: generate
// every (modes, durations) pair by odometer and filter out immediate repeats.
std::set<std::pair<std::vector<int>, std::vector<int>>> brute_force_cycles(const SwitchedSystem& sys, int length) {
    std::set<std::pair<std::vector<int>, std::vector<int>>> out;
    const int n_modes = sys.num_modes();
    const int d = sys.dwell_count();
    long long total_modes = 1, total_durs = 1;
    for (int i = 0; i < length; ++i) {
        total_modes *= n_modes;
        total_durs *= d;
    }
    for (long long mr = 0; mr < total_modes; ++mr) {
        std::vector<int> modes(static_cast<std::size_t>(length));
        long long v = mr;
        for (int pos = length - 1; pos >= 0; --pos) {
            modes[static_cast<std::size_t>(pos)] = 1 + static_cast<int>(v % n_modes);
            v /= n_modes;
        }
        bool ok = true;
        for (int pos = 1; pos < length; ++pos)
            if (modes[static_cast<std::size_t>(pos)] == modes[static_cast<std::size_t>(pos - 1)]) ok = false;
        if (!ok) continue;
        for (long long dr = 0; dr < total_durs; ++dr) {
            std::vector<int> durs(static_cast<std::size_t>(length));
            long long w = dr;
            for (int pos = length - 1; pos >= 0; --pos) {
                durs[static_cast<std::size_t>(pos)] = sys.dwell_min + static_cast<int>(w % d);
                w /= d;
            }
            out.insert({modes, durs});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("enumeration matches the closed-form count and the brute-force set") {
    SECTION("two modes, single dwell value, length 3") {
        const auto family = swcert::enumerate_cycles(testutil::two_mode_system(4, 4), 3);
        REQUIRE(family.size() == 2);
        CHECK(family.cycle(1).modes == std::vector<int>{1, 2, 1});
        CHECK(family.cycle(2).modes == std::vector<int>{2, 1, 2});
        CHECK(family.cycle(1).durations == std::vector<int>{4, 4, 4});
    }
    SECTION("three modes, two dwell values, length 2 gives 24") {
        const SwitchedSystem sys = three_mode_system(1, 2);
        const auto family = swcert::enumerate_cycles(sys, 2);
        REQUIRE(family.size() == 24);
        const auto oracle = brute_force_cycles(sys, 2);
        REQUIRE(oracle.size() == 24);
        for (const auto& c : family.cycles) CHECK(oracle.count({c.modes, c.durations}) == 1);
    }
    SECTION("two modes, single dwell value, length 1 gives 2") {
        const auto family = swcert::enumerate_cycles(testutil::two_mode_system(10, 10), 1);
        REQUIRE(family.size() == 2);
        CHECK(family.cycle(1).modes == std::vector<int>{1});
        CHECK(family.cycle(2).modes == std::vector<int>{2});
    }
}

TEST_CASE("enumeration count formula on a parameter grid") {
    for (int n_modes : {2, 3}) {
        for (int length : {1, 2, 3}) {
            for (int d : {1, 2, 3}) {
                const SwitchedSystem sys =
                    (n_modes == 2) ? testutil::two_mode_system(2, 1 + d) : three_mode_system(2, 1 + d);
                long long expect = n_modes;
                for (int i = 1; i < length; ++i) expect *= n_modes - 1;
                for (int i = 0; i < length; ++i) expect *= d;
                const auto family = swcert::enumerate_cycles(sys, length);
                CHECK(static_cast<long long>(family.size()) == expect);
                CHECK(swcert::cycle_count(n_modes, d, length) == expect);
                CHECK(static_cast<long long>(brute_force_cycles(sys, length).size()) == expect);
            }
        }
    }
}

TEST_CASE("cycle order is lexicographic and ranks round-trip") {
    const SwitchedSystem sys = three_mode_system(2, 4);
    const auto family = swcert::enumerate_cycles(sys, 3);
    for (const auto& c : family.cycles) {
        CHECK(swcert::cycle_rank(sys, c.modes, c.durations) == c.index);
    }
    // order check: mode sequence is the primary key, durations secondary
    for (std::size_t i = 1; i < family.cycles.size(); ++i) {
        const auto& prev = family.cycles[i - 1];
        const auto& cur = family.cycles[i];
        const bool mode_leq = prev.modes <= cur.modes;
        CHECK(mode_leq);
        if (prev.modes == cur.modes) CHECK(prev.durations < cur.durations);
    }
}

TEST_CASE("enumeration cap is a loud failure naming count and cap") {
    const SwitchedSystem sys = three_mode_system(1, 10);
    try {
        swcert::enumerate_cycles(sys, 5, 1000);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("1000") != std::string::npos);       // the cap
        CHECK(msg.find("4800000") != std::string::npos);    // 3*2^4*10^5
    }
}

TEST_CASE("transition products") {
    SECTION("identity modes give the identity product") {
        const auto eye = swcert::Matrix::identity(2);
        const SwitchedSystem sys = swcert::make_switched_system(2, {eye, eye}, 3, 3);
        const auto family = swcert::enumerate_cycles(sys, 2);
        for (const auto& c : family.cycles)
            CHECK(swcert::max_abs_diff(swcert::transition_matrix(sys, c), eye) == 0.0);
    }
    SECTION("single-activation cycle is a pure power") {
        const SwitchedSystem sys = testutil::two_mode_system(5, 5);
        const auto family = swcert::enumerate_cycles(sys, 1);
        CHECK(swcert::max_abs_diff(swcert::transition_matrix(sys, family.cycle(1)),
                                   swcert::mat_pow(testutil::mode_a1(), 5)) == 0.0);
        CHECK(swcert::max_abs_diff(swcert::transition_matrix(sys, family.cycle(2)),
                                   swcert::mat_pow(testutil::mode_a2(), 5)) == 0.0);
    }
    SECTION("latest activation is the leftmost factor") {
        const SwitchedSystem sys = testutil::two_mode_system(6, 6);
        CycleSpec c;
        c.modes = {1, 2};
        c.durations = {6, 6};
        const swcert::Matrix phi = swcert::transition_matrix(sys, c);
        const swcert::Matrix expect = swcert::mat_pow(testutil::mode_a2(), 6) * swcert::mat_pow(testutil::mode_a1(), 6);
        CHECK(swcert::max_abs_diff(phi, expect) == 0.0);
        CHECK(swcert::spectral_radius(phi) > 1.0);
    }
    SECTION("power cache returns identical products") {
        const SwitchedSystem sys = testutil::two_mode_system(2, 3);
        swcert::PowerCache cache(sys);
        const auto family = swcert::enumerate_cycles(sys, 2);
        for (const auto& c : family.cycles)
            CHECK(swcert::max_abs_diff(swcert::transition_matrix(sys, c, &cache),
                                       swcert::transition_matrix(sys, c)) == 0.0);
    }
}

TEST_CASE("simulating along a cycle agrees with its transition product") {
    const SwitchedSystem sys = testutil::two_mode_system(1, 3);
    const auto family = swcert::enumerate_cycles(sys, 2);
    Rng rng(77);
    for (const auto& c : family.cycles) {
        const swcert::Matrix phi = swcert::transition_matrix(sys, c);
        for (int trial = 0; trial < 20; ++trial) {
            const auto x0 = testutil::random_unit_vector(2, rng);
            swcert::SwitchingSignal sig;
            for (std::size_t i = 0; i < c.modes.size(); ++i)
                sig.segments.push_back({c.modes[i], c.durations[i]});
            const auto traj = swcert::simulate(sys, sig, x0, c.total_duration());
            const auto want = phi * x0;
            for (int i = 0; i < 2; ++i)
                CHECK(traj.states.back()[i] ==
                      Catch::Approx(want[i]).margin(1e-10 * std::max(1.0, std::abs(want[i]))));
        }
    }
}

TEST_CASE("mode_at_step respects segment boundaries") {
    CycleSpec c;
    c.modes = {1, 2};
    c.durations = {3, 2};
    CHECK(c.mode_at_step(0) == 1);
    CHECK(c.mode_at_step(2) == 1);
    CHECK(c.mode_at_step(3) == 2);
    CHECK(c.mode_at_step(4) == 2);
    CHECK_THROWS_AS(c.mode_at_step(5), std::invalid_argument);
    CHECK(c.total_duration() == 5);
}

TEST_CASE("complexity counts") {
    SECTION("product form, single dwell value, length 1") {
        const auto counts = swcert::complexity_counts(testutil::two_mode_system(10, 10), 1, Condition::B);
        CHECK(counts.num_variables == 2);
        CHECK(counts.num_lmis == 4);
    }
    SECTION("clock form, single dwell value of 10, length 1") {
        const auto counts = swcert::complexity_counts(testutil::two_mode_system(10, 10), 1, Condition::A);
        CHECK(counts.num_variables == 22);  // 2 * (10 + 1)
        CHECK(counts.num_lmis == 24);       // 4 + 2 * 10
    }
    SECTION("product form, two dwell values, length 2") {
        const auto counts = swcert::complexity_counts(testutil::two_mode_system(1, 2), 2, Condition::B);
        CHECK(counts.num_variables == 8);
        CHECK(counts.num_lmis == 64);
    }
    SECTION("clock-form counts agree with an enumeration-based tally") {
        for (int d = 1; d <= 3; ++d) {
            for (int length = 1; length <= 3; ++length) {
                const SwitchedSystem sys = testutil::two_mode_system(2, 1 + d);
                const auto family = swcert::enumerate_cycles(sys, length);
                long long blocks = 0, lmis = 0;
                for (const auto& c : family.cycles) {
                    blocks += c.total_duration() + 1;
                    lmis += c.total_duration();
                }
                lmis += static_cast<long long>(family.size()) * static_cast<long long>(family.size());
                const auto counts = swcert::complexity_counts(sys, length, Condition::A);
                CHECK(counts.num_variables == blocks);
                CHECK(counts.num_lmis == lmis);
            }
        }
    }
}

TEST_CASE("multistep sequences allow immediate repeats") {
    const SwitchedSystem sys = testutil::two_mode_system(1, 1);
    const auto seqs = swcert::enumerate_multistep(sys, 2);
    REQUIRE(seqs.size() == 4);
    CHECK(seqs[0].modes == std::vector<int>{1, 1});
    CHECK(seqs[1].modes == std::vector<int>{1, 2});
    CHECK(seqs[2].modes == std::vector<int>{2, 1});
    CHECK(seqs[3].modes == std::vector<int>{2, 2});
    for (const auto& s : seqs) {
        CHECK(s.total_duration() == 2);
        CHECK(s.durations == std::vector<int>{1, 1});
    }
}

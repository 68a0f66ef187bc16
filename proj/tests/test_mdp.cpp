#include <doctest.h>

#include <sstream>

#include "oc/mdp.hpp"

using namespace oc;

namespace {

// two-state deterministic chain: s0 -a0-> s1 (terminal), reward 2
TabularMDP two_state_chain() {
    TabularMDP mdp(2, 1, 0.9);
    mdp.p(0, 0, 1) = 1.0;
    mdp.p(1, 0, 1) = 1.0;
    mdp.r(0, 0) = 2.0;
    mdp.start_dist[0] = 1.0;
    mdp.terminal[1] = 1;
    return mdp;
}

}  // namespace

TEST_CASE("validate accepts a proper chain") {
    CHECK(validate(two_state_chain()).empty());
}

TEST_CASE("validate flags a bad transition row") {
    TabularMDP mdp(2, 1, 0.9);
    mdp.p(0, 0, 0) = 0.5;
    mdp.p(0, 0, 1) = 0.6;
    mdp.p(1, 0, 1) = 1.0;
    mdp.start_dist[0] = 1.0;
    const auto violations = validate(mdp);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations)
        if (v.find("row sum 1.1") != std::string::npos && v.find("(0,0)") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("validate flags discount out of range") {
    TabularMDP mdp = two_state_chain();
    mdp.discount = 1.0;
    const auto violations = validate(mdp);
    REQUIRE(!violations.empty());
    CHECK(violations.front().find("discount out of range") != std::string::npos);
}

TEST_CASE("validate flags negative entries and start mass") {
    TabularMDP mdp = two_state_chain();
    mdp.p(0, 0, 0) = -0.1;
    mdp.p(0, 0, 1) = 1.1;
    mdp.start_dist[0] = 0.9;
    const auto violations = validate(mdp);
    CHECK(violations.size() >= 3);  // two entries out of range + start sum
}

TEST_CASE("step follows a deterministic row") {
    const TabularMDP mdp = two_state_chain();
    RngStream rng(1);
    const StepOutcome out = step(mdp, 0, 0, rng);
    CHECK(out.next_state == 1);
    CHECK(out.reward == 2.0);
    CHECK(out.done);
}

TEST_CASE("step from a terminal state is a contract violation") {
    const TabularMDP mdp = two_state_chain();
    RngStream rng(1);
    CHECK_THROWS_AS(step(mdp, 1, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(step(mdp, 0, 3, rng), std::invalid_argument);
}

TEST_CASE("step matches the transition row empirically") {
    TabularMDP mdp(2, 1, 0.9);
    mdp.p(0, 0, 0) = 0.5;
    mdp.p(0, 0, 1) = 0.5;
    mdp.p(1, 0, 1) = 1.0;
    mdp.start_dist[0] = 1.0;
    RngStream rng(42);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) hits += step(mdp, 0, 0, rng).next_state == 1;
    CHECK(std::abs(hits / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("step never lands on a zero-probability state") {
    TabularMDP mdp(4, 2, 0.9);
    RngStream init(3);
    for (int s = 0; s < 4; ++s) {
        mdp.start_dist[s] = 0.25;
        for (int a = 0; a < 2; ++a) {
            // rows with structural zeros on even successors
            mdp.p(s, a, 1) = 0.25 + 0.5 * init.uniform();
            mdp.p(s, a, 3) = 1.0 - mdp.p(s, a, 1);
        }
    }
    RngStream rng(9);
    for (int i = 0; i < 20000; ++i) {
        const StepOutcome out = step(mdp, rng.uniform_int(4), rng.uniform_int(2), rng);
        CHECK((out.next_state == 1 || out.next_state == 3));
    }
}

TEST_CASE("sample_start point mass and uniform split") {
    TabularMDP mdp(4, 1, 0.9);
    for (int s = 0; s < 4; ++s) mdp.p(s, 0, s) = 1.0;
    mdp.start_dist = {0.0, 0.0, 0.0, 1.0};
    RngStream rng(5);
    for (int i = 0; i < 100; ++i) CHECK(sample_start(mdp, rng) == 3);

    mdp.start_dist = {0.5, 0.5, 0.0, 0.0};
    int zero = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) zero += sample_start(mdp, rng) == 0;
    CHECK(std::abs(zero / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("fixed seeds reproduce trajectories bit-identically") {
    TabularMDP mdp(3, 2, 0.9);
    RngStream init(11);
    for (int s = 0; s < 3; ++s) {
        mdp.start_dist[s] = 1.0 / 3.0;
        for (int a = 0; a < 2; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < 3; ++s2) sum += mdp.p(s, a, s2) = init.uniform();
            for (int s2 = 0; s2 < 3; ++s2) mdp.p(s, a, s2) /= sum;
        }
    }
    auto rollout = [&](std::uint64_t seed) {
        RngStream rng(seed);
        std::vector<int> states{sample_start(mdp, rng)};
        for (int t = 0; t < 200; ++t)
            states.push_back(step(mdp, states.back(), rng.uniform_int(2), rng).next_state);
        return states;
    };
    CHECK(rollout(123) == rollout(123));
    CHECK(rollout(123) != rollout(124));
}

TEST_CASE("substreams depend only on seed and index") {
    RngStream a(7);
    RngStream sub = a.substream(4);
    a.uniform();
    a.uniform();
    RngStream again = RngStream(7).substream(4);
    CHECK(sub.next_u64() == again.next_u64());
    CHECK(RngStream(7).substream(5).next_u64() != RngStream(7).substream(4).next_u64());
}

TEST_CASE("text format round-trips") {
    const TabularMDP mdp = two_state_chain();
    std::ostringstream out;
    save_mdp_text(mdp, out);
    std::istringstream in(out.str());
    const TabularMDP back = load_mdp_text(in);
    CHECK(back.n_states == mdp.n_states);
    CHECK(back.n_actions == mdp.n_actions);
    CHECK(back.discount == mdp.discount);
    CHECK(back.transition == mdp.transition);
    CHECK(back.reward == mdp.reward);
    CHECK(back.start_dist == mdp.start_dist);
    CHECK(back.terminal == mdp.terminal);

    std::ostringstream again;
    save_mdp_text(back, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("text format rejects malformed input") {
    std::istringstream no_header("t 0 0 1 1.0\n");
    CHECK_THROWS_AS(load_mdp_text(no_header), std::invalid_argument);
    std::istringstream bad_index("mdp 2 1 0.9\nt 0 0 5 1.0\n");
    CHECK_THROWS_AS(load_mdp_text(bad_index), std::invalid_argument);
    std::istringstream bad_tag("mdp 2 1 0.9\nq 0 0\n");
    CHECK_THROWS_AS(load_mdp_text(bad_tag), std::invalid_argument);
}

TEST_CASE("finalize_rows normalizes near-one rows and rejects bad ones") {
    TabularMDP mdp(2, 1, 0.9);
    mdp.p(0, 0, 1) = 1.0 + 5e-10;
    mdp.p(1, 0, 1) = 1.0;
    mdp.start_dist[0] = 1.0;
    finalize_rows(mdp);
    CHECK(validate(mdp).empty());

    mdp.p(0, 0, 1) = 1.1;
    CHECK_THROWS_AS(finalize_rows(mdp), std::invalid_argument);
}

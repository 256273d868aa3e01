// Copyright 2026 The dmqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmqkd/linksim.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "oracles.hpp"

using namespace dmqkd;

TEST(transmittance, examples) {
    EXPECT_EQ(transmittance(0, 1.0), 1.0);
    EXPECT_NEAR(transmittance(15, 0.7), 0.022135943621178654, 1e-17);
    EXPECT_NEAR(transmittance(48, 0.7), 1.1094252347227798e-5, 1e-19);
    EXPECT_THROW(transmittance(-1, 0.7), DomainError);
    EXPECT_THROW(transmittance(1, 1.2), DomainError);
}

TEST(dark_prob, examples) {
    EXPECT_NEAR(dark_prob(50, 300e-12, 2), 3.0e-8, 1e-22);
    EXPECT_EQ(dark_prob(0, 1.0, 2), 0.0);
    EXPECT_THROW(dark_prob(1e9, 1.0, 1), ModelValidityError);
    EXPECT_THROW(dark_prob(-1, 1.0, 1), DomainError);
}

TEST(analytic_gain_qber, examples) {
    auto g = analytic_gain_qber(0.0, 0.5, 3e-8, 0.033);
    EXPECT_DOUBLE_EQ(g.q, 3e-8);
    EXPECT_DOUBLE_EQ(g.e, 0.5);

    g = analytic_gain_qber(0.4, 0.022136, 3e-8, 0.033);
    EXPECT_NEAR(g.q, 8.8153452427462767e-3, 1e-15);
    EXPECT_NEAR(g.e, 0.033001589274113969, 1e-15);
    EXPECT_NEAR(g.e, 0.033002, 1e-6);

    g = analytic_gain_qber(0.4, 0.0, 0.0, 0.033);
    EXPECT_EQ(g.q, 0.0);
    EXPECT_EQ(g.e, 0.5);

    EXPECT_THROW(analytic_gain_qber(-0.1, 0.5, 0, 0), DomainError);
    EXPECT_THROW(analytic_gain_qber(0.1, 1.5, 0, 0), DomainError);
}

TEST(analytic_gain_qber, equals_photon_number_sum) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const double lambda = oracle::uniform(rng, 0, 2);
        const double eta = std::pow(10.0, -oracle::uniform(rng, 0, 6));
        const double y0 = oracle::uniform(rng, 0, 1e-5);
        const double ed = oracle::uniform(rng, 0, 0.1);
        const auto g = analytic_gain_qber(lambda, eta, y0, ed);
        const auto s = oracle::photon_sum_gain(lambda, eta, y0, ed);
        ASSERT_NEAR(g.q, s.q, 1e-12 * s.q + 1e-15);
        ASSERT_NEAR(g.e * g.q, s.eq, 1e-12 * s.q + 1e-15);
    }
}

TEST(analytic_gain_qber, monotonicity) {
    const double y0 = 3e-8, ed = 0.033;
    for (double eta : {1e-6, 1e-3, 0.02, 0.5}) {
        double q_prev = -1, e_prev = 2;
        for (double lambda = 0; lambda <= 2.0; lambda += 0.01) {
            const auto g = analytic_gain_qber(lambda, eta, y0, ed);
            ASSERT_GE(g.q, q_prev);
            ASSERT_LE(g.e, e_prev + 1e-15);
            q_prev = g.q;
            e_prev = g.e;
        }
    }
    double q_prev = -1;
    for (double loss = 80; loss >= 0; loss -= 0.5) {
        const auto g = analytic_gain_qber(0.4, transmittance(loss, 0.7), y0, ed);
        ASSERT_GE(g.q, q_prev);
        q_prev = g.q;
    }
}

TEST(params, validation) {
    LinkParams p;
    EXPECT_NO_THROW(p.validate());
    p.p_y_bob = 1.1;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.clock = 0;
    EXPECT_THROW(p.validate(), ConfigError);

    EXPECT_NO_THROW(DecoyIntensities{}.validate());
    EXPECT_THROW((DecoyIntensities{0.4, 0.16, 0.25}.validate()), ConfigError);
    EXPECT_THROW((DecoyIntensities{0.4, 0.3, 0.15}.validate()), ConfigError);

    EXPECT_NO_THROW(StateMix{}.validate());
    EXPECT_THROW((StateMix{{0.5, 0.2, 0.2, 0.2}}.validate()), ConfigError);
    EXPECT_THROW((StateMix{{1.1, -0.1, 0, 0}}.validate()), ConfigError);
}

TEST(simulate_frames_mc, deterministic_given_seed) {
    const LinkParams p;
    const auto a = simulate_frames_mc(300'000, p, {}, {}, 42);
    const auto b = simulate_frames_mc(300'000, p, {}, {}, 42);
    const auto c = simulate_frames_mc(300'000, p, {}, {}, 43);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.frames, 300'000u);
}

TEST(simulate_frames_mc, partition_independent) {
    const LinkParams p;
    const auto one = simulate_frames_mc(1'000'003, p, {}, {}, 9, 1);
    for (unsigned w : {2u, 3u, 8u}) {
        EXPECT_EQ(simulate_frames_mc(1'000'003, p, {}, {}, 9, w), one) << w;
    }
}

TEST(simulate_frames_mc, dead_channel_detects_nothing) {
    LinkParams p;
    p.det_efficiency = 0;
    p.dark_rate = 0;
    const auto t = simulate_frames_mc(200'000, p, {}, {}, 1);
    for (Slot s : kAllSlots) {
        EXPECT_GT(t[s].sent, 0u);
        EXPECT_EQ(t[s].detected, 0u);
        EXPECT_EQ(t[s].errors, 0u);
    }
}

TEST(simulate_frames_mc, configuration_errors) {
    EXPECT_THROW(simulate_frames_mc(0, {}, {}, {}, 1), ConfigError);
    EXPECT_THROW(simulate_frames_mc(10, {}, {}, StateMix{{0.5, 0.5, 0.5, 0}}, 1), ConfigError);
}

TEST(simulate_frames_mc, tally_invariants) {
    LinkParams p;
    p.loss_db = 0;
    const auto t = simulate_frames_mc(500'000, p, {}, {}, 5);
    std::uint64_t sent = 0;
    for (Slot s : kAllSlots) {
        EXPECT_LE(t[s].errors, t[s].detected);
        EXPECT_LE(t[s].detected, t[s].sent);
        sent += t[s].sent;
    }
    // Sifting keeps about p_a·p_b + (1-p_a)(1-p_b) = 0.82 of frames.
    EXPECT_NEAR(static_cast<double>(sent) / 500'000, 0.82, 0.005);
}

// Convergence against the analytic model: every slot, 100 seeds at 10^6
// frames, counting |z| < 3 outcomes.
TEST(simulate_frames_mc, agrees_with_analytic_model) {
    const LinkParams p;
    const DecoyIntensities in;
    int checks = 0, within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto cmp = compare_to_analytic(simulate_frames_mc(1'000'000, p, in, {}, seed), p, in);
        for (const auto &c : cmp) {
            ++checks;
            within += std::fabs(c.z_q) < 3;
            if (c.tally.detected > 0) {
                ++checks;
                within += std::fabs(c.z_e) < 3;
            }
        }
    }
    EXPECT_GE(within, 0.99 * checks) << within << "/" << checks;
}

TEST(simulate_frames_mc, vacuum_qber_tends_to_half) {
    LinkParams p;
    p.loss_db = 40;
    p.dark_rate = 1e7;
    const DecoyIntensities in{0.4, 0.16, 1e-6};
    const auto t = simulate_frames_mc(2'000'000, p, in, StateMix{{0.1, 0.0, 0.0, 0.9}}, 3);
    const auto &v = t[Slot::z_vacuum];
    ASSERT_GT(v.detected, 500u);
    EXPECT_NEAR(v.qber(), 0.5, 4 * std::sqrt(0.25 / static_cast<double>(v.detected)));
    EXPECT_NEAR(analytic_slot(p, in, Slot::z_vacuum).e, 0.5, 1e-3);
}

TEST(y_receiver_factor, halves_y_basis_transmittance) {
    LinkParams p;
    EXPECT_DOUBLE_EQ(basis_eta(p, Basis::Y), 0.5 * basis_eta(p, Basis::Z));
}

TEST(csv, tallies_and_gains) {
    TallyCounts t;
    t[Slot::z_decoy] = {10, 4, 1};
    std::ostringstream os;
    write_tally_csv(os, t);
    const std::string csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "class,basis,sent,detected,errors,gain,qber");
    EXPECT_NE(csv.find("decoy,Z,10,4,1,0.4,0.25\n"), std::string::npos);
    std::ostringstream g;
    write_gain_csv(g, {}, {});
    EXPECT_NE(g.str().find("signal,Y,"), std::string::npos);
}

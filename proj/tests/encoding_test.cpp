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

#include "dmqkd/encoding.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "dmqkd/photonics.hpp"
#include "dmqkd/schedule.hpp"
#include "oracles.hpp"

using namespace dmqkd;

namespace {

const DecoyTable kHalfDecoy{{IntensityClass::signal, 1.0}, {IntensityClass::decoy, 0.5}, {IntensityClass::vacuum, 0.1}};

EncodingSymbol sym(Basis b, int bit, IntensityClass c = IntensityClass::signal) {
    return {b, bit, c};
}

OutputFrame pipeline(const PhasePair &pp, double a, double phi1) {
    return amzi_transform(make_frame(a, Phase(phi1), pp.phi12, pp.phi23, Phase(0), Phase(0)));
}

}  // namespace

TEST(encode_symbol, bb84_table) {
    auto z0 = encode_symbol(sym(Basis::Z, 0), {});
    EXPECT_EQ(z0.phi12.value(), 0);
    EXPECT_DOUBLE_EQ(z0.phi23.value(), kPi);
    auto z1 = encode_symbol(sym(Basis::Z, 1), {});
    EXPECT_DOUBLE_EQ(z1.phi12.value(), kPi);
    EXPECT_EQ(z1.phi23.value(), 0);
    auto y0 = encode_symbol(sym(Basis::Y, 0), {});
    EXPECT_DOUBLE_EQ(y0.phi12.value(), kPi / 2);
    EXPECT_DOUBLE_EQ(y0.phi23.value(), kPi / 2);
    auto y1 = encode_symbol(sym(Basis::Y, 1), {});
    EXPECT_DOUBLE_EQ(y1.phi12.value(), 1.5 * kPi);
    EXPECT_DOUBLE_EQ(y1.phi23.value(), 1.5 * kPi);
}

TEST(encode_symbol, dimmed_z_states) {
    auto d0 = encode_symbol(sym(Basis::Z, 0, IntensityClass::decoy), kHalfDecoy);
    EXPECT_NEAR(d0.phi12.value(), kPi / 2, 1e-15);
    EXPECT_DOUBLE_EQ(d0.phi23.value(), kPi);
    auto d1 = encode_symbol(sym(Basis::Z, 1, IntensityClass::decoy), kHalfDecoy);
    EXPECT_DOUBLE_EQ(d1.phi12.value(), kPi);
    EXPECT_NEAR(d1.phi23.value(), kPi / 2, 1e-15);
    auto v0 = encode_symbol(sym(Basis::Z, 0, IntensityClass::vacuum), kHalfDecoy);
    EXPECT_NEAR(v0.phi12.value(), oracle::bisect_intensity_phase(0.1), 1e-12);
}

TEST(encode_symbol, errors) {
    EXPECT_THROW(encode_symbol(sym(Basis::Y, 0, IntensityClass::decoy), kHalfDecoy), InvalidSymbolError);
    EXPECT_THROW(encode_symbol(sym(Basis::Y, 1, IntensityClass::vacuum), kHalfDecoy), InvalidSymbolError);
    EXPECT_THROW(encode_symbol(sym(Basis::Z, 0, IntensityClass::decoy), {}), ConfigError);
    EXPECT_THROW(encode_symbol(sym(Basis::Z, 2), {}), InvalidSymbolError);
    EXPECT_THROW(encode_symbol(sym(Basis::Z, 0, IntensityClass::decoy), {{IntensityClass::decoy, 1.5}}), ConfigError);
    EXPECT_THROW(encode_symbol(sym(Basis::Z, 0), {{IntensityClass::signal, 0.9}}), ConfigError);
}

TEST(intensity_to_phase, examples) {
    EXPECT_EQ(intensity_to_phase(1.0).value(), 0);
    EXPECT_NEAR(intensity_to_phase(0.5).value(), kPi / 2, 1e-15);
    // 2·arccos(√0.1), about 0.795π rather than the 0.9π an amplitude reading would give.
    EXPECT_NEAR(intensity_to_phase(0.1).value(), 2.4980915447965088, 1e-13);
    EXPECT_NEAR(intensity_to_phase(0.1).value() / kPi, 0.7951672353, 1e-9);
    for (double f : {0.01, 0.1, 0.25, 0.4, 0.0375, 0.9}) {
        EXPECT_NEAR(intensity_to_phase(f).value(), oracle::bisect_intensity_phase(f), 1e-12) << f;
    }
}

TEST(intensity_to_phase, domain) {
    EXPECT_THROW(intensity_to_phase(0.0), DomainError);
    EXPECT_THROW(intensity_to_phase(-0.1), DomainError);
    EXPECT_THROW(intensity_to_phase(1.0000001), DomainError);
    EXPECT_THROW(intensity_to_phase(std::nan("")), DomainError);
}

TEST(intensity_to_phase, monotone_decreasing) {
    double prev = kPi + 1;
    for (int i = 1; i <= 1000; ++i) {
        const double phi = intensity_to_phase(i / 1000.0).value();
        ASSERT_LT(phi, prev);
        prev = phi;
    }
}

TEST(intensity_to_phase, fraction_extraction_round_trip) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10000; ++i) {
        const double f = oracle::uniform(rng, 1e-6, 1.0);
        const double a = oracle::uniform(rng, 0.1, 4.0);
        const auto out = pipeline({intensity_to_phase(f), Phase(kPi)}, a, oracle::uniform(rng, 0, kTwoPi));
        const double extracted = std::norm(out.e) / (a * a);
        ASSERT_NEAR(intensity_to_phase(extracted).value(), intensity_to_phase(f).value(),
                    1e-12 / std::sqrt(f * (1 - f) + 1e-300) + 1e-12);
        ASSERT_NEAR(extracted, f, 1e-12);
    }
}

TEST(chirp_phase, examples) {
    EXPECT_EQ(chirp_phase({0.0, 150e-12}).value(), 0);
    EXPECT_NEAR(chirp_phase({1.0 / 3.0 * 1e10, 150e-12}).value(), kPi, 1e-12);
    EXPECT_NEAR(chirp_phase({1.0 / 6.0 * 1e10, 150e-12}).value(), kPi / 2, 1e-12);
    // Four-digit inputs as quoted: 3.3333 GHz, 1.6667 GHz.
    EXPECT_NEAR(chirp_phase({3.3333e9, 150e-12}).value(), kPi, 1e-4);
    EXPECT_NEAR(chirp_phase({1.6667e9, 150e-12}).value(), kPi / 2, 1e-4);
    EXPECT_THROW(chirp_phase({1e9, 0.0}), DomainError);
}

TEST(calibration, voltage_for_phase) {
    const CalibrationCurve cal{0.8};
    EXPECT_DOUBLE_EQ(voltage_for_phase(Phase(kPi), cal), 0.8);
    EXPECT_EQ(voltage_for_phase(Phase(0), cal), 0);
    EXPECT_DOUBLE_EQ(voltage_for_phase(Phase(kPi / 2), cal), 0.4);
    EXPECT_DOUBLE_EQ(phase_for_voltage(0.4, cal).value(), kPi / 2);
    EXPECT_THROW(voltage_for_phase(Phase(1), CalibrationCurve{0.0}), ConfigError);
}

TEST(calibration, predicted_pulse_amplitude) {
    const CalibrationCurve cal{0.8};
    EXPECT_DOUBLE_EQ(predicted_pulse_amplitude(0, cal, 2.5), 2.5);
    EXPECT_NEAR(predicted_pulse_amplitude(0.8, cal, 2.5), 0, 1e-15);
    EXPECT_NEAR(predicted_pulse_amplitude(0.4, cal, 1.0), 0.70710678118654752, 1e-15);
    EXPECT_THROW(predicted_pulse_amplitude(-0.1, cal, 1.0), DomainError);
    // Agrees with driving the interferometer model at the mapped phase.
    for (double v = 0; v <= 1.6; v += 0.01) {
        const Phase phi = phase_for_voltage(v, cal);
        const auto out = pipeline({phi, Phase(kPi)}, 1.3, 0.7);
        ASSERT_NEAR(predicted_pulse_amplitude(v, cal, 1.3), std::abs(out.e), 1e-12);
    }
}

TEST(encoding_pipeline, bb84_states) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = oracle::uniform(rng, 0.1, 3.0);
        const double phi1 = oracle::uniform(rng, 0, kTwoPi);
        for (int bit : {0, 1}) {
            const auto z = pipeline(encode_symbol(sym(Basis::Z, bit), {}), a, phi1);
            const double lit = std::norm(bit == 0 ? z.e : z.l);
            const double dark = std::norm(bit == 0 ? z.l : z.e);
            ASSERT_NEAR(lit, a * a, 1e-12 * a * a);
            ASSERT_LT(dark, 1e-20 * a * a);

            const auto y = pipeline(encode_symbol(sym(Basis::Y, bit), {}), a, phi1);
            ASSERT_NEAR(std::norm(y.e), a * a / 2, 1e-12 * a * a);
            ASSERT_NEAR(std::norm(y.l), a * a / 2, 1e-12 * a * a);
            const Phase el = amplitude_to_polar(y.l).phi - amplitude_to_polar(y.e).phi;
            ASSERT_LT(circular_distance(el, Phase(bit == 0 ? kPi / 2 : 1.5 * kPi)), 1e-12);
        }
    }
}

TEST(encoding_pipeline, signal_states_sum_to_pi) {
    for (Basis b : {Basis::Z, Basis::Y}) {
        for (int bit : {0, 1}) {
            const auto pp = encode_symbol(sym(b, bit), {});
            EXPECT_TRUE(approx_equal(pp.phi12 + pp.phi23, Phase(kPi), 1e-15));
        }
    }
}

TEST(symbol_tokens, parse) {
    auto s = parse_symbol_token("Y1s");
    ASSERT_TRUE(s);
    EXPECT_EQ(*s, sym(Basis::Y, 1));
    EXPECT_EQ(symbol_token(*parse_symbol_token("Z0v")), "Z0v");
    EXPECT_FALSE(parse_symbol_token("X0s"));
    EXPECT_FALSE(parse_symbol_token("Z2s"));
    EXPECT_FALSE(parse_symbol_token("Z0"));
    EXPECT_FALSE(parse_symbol_token("Z0sx"));
    ASSERT_TRUE(parse_symbol_token("Y0d"));
    EXPECT_FALSE(parse_symbol_token("Y0d")->valid());
}

TEST(symbol_tokens, stream_errors_carry_line_numbers) {
    std::istringstream ok("Z0s Y1s\n# comment\nZ0d  Z1v\n");
    EXPECT_EQ(parse_symbol_stream(ok).size(), 4u);

    std::istringstream bad("Z0s\nZ1s Q0s\n");
    try {
        parse_symbol_stream(bad);
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream ydecoy("Z0s\n\nY0d\n");
    try {
        parse_symbol_stream(ydecoy);
        FAIL();
    } catch (const InvalidSymbolError &e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

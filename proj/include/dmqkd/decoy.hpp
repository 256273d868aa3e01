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

#pragma once

// Asymptotic two-decoy BB84 key rate: vacuum and single-photon yield lower
// bounds, single-photon error upper bound, GLLP-style rate, loss sweep.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "dmqkd/errors.hpp"
#include "dmqkd/numfmt.hpp"
#include "dmqkd/linksim.hpp"

namespace dmqkd {

/// Gains and QBERs of the three intensity classes.
struct DecoyGains {
    GainQber mu;
    GainQber nu;
    GainQber omega;
};

struct RateBreakdown {
    double q_mu = 0, e_mu = 0, q_nu = 0, e_nu = 0, q_omega = 0, e_omega = 0;
    double y0_l = 0;
    double y1_l = 0;
    double e1_u = 0.5;
    double q1_l = 0;
    double r_per_pulse = 0;
    double r_bps = 0;
};

inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("binary_entropy: argument must lie in [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

inline double bound_y0(double q_nu, double q_omega, double nu, double omega) {
    if (nu == omega) {
        throw DegenerateDecoyError("bound_y0: nu == omega");
    }
    if (!(nu > omega && omega >= 0.0)) {
        throw ConfigError("bound_y0: require nu > omega >= 0");
    }
    const double y0 = (nu * q_omega * std::exp(omega) - omega * q_nu * std::exp(nu)) / (nu - omega);
    return std::max(y0, 0.0);
}

inline double bound_y1(double q_mu, double q_nu, double q_omega, double mu, double nu, double omega, double y0_l) {
    DecoyIntensities{mu, nu, omega}.validate();
    const double denom = mu * nu - mu * omega - nu * nu + omega * omega;
    if (!(denom > 0.0)) {
        throw ConfigError("bound_y1: non-positive denominator");
    }
    const double bracket = q_nu * std::exp(nu) - q_omega * std::exp(omega) -
                           (nu * nu - omega * omega) / (mu * mu) * (q_mu * std::exp(mu) - y0_l);
    return std::clamp(mu / denom * bracket, 0.0, 1.0);
}

/// `eq_nu` and `eq_omega` are the error gains E·Q of the two decoys.
inline double bound_e1(double eq_nu, double eq_omega, double nu, double omega, double y1_l) {
    if (!(y1_l > 0.0)) {
        throw UndefinedBoundError("bound_e1: y1_l must be positive");
    }
    if (nu == omega) {
        throw DegenerateDecoyError("bound_e1: nu == omega");
    }
    const double e1 = (eq_nu * std::exp(nu) - eq_omega * std::exp(omega)) / ((nu - omega) * y1_l);
    return std::clamp(e1, 0.0, 0.5);
}

/// Rate with key bits drawn from Y-basis signal detections and the phase
/// error estimated from the decoy statistics.
inline RateBreakdown secure_key_rate(const DecoyGains &g, const LinkParams &params, const DecoyIntensities &in) {
    in.validate();
    RateBreakdown b;
    b.q_mu = g.mu.q;
    b.e_mu = g.mu.e;
    b.q_nu = g.nu.q;
    b.e_nu = g.nu.e;
    b.q_omega = g.omega.q;
    b.e_omega = g.omega.e;
    b.y0_l = bound_y0(g.nu.q, g.omega.q, in.nu, in.omega);
    b.y1_l = bound_y1(g.mu.q, g.nu.q, g.omega.q, in.mu, in.nu, in.omega, b.y0_l);
    if (b.y1_l <= 0.0 || g.mu.q <= 0.0) {
        return b;
    }
    b.e1_u = bound_e1(g.nu.e * g.nu.q, g.omega.e * g.omega.q, in.nu, in.omega, b.y1_l);
    b.q1_l = b.y1_l * in.mu * std::exp(-in.mu);
    const double q_sift = params.p_y_alice * params.p_y_bob;
    const double e_mu = std::clamp(g.mu.e, 0.0, 1.0);
    const double net = -g.mu.q * params.f_ec * binary_entropy(e_mu) + b.q1_l * (1.0 - binary_entropy(b.e1_u));
    b.r_per_pulse = q_sift * std::max(0.0, net);
    b.r_bps = b.r_per_pulse * params.clock * params.y_receiver_factor;
    return b;
}

/// Gains of the honest analytic channel described by `params`.
inline DecoyGains analytic_decoy_gains(const LinkParams &params, const DecoyIntensities &in) {
    const double eta = channel_eta(params);
    const double y0 = channel_y0(params);
    return {analytic_gain_qber(in.mu, eta, y0, params.e_det), analytic_gain_qber(in.nu, eta, y0, params.e_det),
            analytic_gain_qber(in.omega, eta, y0, params.e_det)};
}

inline RateBreakdown analytic_rate(const LinkParams &params, const DecoyIntensities &in) {
    params.validate();
    return secure_key_rate(analytic_decoy_gains(params, in), params, in);
}

struct SweepPoint {
    double loss_db = 0;
    RateBreakdown rate;
    double qber = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    /// Largest swept loss with a positive key rate.
    std::optional<double> cutoff_db;
};

/// Evaluates the analytic model at loss_min, loss_min + step, ... <= loss_max.
/// Empty when loss_min > loss_max.
inline SweepResult sweep_loss(double loss_min, double loss_max, double step, const LinkParams &params,
                              const DecoyIntensities &in) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("sweep_loss: step must be positive");
    }
    if (!std::isfinite(loss_min) || !std::isfinite(loss_max) || loss_min < 0.0) {
        throw ConfigError("sweep_loss: losses must be finite and non-negative");
    }
    SweepResult out;
    if (loss_min > loss_max) {
        return out;
    }
    // Tolerate round-off so that e.g. 0..60 step 1 yields 61 points.
    const auto n = static_cast<std::size_t>(std::floor((loss_max - loss_min) / step + 1e-9)) + 1;
    out.points.reserve(n);
    LinkParams p = params;
    for (std::size_t i = 0; i < n; ++i) {
        p.loss_db = loss_min + static_cast<double>(i) * step;
        SweepPoint pt{p.loss_db, analytic_rate(p, in), 0.0};
        pt.qber = pt.rate.e_mu;
        if (pt.rate.r_bps > 0.0) {
            out.cutoff_db = pt.loss_db;
        }
        out.points.push_back(pt);
    }
    return out;
}

/// CSV: loss_db,q_mu,e_mu,y1_l,e1_u,r_per_pulse,r_bps
inline void write_sweep_csv(std::ostream &os, const SweepResult &s) {
    using detail::fmt_double;
    os << "loss_db,q_mu,e_mu,y1_l,e1_u,r_per_pulse,r_bps\n";
    for (const auto &pt : s.points) {
        const auto &r = pt.rate;
        os << fmt_double(pt.loss_db) << ',' << fmt_double(r.q_mu) << ',' << fmt_double(r.e_mu) << ','
           << fmt_double(r.y1_l) << ',' << fmt_double(r.e1_u) << ',' << fmt_double(r.r_per_pulse) << ','
           << fmt_double(r.r_bps) << '\n';
    }
}

}  // namespace dmqkd

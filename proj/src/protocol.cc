// Copyright 2026 The Gaussify Authors
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

#include "gaussify/protocol.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

#include "gaussify/errors.h"

namespace gaussify {

namespace {

// Relative margin below which p0' and p1' count as equal (threshold case).
constexpr double kThresholdMargin = 1e-12;

constexpr double kConvergenceTolerance = 1e-4;

IterationRecord make_record(int index, PhotonDistribution state, double p_succ, double p_tot, double log_p_tot,
                            bool with_distance) {
    PhotonMoments moments = photon_moments(state);
    double kurtosis = excess_kurtosis(state);
    double distance = with_distance ? statistical_distance_to_gaussian(state) : std::numeric_limits<double>::quiet_NaN();
    double fidelity = fidelity_to_thermal(state);
    return IterationRecord{index,    std::move(state), moments.mean, moments.variance, kurtosis, distance,
                           fidelity, p_succ,           p_tot,        log_p_tot};
}

}  // namespace

const char *to_string(GaussificationMode mode) {
    return mode == GaussificationMode::kHeralded ? "heralded" : "deterministic";
}

GaussificationMode parse_mode(const std::string &text) {
    if (text == "heralded") {
        return GaussificationMode::kHeralded;
    }
    if (text == "deterministic") {
        return GaussificationMode::kDeterministic;
    }
    throw ConfigError("unknown mode '" + text + "' (expected heralded or deterministic)");
}

const char *to_string(RunStatus status) {
    switch (status) {
        case RunStatus::kCompleted:
            return "completed";
        case RunStatus::kCapSaturated:
            return "cap_saturated";
    }
    return "unknown";
}

void validate(const ProtocolConfig &config) {
    if (config.iterations < 0 || config.iterations > config.max_iterations) {
        throw ConfigError(fmt::format("iterations must lie in [0, {}], got {}", config.max_iterations,
                                      config.iterations));
    }
    if (config.input.n_max() > config.truncation_cap) {
        throw ConfigError(fmt::format("input support n_max = {} exceeds truncation cap {}", config.input.n_max(),
                                      config.truncation_cap));
    }
    double needed = std::ldexp(static_cast<double>(config.input.n_max()), config.iterations);
    if (!config.accept_truncation && static_cast<double>(config.truncation_cap) < needed) {
        throw ConfigError(fmt::format(
            "truncation cap {} is below 2^N n_max = {}; raise the cap or acknowledge tail truncation",
            config.truncation_cap, needed));
    }
    if (!(config.trim_tolerance >= 0.0 && config.trim_tolerance < 1.0)) {
        throw ConfigError("trim tolerance must lie in [0, 1)");
    }
    if (!(config.max_tail_mass > 0.0)) {
        throw ConfigError("maximum tail mass must be positive");
    }
}

IterationTrace run_protocol(const ProtocolConfig &config) {
    validate(config);
    bool heralded = config.mode == GaussificationMode::kHeralded;
    IterationTrace trace;
    trace.records.push_back(make_record(0, config.input, 1.0, 1.0, 0.0, config.compute_distance));
    TruncationPolicy policy{config.trim_tolerance, config.truncation_cap};
    if (policy.tolerance == 0.0) {
        policy.tolerance = std::numeric_limits<double>::min();
    }
    for (int j = 1; j <= config.iterations; ++j) {
        const IterationRecord &prev = trace.records.back();
        std::size_t povm_size = 2 * prev.state.n_max();
        DiagonalPovm povm = heralded ? make_nonclick_povm(config.detector_eta, povm_size) : make_identity_povm(povm_size);
        MergeResult merged{prev.state, 1.0};
        try {
            if (config.table && config.table->dim() >= static_cast<int>(povm_size)) {
                merged = merge(prev.state, povm, *config.table, config.success_floor);
            } else {
                merged = merge(prev.state, povm, config.success_floor);
            }
        } catch (const VanishingSuccessError &e) {
            throw VanishingSuccessError(fmt::format("iteration {}: {}", j, e.what()), e.p_succ);
        }
        double p_succ = heralded ? merged.p_succ : 1.0;
        TrimResult trimmed = trim_tail(merged.state, policy);
        bool cap_hit = trimmed.cap_limited;
        double log_p_tot = 2.0 * prev.log_p_tot + std::log(p_succ);
        double p_tot = prev.p_tot * prev.p_tot * p_succ;
        trace.records.push_back(
            make_record(j, std::move(trimmed.state), p_succ, p_tot, log_p_tot, config.compute_distance));
        const IterationRecord &rec = trace.records.back();
        if (!trace.converged_at && config.compute_distance && rec.mean > 0.0) {
            const IterationRecord &before = trace.records[trace.records.size() - 2];
            if (std::abs(rec.mean - before.mean) / rec.mean < kConvergenceTolerance &&
                rec.distance < kConvergenceTolerance) {
                trace.converged_at = j;
            }
        }
        // tail_mass is a worst-case bound; below the cap it is informational only
        if (cap_hit && rec.state.tail_mass() > config.max_tail_mass) {
            trace.status = RunStatus::kCapSaturated;
            trace.message = fmt::format("iteration {}: accumulated tail mass {:.3e} exceeds {:.3e} at cap {}", j,
                                        rec.state.tail_mass(), config.max_tail_mass, config.truncation_cap);
            break;
        }
    }
    return trace;
}

double total_success_probability(const std::vector<double> &step_success) {
    auto steps = static_cast<int>(step_success.size());
    double total = 1.0;
    for (int j = 1; j <= steps; ++j) {
        total *= std::pow(step_success[static_cast<std::size_t>(j - 1)], std::ldexp(1.0, steps - j));
    }
    return total;
}

std::pair<double, double> attenuated_low_probabilities(const PhotonDistribution &input, DetectorEfficiency eta) {
    double t = eta.value();
    double miss = 1.0 - t;
    auto p = input.probs();
    double p0 = 0.0;
    double p1 = 0.0;
    double pow_miss = 1.0;  // (1 - eta)^(n - 1) once n >= 1
    for (std::size_t n = 0; n < p.size(); ++n) {
        if (n == 0) {
            p0 += p[0];
            continue;
        }
        p1 += static_cast<double>(n) * t * pow_miss * p[n];
        pow_miss *= miss;
        p0 += pow_miss * p[n];
    }
    return {p0, p1};
}

AsymptotePrediction predict_asymptote(const PhotonDistribution &input, DetectorEfficiency eta) {
    if (eta.value() == 0.0) {
        throw DomainError("asymptote prediction needs a heralding efficiency eta > 0");
    }
    auto [p0, p1] = attenuated_low_probabilities(input, eta);
    AsymptotePrediction out{p0, p1, std::nullopt};
    if (p0 - p1 > kThresholdMargin * p0) {
        out.mean = p1 / (eta.value() * (p0 - p1));
    }
    return out;
}

double predict_asymptote_via_covariance(const PhotonDistribution &input, DetectorEfficiency eta) {
    double t = eta.value();
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError("covariance predictor needs 0 < eta < 1");
    }
    auto [p0, p1] = attenuated_low_probabilities(input, eta);
    double n_pi = (1.0 - t) / t;
    double n_sigma = (1.0 - t) * p1 / (t * p0);
    if (!(n_pi - n_sigma > kThresholdMargin * n_pi)) {
        throw DivergenceError("Gamma_pi - Gamma_sigma is not positive definite; heralded protocol diverges");
    }
    using Mat = Eigen::Matrix2cd;
    const std::complex<double> i(0.0, 1.0);
    Mat identity = Mat::Identity();
    Mat symplectic;
    symplectic << 0.0, 1.0, -1.0, 0.0;
    Mat gamma_pi = (1.0 + 2.0 * n_pi) * identity;
    Mat gamma_sigma = (1.0 + 2.0 * n_sigma) * identity;
    Mat gamma_inf = (gamma_pi - i * symplectic) * (gamma_pi - gamma_sigma).inverse() * (gamma_pi + i * symplectic) -
                    gamma_pi;
    double diag = gamma_inf(0, 0).real();
    double scale = std::max(1.0, std::abs(diag));
    if (std::abs(gamma_inf(0, 1)) > 1e-9 * scale || std::abs(gamma_inf(1, 0)) > 1e-9 * scale ||
        std::abs(gamma_inf(1, 1) - gamma_inf(0, 0)) > 1e-9 * scale || std::abs(gamma_inf(0, 0).imag()) > 1e-9 * scale) {
        throw std::logic_error("asymptotic covariance matrix is not proportional to the identity");
    }
    return 0.5 * (diag - 1.0);
}

SuccessBounds success_bounds(double mean_photons_in, DetectorEfficiency eta) {
    if (!(mean_photons_in >= 0.0) || !std::isfinite(mean_photons_in)) {
        throw DomainError("mean photon number must be finite and non-negative");
    }
    double x = eta.value() * mean_photons_in;
    return {std::max(0.0, 1.0 - x), 1.0 / (1.0 + x)};
}

double ehd_reduction_factor(DetectorEfficiency eta, DetectorEfficiency eta_bhd, int measurements) {
    if (measurements < 1) {
        throw DomainError("number of heralding measurements must be at least 1");
    }
    if (eta.value() == 0.0) {
        return 1.0;
    }
    if (eta.value() >= eta_bhd.value()) {
        throw DomainError("emulation needs eta < eta_bhd");
    }
    return std::pow(1.0 - eta.value() / eta_bhd.value(), measurements);
}

}  // namespace gaussify

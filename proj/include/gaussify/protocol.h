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

#ifndef GAUSSIFY_PROTOCOL_H
#define GAUSSIFY_PROTOCOL_H

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaussify/interferometer.h"
#include "gaussify/photon_distribution.h"

namespace gaussify {

constexpr int kDefaultMaxIterations = 12;

enum class GaussificationMode { kHeralded, kDeterministic };

const char *to_string(GaussificationMode mode);
GaussificationMode parse_mode(const std::string &text);

struct ProtocolConfig {
    PhotonDistribution input = PhotonDistribution::from_weights({1.0});
    /// Efficiency of the heralding (no-click) detectors.
    DetectorEfficiency detector_eta{1.0};
    int iterations = 0;
    GaussificationMode mode = GaussificationMode::kHeralded;
    std::size_t truncation_cap = kDefaultTruncationCap;
    /// Trailing mass dropped after every merge.
    double trim_tolerance = 1e-16;
    /// Once the cap truncates a state, the run stops with kCapSaturated if the
    /// accumulated tail mass exceeds this.
    double max_tail_mass = 1e-6;
    /// Required when truncation_cap < 2^N n_max(input).
    bool accept_truncation = false;
    int max_iterations = kDefaultMaxIterations;
    double success_floor = kDefaultSuccessFloor;
    /// Statistical distance D is the costliest diagnostic; it can be skipped.
    bool compute_distance = true;
    /// Optional shared table; used whenever it is large enough.
    std::shared_ptr<const BsTransitionTable> table;
};

/// Throws ConfigError when the configuration violates its invariants.
void validate(const ProtocolConfig &config);

struct IterationRecord {
    int index;
    PhotonDistribution state;
    double mean;
    double variance;
    double kurtosis;
    /// NaN when distances were not requested.
    double distance;
    double fidelity;
    /// Success probability of the step that produced this record (1 at j = 0
    /// and in deterministic mode).
    double p_succ;
    /// p_tot,j = prod_{i<=j} p_succ,i^(2^(j-i)).
    double p_tot;
    double log_p_tot;
};

enum class RunStatus { kCompleted, kCapSaturated };

const char *to_string(RunStatus status);

struct IterationTrace {
    std::vector<IterationRecord> records;
    RunStatus status = RunStatus::kCompleted;
    std::string message;
    /// First index j where |<n>_j - <n>_{j-1}| / <n>_j < 1e-4 and D_j < 1e-4.
    std::optional<int> converged_at;

    double p_tot() const {
        return records.empty() ? 1.0 : records.back().p_tot;
    }
    double tail_mass() const {
        return records.empty() ? 0.0 : records.back().state.tail_mass();
    }
};

/// Iterates the merge step. Cap saturation and vanishing success stop the
/// run early; the trace keeps every completed snapshot and reports why.
/// Throws VanishingSuccessError when a heralding step falls below the floor.
IterationTrace run_protocol(const ProtocolConfig &config);

/// Product formula prod_{j=1..N} p_succ,j^(2^(N-j)) from per-step values.
double total_success_probability(const std::vector<double> &step_success);

/// Loss-transformed vacuum and single-photon probabilities:
/// p0' = sum p_n (1-eta)^n, p1' = sum n eta (1-eta)^(n-1) p_n.
std::pair<double, double> attenuated_low_probabilities(const PhotonDistribution &input, DetectorEfficiency eta);

struct AsymptotePrediction {
    double p0;
    double p1;
    /// Mean photon number of the asymptotic thermal state; empty when the
    /// heralded protocol diverges (p0' <= p1').
    std::optional<double> mean;
};

/// n_inf = (1/eta) p1' / (p0' - p1'). Throws DomainError for eta == 0.
AsymptotePrediction predict_asymptote(const PhotonDistribution &input, DetectorEfficiency eta);

/// Same asymptote from the covariance-matrix fixed point
/// Gamma_inf = (G_pi - i S)(G_pi - G_sigma)^-1 (G_pi + i S) - G_pi,
/// evaluated on 2x2 matrices. Requires 0 < eta < 1; throws DivergenceError
/// when G_pi - G_sigma is not positive.
double predict_asymptote_via_covariance(const PhotonDistribution &input, DetectorEfficiency eta);

struct SuccessBounds {
    double lower;
    double upper;
};

/// [max(0, 1 - eta mu), 1 / (1 + eta mu)] for Poisson inputs of mean mu.
SuccessBounds success_bounds(double mean_photons_in, DetectorEfficiency eta);

/// Success penalty (1 - eta/eta_bhd)^M when the no-click element is emulated
/// by eight-port homodyne detection with efficiency eta_bhd.
double ehd_reduction_factor(DetectorEfficiency eta, DetectorEfficiency eta_bhd, int measurements);

}  // namespace gaussify

#endif

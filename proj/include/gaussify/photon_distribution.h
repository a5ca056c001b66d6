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

#ifndef GAUSSIFY_PHOTON_DISTRIBUTION_H
#define GAUSSIFY_PHOTON_DISTRIBUTION_H

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gaussify {

// Quadrature convention used throughout the library:
//
//     x = (a + a^dagger) / sqrt(2)
//
// so the vacuum has <x^2> = 1/2 and a Fock-diagonal state with mean photon
// number n has <x^2> = n + 1/2. Homodyne samples, pattern functions and
// response matrices all use this scaling.

constexpr double kDefaultTruncationTolerance = 1e-12;
constexpr std::size_t kDefaultTruncationCap = 512;
constexpr int kMaxQuadratureOrder = 8;

/// Transmittance or detection efficiency in [0, 1].
class DetectorEfficiency {
   public:
    explicit DetectorEfficiency(double eta);
    double value() const {
        return eta_;
    }
    bool operator==(const DetectorEfficiency &) const = default;

   private:
    double eta_;
};

struct TruncationPolicy {
    /// Largest probability mass allowed beyond n_max.
    double tolerance = kDefaultTruncationTolerance;
    /// Hard upper bound on n_max.
    std::size_t cap = kDefaultTruncationCap;
};

/// Photon-number distribution of a Fock-diagonal single-mode state,
/// truncated at n_max. Entries always sum to one (to 1e-12); `tail_mass`
/// is the declared bound on probability that lived beyond n_max before
/// renormalization.
class PhotonDistribution {
   public:
    /// Normalizes `weights`. Throws DomainError on negative or non-finite
    /// entries or a zero sum.
    static PhotonDistribution from_weights(std::vector<double> weights, double tail_mass = 0.0);

    std::span<const double> probs() const {
        return probs_;
    }
    /// p_n, zero beyond the support.
    double operator[](std::size_t n) const {
        return n < probs_.size() ? probs_[n] : 0.0;
    }
    std::size_t size() const {
        return probs_.size();
    }
    std::size_t n_max() const {
        return probs_.size() - 1;
    }
    double tail_mass() const {
        return tail_mass_;
    }

   private:
    PhotonDistribution(std::vector<double> probs, double tail_mass);
    std::vector<double> probs_;
    double tail_mass_;
};

PhotonDistribution make_poisson(double mean_photons, const TruncationPolicy &policy = {});
PhotonDistribution make_thermal(double mean_photons, const TruncationPolicy &policy = {});
PhotonDistribution make_custom(std::vector<double> probs);

/// Pure-loss channel with transmittance eta (binomial thinning of p_n).
PhotonDistribution apply_loss(const PhotonDistribution &state, DetectorEfficiency eta);

struct PhotonMoments {
    double mean;
    double variance;
    /// <a^dag^2 a^2> / <n>^2; empty when the mean photon number is zero.
    std::optional<double> g2;
};

PhotonMoments photon_moments(const PhotonDistribution &state);

/// Normally ordered moment <a^dag^k a^k> = sum_n n!/(n-k)! p_n.
double factorial_moment(const PhotonDistribution &state, int k);

/// Exact <x^k> for 1 <= k <= kMaxQuadratureOrder; odd orders vanish.
double quadrature_moment(const PhotonDistribution &state, int k);

double excess_kurtosis(const PhotonDistribution &state);

/// P(x) = sum_n p_n psi_n(x)^2.
double quadrature_pdf(const PhotonDistribution &state, double x);
/// Cumulative distribution of P(x).
double quadrature_cdf(const PhotonDistribution &state, double x);

/// Half-width of the quadrature window that holds essentially all of P(x):
/// 6 sqrt(<n> + 1/2) + 2.
double quadrature_window(const PhotonDistribution &state);

/// Classical fidelity (sum_n sqrt(p_n q_n))^2 between two distributions.
double bhattacharyya_fidelity(const PhotonDistribution &p, const PhotonDistribution &q);

/// Fidelity against the thermal state with the same mean photon number.
double fidelity_to_thermal(const PhotonDistribution &state);

/// D = 1/2 int |P(x) - P_G(x)| dx with P_G the zero-mean Gaussian of
/// variance <n> + 1/2. Adaptive Gauss-Kronrod quadrature, absolute error
/// well below 1e-6.
double statistical_distance_to_gaussian(const PhotonDistribution &state);

struct TrimResult {
    PhotonDistribution state;
    /// Mass removed by this call (already folded into state.tail_mass()).
    double dropped_mass;
    /// True when the cap, not the tolerance, decided the new n_max.
    bool cap_limited;
};

/// Drops trailing entries whose combined mass is at most `policy.tolerance`,
/// then enforces `policy.cap`. The removed mass is added to tail_mass.
TrimResult trim_tail(const PhotonDistribution &state, const TruncationPolicy &policy);

/// Half the L1 distance between two photon-number distributions.
double total_variation(const PhotonDistribution &p, const PhotonDistribution &q);

}  // namespace gaussify

#endif

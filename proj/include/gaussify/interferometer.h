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

#ifndef GAUSSIFY_INTERFEROMETER_H
#define GAUSSIFY_INTERFEROMETER_H

#include <cstddef>
#include <span>
#include <vector>

#include "gaussify/photon_distribution.h"

namespace gaussify {

constexpr double kDefaultSuccessFloor = 1e-30;

/// POVM weights below this value are treated as zero by the streaming merge.
constexpr double kPovmWeightFloor = 1e-22;

/// Photon-number transition probabilities of the balanced beam splitter,
/// B(j, k | m, n) = |<j, k| U |m, n>|^2 with a^dag -> (a^dag + b^dag)/sqrt(2)
/// and b^dag -> (a^dag - b^dag)/sqrt(2). Stored for every total photon
/// number N = m + n <= dim() as an (N+1) x (N+1) matrix indexed by (j, m).
class BsTransitionTable {
   public:
    explicit BsTransitionTable(int max_total_photons);

    int dim() const {
        return dim_;
    }
    /// B(j, k | m, n); zero unless j + k == m + n <= dim().
    double prob(int j, int k, int m, int n) const;
    /// Row-major (N+1) x (N+1) block for total photon number N, entry (j, m).
    std::span<const double> level(int total) const;

   private:
    int dim_;
    std::vector<std::size_t> offsets_;
    std::vector<double> probs_;
};

/// Diagonal POVM element sum_n w_n |n><n| with 0 <= w_n <= 1.
class DiagonalPovm {
   public:
    explicit DiagonalPovm(std::vector<double> weights);
    std::span<const double> weights() const {
        return weights_;
    }
    std::size_t size() const {
        return weights_.size();
    }
    double operator[](std::size_t n) const {
        return weights_[n];
    }

   private:
    std::vector<double> weights_;
};

/// No-click element of a detector with efficiency eta: w_n = (1 - eta)^n.
DiagonalPovm make_nonclick_povm(DetectorEfficiency eta, std::size_t n_max);
DiagonalPovm make_vacuum_projector(std::size_t n_max);
DiagonalPovm make_identity_povm(std::size_t n_max);

struct MergeResult {
    PhotonDistribution state;
    /// Probability that the conditioning measurement succeeded.
    double p_succ;
};

/// One merge step: interfere two copies of `state` on the balanced beam
/// splitter and condition the second output port on `povm`.
///
/// q_j = sum_{m,n} p_m p_n B(j, m+n-j | m, n) w_{m+n-j},  p_succ = sum_j q_j.
///
/// Requires table.dim() >= 2 n_max and povm.size() > 2 n_max. Throws
/// VanishingSuccessError when p_succ < success_floor.
MergeResult merge(const PhotonDistribution &state, const DiagonalPovm &povm, const BsTransitionTable &table,
                  double success_floor = kDefaultSuccessFloor);

/// Same map without a precomputed table: amplitudes are generated level by
/// level and only the band that can contribute is kept, so memory is
/// O(n_max^2) and POVM weights below kPovmWeightFloor are skipped.
MergeResult merge(const PhotonDistribution &state, const DiagonalPovm &povm,
                  double success_floor = kDefaultSuccessFloor);

/// Unconditioned merge (identity POVM).
PhotonDistribution merge_deterministic(const PhotonDistribution &state, const BsTransitionTable &table);
PhotonDistribution merge_deterministic(const PhotonDistribution &state);

}  // namespace gaussify

#endif

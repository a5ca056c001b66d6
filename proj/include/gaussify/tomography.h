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

#ifndef GAUSSIFY_TOMOGRAPHY_H
#define GAUSSIFY_TOMOGRAPHY_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gaussify/homodyne.h"
#include "gaussify/photon_distribution.h"

namespace gaussify {

constexpr int kDefaultReconstructionBins = 256;
constexpr double kDefaultLikelihoodTolerance = 1e-8;
constexpr int kDefaultMaxEmIterations = 5000;
constexpr int kDefaultMonteCarloRuns = 100;

/// A[n][b]: probability that |n> yields a homodyne sample in bin b after loss
/// eta_h. Bin 0 is (-inf, e_0), bin i is [e_{i-1}, e_i), the last bin is
/// [e_last, +inf).
class ResponseMatrix {
   public:
    ResponseMatrix(int n_max, std::vector<double> edges, std::vector<double> entries);

    int n_max() const {
        return n_max_;
    }
    std::size_t bins() const {
        return edges_.size() + 1;
    }
    std::span<const double> edges() const {
        return edges_;
    }
    std::span<const double> row(int n) const {
        return {entries_.data() + static_cast<std::size_t>(n) * bins(), bins()};
    }
    double operator()(int n, std::size_t b) const {
        return entries_[static_cast<std::size_t>(n) * bins() + b];
    }

   private:
    int n_max_;
    std::vector<double> edges_;
    std::vector<double> entries_;
};

/// A[n][b] = sum_{k<=n} C(n,k) eta^k (1-eta)^(n-k) int_bin psi_k(x)^2 dx.
/// Throws DomainError unless edges are strictly increasing.
ResponseMatrix build_response(int n_max, DetectorEfficiency eta_h, std::span<const double> edges);

struct MaxLikOptions {
    /// Defaults to reconstruction_n_max of the sample variance.
    std::optional<int> n_max;
    int bins = kDefaultReconstructionBins;
    /// Stop when the per-sample log-likelihood gain falls below this.
    double tolerance = kDefaultLikelihoodTolerance;
    int max_iterations = kDefaultMaxEmIterations;
};

struct Reconstruction {
    PhotonDistribution state;
    /// Per-sample log-likelihood before the first and after every EM step.
    std::vector<double> log_likelihood;
    int iterations;
    bool converged;
};

/// n_max used by reconstruct_maxlik when none is given.
/// max(ceil(4 var / eta_h), support of a thermal state with the loss-compensated
/// mean (var - 1/2) / eta_h down to a 1e-4 tail).
int reconstruction_n_max(double quadrature_variance, DetectorEfficiency eta_h);
int default_reconstruction_n_max(const QuadratureBatch &batch);

/// Binned expectation-maximization estimate of p_n from homodyne data,
/// compensating the detector loss eta_h of the batch. Bins span the sample
/// mean +- 6 sigma plus underflow/overflow bins; initialization is uniform.
Reconstruction reconstruct_maxlik(const QuadratureBatch &batch, const MaxLikOptions &options = {});

struct MonteCarloErrors {
    /// Reconstructions of every simulated run, ordered by run index.
    std::vector<PhotonDistribution> runs;
    std::vector<double> mean;
    /// Sample standard deviation of p_n over runs.
    std::vector<double> std_dev;
};

/// Simulates `runs` homodyne measurements of `truth` (run r seeded with
/// derive_seed(master_seed, r)), reconstructs each one with a common n_max
/// and reports the per-n spread. Runs execute on up to `jobs` threads.
MonteCarloErrors monte_carlo_errors(const PhotonDistribution &truth, DetectorEfficiency eta_h, std::size_t count,
                                    int runs, std::uint64_t master_seed, MaxLikOptions options = {}, int jobs = 1);

}  // namespace gaussify

#endif

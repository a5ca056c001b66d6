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

#include "gaussify/interferometer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaussify/errors.h"

namespace gaussify {

namespace {

// Amplitudes A_N(j, m) = <j, N-j| U |m, N-m> for rows j in [row_lo, N] and
// columns m in [col_lo, col_hi].
struct AmplitudeBand {
    int total = 0;
    int row_lo = 0;
    int col_lo = 0;
    int col_hi = 0;
    std::vector<double> values{1.0};

    int cols() const {
        return col_hi - col_lo + 1;
    }
    double at(int j, int m) const {
        return values[static_cast<std::size_t>((j - row_lo) * cols() + (m - col_lo))];
    }
};

// Builds level N from level N-1 using
// |m, n> = (sqrt(m) a^dag |m-1, n> + sqrt(n) b^dag |m, n-1>) / N
// with U a^dag U^dag = (a^dag + b^dag)/sqrt(2), U b^dag U^dag = (a^dag - b^dag)/sqrt(2).
// Using only one of the two ports blows up rounding error around N ~ 50.
void advance(const AmplitudeBand &prev, int row_lo, int col_lo, int col_hi, std::span<const double> sqrt_int,
             AmplitudeBand &next) {
    int total = prev.total + 1;
    next.total = total;
    next.row_lo = row_lo;
    next.col_lo = col_lo;
    next.col_hi = col_hi;
    int cols = next.cols();
    next.values.assign(static_cast<std::size_t>((total - row_lo + 1) * cols), 0.0);
    auto get = [&prev](int j, int m) {
        if (j < prev.row_lo || j > prev.total || m < prev.col_lo || m > prev.col_hi) {
            return 0.0;
        }
        return prev.at(j, m);
    };
    double inv = 1.0 / (std::numbers::sqrt2 * total);
    for (int j = row_lo; j <= total; ++j) {
        double up = sqrt_int[static_cast<std::size_t>(j)];
        double down = sqrt_int[static_cast<std::size_t>(total - j)];
        for (int m = col_lo; m <= col_hi; ++m) {
            int n = total - m;
            double v = 0.0;
            if (m >= 1) {
                v += sqrt_int[static_cast<std::size_t>(m)] * (up * get(j - 1, m - 1) + down * get(j, m - 1));
            }
            if (n >= 1) {
                v += sqrt_int[static_cast<std::size_t>(n)] * (up * get(j - 1, m) - down * get(j, m));
            }
            next.values[static_cast<std::size_t>((j - row_lo) * cols + (m - col_lo))] = v * inv;
        }
    }
}

std::vector<double> sqrt_table(int upto) {
    std::vector<double> out(static_cast<std::size_t>(upto) + 1);
    for (int i = 0; i <= upto; ++i) {
        out[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i));
    }
    return out;
}

void check_merge_inputs(const PhotonDistribution &state, const DiagonalPovm &povm) {
    std::size_t needed = 2 * state.n_max() + 1;
    if (povm.size() < needed) {
        throw DomainError("POVM has " + std::to_string(povm.size()) + " weights, merge needs " +
                          std::to_string(needed));
    }
}

MergeResult finish_merge(std::vector<double> out, const PhotonDistribution &state, double success_floor) {
    double p_succ = 0.0;
    for (double q : out) {
        p_succ += q;
    }
    if (!(p_succ >= success_floor)) {
        throw VanishingSuccessError("merge success probability " + std::to_string(p_succ) + " below floor",
                                    p_succ);
    }
    while (out.size() > 1 && out.back() == 0.0) {
        out.pop_back();
    }
    // Mass missing from the input pair is at most 2 * tail; relative to the
    // conditioned output that bound scales by 1 / p_succ.
    double tail = std::min(1.0, 2.0 * state.tail_mass() / p_succ);
    return {PhotonDistribution::from_weights(std::move(out), tail), p_succ};
}

}  // namespace

BsTransitionTable::BsTransitionTable(int max_total_photons) : dim_(max_total_photons) {
    if (max_total_photons < 0) {
        throw DomainError("beam-splitter table dimension must be non-negative");
    }
    offsets_.resize(static_cast<std::size_t>(dim_) + 2);
    offsets_[0] = 0;
    for (int n = 0; n <= dim_; ++n) {
        auto side = static_cast<std::size_t>(n + 1);
        offsets_[static_cast<std::size_t>(n) + 1] = offsets_[static_cast<std::size_t>(n)] + side * side;
    }
    probs_.resize(offsets_.back());
    auto sq = sqrt_table(2 * dim_ + 2);
    AmplitudeBand cur;
    AmplitudeBand next;
    probs_[0] = 1.0;
    for (int n = 1; n <= dim_; ++n) {
        advance(cur, 0, 0, n, sq, next);
        std::swap(cur, next);
        double *dst = probs_.data() + offsets_[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < cur.values.size(); ++i) {
            dst[i] = cur.values[i] * cur.values[i];
        }
    }
}

double BsTransitionTable::prob(int j, int k, int m, int n) const {
    int total = m + n;
    if (j < 0 || k < 0 || m < 0 || n < 0 || j + k != total || total > dim_) {
        return 0.0;
    }
    return level(total)[static_cast<std::size_t>(j * (total + 1) + m)];
}

std::span<const double> BsTransitionTable::level(int total) const {
    auto t = static_cast<std::size_t>(total);
    return {probs_.data() + offsets_[t], offsets_[t + 1] - offsets_[t]};
}

DiagonalPovm::DiagonalPovm(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double w : weights_) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw DomainError("POVM weights must lie in [0, 1]");
        }
    }
}

DiagonalPovm make_nonclick_povm(DetectorEfficiency eta, std::size_t n_max) {
    std::vector<double> w(n_max + 1);
    double miss = 1.0 - eta.value();
    double v = 1.0;
    for (double &x : w) {
        x = v;
        v *= miss;
    }
    return DiagonalPovm(std::move(w));
}

DiagonalPovm make_vacuum_projector(std::size_t n_max) {
    return make_nonclick_povm(DetectorEfficiency(1.0), n_max);
}

DiagonalPovm make_identity_povm(std::size_t n_max) {
    return DiagonalPovm(std::vector<double>(n_max + 1, 1.0));
}

MergeResult merge(const PhotonDistribution &state, const DiagonalPovm &povm, const BsTransitionTable &table,
                  double success_floor) {
    check_merge_inputs(state, povm);
    int n_max = static_cast<int>(state.n_max());
    if (table.dim() < 2 * n_max) {
        throw DomainError("beam-splitter table dimension " + std::to_string(table.dim()) + " below 2 n_max = " +
                          std::to_string(2 * n_max));
    }
    auto p = state.probs();
    std::vector<double> out(static_cast<std::size_t>(2 * n_max + 1), 0.0);
    std::vector<double> pair(static_cast<std::size_t>(2 * n_max + 1));
    for (int total = 0; total <= 2 * n_max; ++total) {
        int lo = std::max(0, total - n_max);
        int hi = std::min(total, n_max);
        for (int m = lo; m <= hi; ++m) {
            pair[static_cast<std::size_t>(m)] = p[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(total - m)];
        }
        auto block = table.level(total);
        for (int j = 0; j <= total; ++j) {
            double w = povm[static_cast<std::size_t>(total - j)];
            if (w == 0.0) {
                continue;
            }
            const double *row = block.data() + static_cast<std::size_t>(j * (total + 1));
            double s = 0.0;
            for (int m = lo; m <= hi; ++m) {
                s += row[m] * pair[static_cast<std::size_t>(m)];
            }
            out[static_cast<std::size_t>(j)] += w * s;
        }
    }
    return finish_merge(std::move(out), state, success_floor);
}

MergeResult merge(const PhotonDistribution &state, const DiagonalPovm &povm, double success_floor) {
    check_merge_inputs(state, povm);
    int n_max = static_cast<int>(state.n_max());
    int top = 2 * n_max;
    int band = 0;
    for (int k = 0; k <= top; ++k) {
        if (povm[static_cast<std::size_t>(k)] >= kPovmWeightFloor) {
            band = k;
        }
    }
    auto p = state.probs();
    auto sq = sqrt_table(2 * top + 2);
    std::vector<double> out(static_cast<std::size_t>(top + 1), 0.0);
    AmplitudeBand cur;
    AmplitudeBand next;
    out[0] += povm[0] * p[0] * p[0];
    for (int total = 1; total <= top; ++total) {
        int row_lo = std::max(0, total - band);
        int col_lo = std::max(0, total - n_max);
        int col_hi = std::min(total, n_max);
        advance(cur, row_lo, col_lo, col_hi, sq, next);
        std::swap(cur, next);
        int cols = cur.cols();
        for (int j = row_lo; j <= total; ++j) {
            double w = povm[static_cast<std::size_t>(total - j)];
            if (w < kPovmWeightFloor) {
                continue;
            }
            const double *row = cur.values.data() + static_cast<std::size_t>((j - row_lo) * cols);
            double s = 0.0;
            for (int m = col_lo; m <= col_hi; ++m) {
                double a = row[m - col_lo];
                s += a * a * p[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(total - m)];
            }
            out[static_cast<std::size_t>(j)] += w * s;
        }
    }
    return finish_merge(std::move(out), state, success_floor);
}

PhotonDistribution merge_deterministic(const PhotonDistribution &state, const BsTransitionTable &table) {
    return merge(state, make_identity_povm(2 * state.n_max()), table).state;
}

PhotonDistribution merge_deterministic(const PhotonDistribution &state) {
    return merge(state, make_identity_povm(2 * state.n_max())).state;
}

}  // namespace gaussify

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

#include "gaussify/photon_distribution.h"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "gaussify/errors.h"
#include "gaussify/hermite.h"

namespace gaussify {

DetectorEfficiency::DetectorEfficiency(double eta) : eta_(eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("efficiency must lie in [0, 1], got " + std::to_string(eta));
    }
}

PhotonDistribution::PhotonDistribution(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
}

PhotonDistribution PhotonDistribution::from_weights(std::vector<double> weights, double tail_mass) {
    if (weights.empty()) {
        throw DomainError("photon-number distribution needs at least one entry");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw DomainError("photon-number weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw DomainError("photon-number weights sum to zero");
    }
    for (double &w : weights) {
        w /= total;
    }
    if (!(tail_mass >= 0.0)) {
        tail_mass = 0.0;
    }
    return PhotonDistribution(std::move(weights), std::min(tail_mass, 1.0));
}

namespace {

void check_mean(double mean_photons) {
    if (!std::isfinite(mean_photons) || mean_photons < 0.0) {
        throw DomainError("mean photon number must be finite and non-negative");
    }
}

void check_policy(const TruncationPolicy &policy) {
    if (!(policy.tolerance > 0.0 && policy.tolerance < 1.0)) {
        throw DomainError("truncation tolerance must lie in (0, 1)");
    }
}

}  // namespace

PhotonDistribution make_poisson(double mean_photons, const TruncationPolicy &policy) {
    check_mean(mean_photons);
    check_policy(policy);
    if (mean_photons == 0.0) {
        return PhotonDistribution::from_weights({1.0});
    }
    std::vector<double> p;
    double log_mu = std::log(mean_photons);
    double tail = 1.0;
    for (std::size_t n = 0;; ++n) {
        double dn = static_cast<double>(n);
        p.push_back(std::exp(-mean_photons + dn * log_mu - std::lgamma(dn + 1.0)));
        // P(X > n) = regularized lower incomplete gamma P(n + 1, mu).
        tail = boost::math::gamma_p(dn + 1.0, mean_photons);
        if ((tail < policy.tolerance && dn >= mean_photons) || n >= policy.cap) {
            break;
        }
    }
    return PhotonDistribution::from_weights(std::move(p), tail);
}

PhotonDistribution make_thermal(double mean_photons, const TruncationPolicy &policy) {
    check_mean(mean_photons);
    check_policy(policy);
    if (mean_photons == 0.0) {
        return PhotonDistribution::from_weights({1.0});
    }
    double ratio = mean_photons / (1.0 + mean_photons);
    double log_ratio = std::log(ratio);
    double log_norm = -std::log1p(mean_photons);
    std::vector<double> p;
    double tail = 1.0;
    for (std::size_t n = 0;; ++n) {
        double dn = static_cast<double>(n);
        p.push_back(std::exp(log_norm + dn * log_ratio));
        tail = std::exp((dn + 1.0) * log_ratio);
        if (tail < policy.tolerance || n >= policy.cap) {
            break;
        }
    }
    return PhotonDistribution::from_weights(std::move(p), tail);
}

PhotonDistribution make_custom(std::vector<double> probs) {
    return PhotonDistribution::from_weights(std::move(probs));
}

PhotonDistribution apply_loss(const PhotonDistribution &state, DetectorEfficiency eta) {
    double t = eta.value();
    auto p = state.probs();
    std::size_t size = p.size();
    if (t == 1.0) {
        return state;
    }
    if (t == 0.0) {
        return PhotonDistribution::from_weights({1.0}, state.tail_mass());
    }
    std::vector<double> lgam(size + 1);
    for (std::size_t n = 0; n <= size; ++n) {
        lgam[n] = std::lgamma(static_cast<double>(n) + 1.0);
    }
    double log_t = std::log(t);
    double log_r = std::log1p(-t);
    std::vector<double> out(size, 0.0);
    for (std::size_t n = 0; n < size; ++n) {
        if (p[n] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j <= n; ++j) {
            double log_b = lgam[n] - lgam[j] - lgam[n - j] + static_cast<double>(j) * log_t +
                           static_cast<double>(n - j) * log_r;
            out[j] += p[n] * std::exp(log_b);
        }
    }
    while (out.size() > 1 && out.back() == 0.0) {
        out.pop_back();
    }
    return PhotonDistribution::from_weights(std::move(out), state.tail_mass());
}

PhotonMoments photon_moments(const PhotonDistribution &state) {
    double mean = 0.0;
    double second = 0.0;
    double falling2 = 0.0;
    auto p = state.probs();
    for (std::size_t n = 0; n < p.size(); ++n) {
        double dn = static_cast<double>(n);
        mean += dn * p[n];
        second += dn * dn * p[n];
        falling2 += dn * (dn - 1.0) * p[n];
    }
    PhotonMoments m{mean, std::max(0.0, second - mean * mean), std::nullopt};
    if (mean > 0.0) {
        m.g2 = falling2 / (mean * mean);
    }
    return m;
}

double factorial_moment(const PhotonDistribution &state, int k) {
    if (k < 0) {
        throw DomainError("factorial moment order must be non-negative");
    }
    auto p = state.probs();
    double total = 0.0;
    for (std::size_t n = static_cast<std::size_t>(k); n < p.size(); ++n) {
        double falling = 1.0;
        for (int i = 0; i < k; ++i) {
            falling *= static_cast<double>(n) - i;
        }
        total += falling * p[n];
    }
    return total;
}

double quadrature_moment(const PhotonDistribution &state, int k) {
    if (k < 1 || k > kMaxQuadratureOrder) {
        throw DomainError("quadrature moment order must lie in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
    }
    if (k % 2 == 1) {
        return 0.0;
    }
    // Normal ordering of (a + a^dag)^{2m}: the r-th contraction term carries
    // (2m)! / (r! 2^r (2m-2r)!) and the diagonal part of :(a + a^dag)^{2s}: is
    // C(2s, s) <a^dag^s a^s>.
    int m = k / 2;
    auto fact = [](int n) { return std::tgamma(n + 1.0); };
    double total = 0.0;
    for (int r = 0; r <= m; ++r) {
        int s = m - r;
        double contraction = fact(2 * m) / (fact(r) * std::ldexp(1.0, r) * fact(2 * s));
        double central = fact(2 * s) / (fact(s) * fact(s));
        total += contraction * central * factorial_moment(state, s);
    }
    return std::ldexp(total, -m);
}

double excess_kurtosis(const PhotonDistribution &state) {
    double x2 = quadrature_moment(state, 2);
    double x4 = quadrature_moment(state, 4);
    return x4 / (x2 * x2) - 3.0;
}

double quadrature_pdf(const PhotonDistribution &state, double x) {
    thread_local std::vector<double> psi;
    psi.resize(state.size());
    hermite_functions(x, psi);
    auto p = state.probs();
    double total = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        total += p[n] * psi[n] * psi[n];
    }
    return total;
}

double quadrature_cdf(const PhotonDistribution &state, double x) {
    thread_local std::vector<double> cdfs;
    cdfs.resize(state.size());
    hermite_function_cdfs(x, cdfs);
    auto p = state.probs();
    double total = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        total += p[n] * cdfs[n];
    }
    return std::clamp(total, 0.0, 1.0);
}

double quadrature_window(const PhotonDistribution &state) {
    return 6.0 * std::sqrt(photon_moments(state).mean + 0.5) + 2.0;
}

double bhattacharyya_fidelity(const PhotonDistribution &p, const PhotonDistribution &q) {
    std::size_t size = std::min(p.size(), q.size());
    double overlap = 0.0;
    for (std::size_t n = 0; n < size; ++n) {
        overlap += std::sqrt(p[n] * q[n]);
    }
    return std::min(1.0, overlap * overlap);
}

double fidelity_to_thermal(const PhotonDistribution &state) {
    double mean = photon_moments(state).mean;
    if (mean <= 0.0) {
        return state[0];
    }
    double log_ratio = std::log(mean / (1.0 + mean));
    double log_norm = -std::log1p(mean);
    auto p = state.probs();
    double overlap = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        double q = std::exp(log_norm + static_cast<double>(n) * log_ratio);
        overlap += std::sqrt(p[n] * q);
    }
    return std::min(1.0, overlap * overlap);
}

double statistical_distance_to_gaussian(const PhotonDistribution &state) {
    double variance = photon_moments(state).mean + 0.5;
    double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
    auto integrand = [&](double x) {
        double gauss = norm * std::exp(-0.5 * x * x / variance);
        return std::abs(quadrature_pdf(state, x) - gauss);
    };
    // P(x) is even, so D = int_0^inf |P - P_G|. Beyond the window both
    // densities carry negligible mass; the Fock support bounds P(x) by the
    // classical turning point sqrt(2 n_max + 1).
    double limit = std::max(quadrature_window(state), std::sqrt(2.0 * static_cast<double>(state.n_max()) + 1.0) + 8.0);
    int pieces = std::max(32, static_cast<int>(std::ceil(limit / 0.25)));
    double width = limit / pieces;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        double a = i * width;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, a + width, 10, 1e-10);
    }
    return total;
}

double total_variation(const PhotonDistribution &p, const PhotonDistribution &q) {
    std::size_t size = std::max(p.size(), q.size());
    double total = 0.0;
    for (std::size_t n = 0; n < size; ++n) {
        total += std::abs(p[n] - q[n]);
    }
    return 0.5 * total;
}

TrimResult trim_tail(const PhotonDistribution &state, const TruncationPolicy &policy) {
    auto p = state.probs();
    std::size_t keep = p.size();
    double dropped = 0.0;
    while (keep > 1 && dropped + p[keep - 1] <= policy.tolerance) {
        dropped += p[--keep];
    }
    bool cap_limited = false;
    if (keep > policy.cap + 1) {
        cap_limited = true;
        while (keep > policy.cap + 1) {
            dropped += p[--keep];
        }
    }
    if (keep == p.size()) {
        return {state, 0.0, false};
    }
    std::vector<double> kept(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(keep));
    return {PhotonDistribution::from_weights(std::move(kept), state.tail_mass() + dropped), dropped, cap_limited};
}

}  // namespace gaussify

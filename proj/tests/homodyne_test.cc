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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"
#include "gaussify/errors.h"
#include "gaussify/homodyne.h"
#include "gaussify/seeding.h"
#include "oracles.h"

using namespace gaussify;

namespace {

struct SampleStats {
    double mean;
    double std_error;
};

template <class F>
SampleStats stats_of(const std::vector<double> &xs, F f) {
    long double s = 0.0L;
    long double s2 = 0.0L;
    for (double x : xs) {
        long double v = f(x);
        s += v;
        s2 += v * v;
    }
    long double n = xs.size();
    long double mean = s / n;
    long double var = (s2 / n - mean * mean) * n / (n - 1);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

// physicists' Hermite polynomial by explicit sum
long double hermite_sum(int k, long double x) {
    long double total = 0.0L;
    for (int m = 0; m <= k / 2; ++m) {
        long double term = oracle::factorial(k) / (oracle::factorial(m) * oracle::factorial(k - 2 * m));
        term *= std::pow(2.0L * x, k - 2 * m);
        total += (m % 2 ? -term : term);
    }
    return total;
}

double gaussian_cdf(double x, double var) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * var));
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)> &cdf) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double c = cdf(xs[i]);
        worst = std::max({worst, std::abs(c - i / n), std::abs((i + 1) / n - c)});
    }
    return worst;
}

}  // namespace

TEST_CASE("vacuum samples have variance one half") {
    auto batch = sample_homodyne(make_custom({1.0}), DetectorEfficiency(0.65), 1000000, 1);
    auto s = stats_of(batch.samples, [](double x) { return x * x; });
    CHECK(std::abs(s.mean - 0.5) < 5.0 * s.std_error);
}

TEST_CASE("thermal samples carry the attenuated variance") {
    auto batch = sample_homodyne(make_thermal(1.0), DetectorEfficiency(0.65), 1000000, 2);
    auto s = stats_of(batch.samples, [](double x) { return x * x; });
    CHECK(std::abs(s.mean - 1.15) < 5.0 * s.std_error);
    CHECK(batch.eta_h.value() == 0.65);
    CHECK(batch.seed == 2);
}

TEST_CASE("sampling is deterministic in the seed") {
    auto s = make_poisson(1.3);
    auto a = sample_homodyne(s, DetectorEfficiency(0.5), 5000, 99, "p");
    auto b = sample_homodyne(s, DetectorEfficiency(0.5), 5000, 99, "p");
    auto c = sample_homodyne(s, DetectorEfficiency(0.5), 5000, 100, "p");
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(a.source == "p");
    CHECK_THROWS_AS(sample_homodyne(s, DetectorEfficiency(0.5), 0, 1), DomainError);
    CHECK_THROWS_AS(sample_homodyne(s, DetectorEfficiency(0.0), 10, 1), DomainError);
}

TEST_CASE("KS statistic below the 0.1% critical value") {
    const double critical = 1.9495 / std::sqrt(1e6);
    SUBCASE("thermal") {
        auto batch = sample_homodyne(make_thermal(1.0, {1e-15, 512}), DetectorEfficiency(0.65), 1000000, 5);
        CHECK(ks_statistic(batch.samples, [](double x) { return gaussian_cdf(x, 1.15); }) < critical);
    }
    SUBCASE("single photon") {
        double eta = 0.65;
        auto batch = sample_homodyne(make_custom({0.0, 1.0}), DetectorEfficiency(eta), 1000000, 6);
        auto cdf = [eta](double x) {
            double vac = 0.5 * std::erfc(-x);
            double one = vac - x * std::exp(-x * x) / std::sqrt(std::numbers::pi);
            return (1.0 - eta) * vac + eta * one;
        };
        CHECK(ks_statistic(batch.samples, cdf) < critical);
    }
}

TEST_CASE("pattern functions match the Hermite form") {
    for (double eta : {0.2, 0.65, 0.9}) {
        for (double x : {-2.3, -0.1, 0.7, 3.1}) {
            long double r = std::sqrt(1.0L - eta);
            for (int k = 1; k <= kMaxPatternXOrder; ++k) {
                long double expect = std::pow(r / (2.0L * std::sqrt(static_cast<long double>(eta))), k) *
                                     hermite_sum(k, x / r);
                CHECK(x_moment_pattern(x, eta, k) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-10));
            }
            for (int k = 1; k <= kMaxPatternNOrder; ++k) {
                long double c = oracle::factorial(k) * oracle::factorial(k) /
                                (std::pow(2.0L, k) * oracle::factorial(2 * k) * std::pow(static_cast<long double>(eta), k));
                CHECK(n_moment_pattern(x, eta, k) ==
                      doctest::Approx(static_cast<double>(c * hermite_sum(2 * k, x))).epsilon(1e-10));
            }
        }
    }
    for (int k = 1; k <= 8; ++k) {
        CHECK(x_moment_pattern(1.7, 1.0, k) == doctest::Approx(std::pow(1.7, k)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(x_moment_pattern(0.0, 0.5, 0), DomainError);
    CHECK_THROWS_AS(x_moment_pattern(0.0, 0.5, 9), DomainError);
    CHECK_THROWS_AS(n_moment_pattern(0.0, 0.5, 5), DomainError);
}

TEST_CASE("raw moments at unit efficiency") {
    auto batch = sample_homodyne(make_poisson(0.8), DetectorEfficiency(1.0), 20000, 8);
    for (int k = 1; k <= 4; ++k) {
        long double raw = 0.0L;
        for (double x : batch.samples) {
            raw += std::pow(static_cast<long double>(x), k);
        }
        raw /= batch.samples.size();
        CHECK(estimate_x_moment(batch, k) == doctest::Approx(static_cast<double>(raw)).epsilon(1e-12));
    }
}

TEST_CASE("pattern estimators on thermal(1) at 0.65") {
    auto batch = sample_homodyne(make_thermal(1.0), DetectorEfficiency(0.65), 1000000, 11);
    auto report = estimate_moments(batch, kDefaultBootstrapResamples, 12);
    auto within = [](EstimateWithError e, double truth) { return std::abs(e.value - truth) < 5.0 * e.std_error; };
    CHECK(within(report.x_moments[1], 1.5));
    CHECK(within(report.x_moments[0], 0.0));
    CHECK(within(report.x_moments[2], 0.0));
    CHECK(within(report.x_moments[3], 3.0 * 1.5 * 1.5));
    CHECK(within(report.mean_n, 1.0));
    CHECK(within(report.n_moments[1], 2.0));
    CHECK(within(report.kurtosis, 0.0));
    CHECK(within(report.variance_n, 2.0));
    CHECK(report.kurtosis.std_error > 0.0);
    CHECK(estimate_x_moment(batch, 2) == doctest::Approx(report.x_moments[1].value).epsilon(1e-12));
    CHECK(estimate_n_moment(batch, 1) == doctest::Approx(report.mean_n.value).epsilon(1e-12));
    auto vk = estimate_variance_and_kurtosis(batch);
    CHECK(vk.kurtosis == doctest::Approx(report.kurtosis.value).epsilon(1e-10));
    CHECK(vk.variance == doctest::Approx(report.variance_n.value).epsilon(1e-10));
}

TEST_CASE("photon-number estimators") {
    SUBCASE("vacuum") {
        auto batch = sample_homodyne(make_custom({1.0}), DetectorEfficiency(0.65), 200000, 21);
        auto s = stats_of(batch.samples, [](double x) { return n_moment_pattern(x, 0.65, 1); });
        CHECK(std::abs(estimate_n_moment(batch, 1)) < 5.0 * s.std_error);
    }
    SUBCASE("poisson mean") {
        for (double mu : {0.5, 2.0}) {
            auto batch = sample_homodyne(make_poisson(mu), DetectorEfficiency(0.65), 200000, 22);
            auto s = stats_of(batch.samples, [](double x) { return n_moment_pattern(x, 0.65, 1); });
            CHECK(std::abs(estimate_n_moment(batch, 1) - mu) < 5.0 * s.std_error);
        }
    }
    SUBCASE("single photon kurtosis") {
        auto batch = sample_homodyne(make_custom({0.0, 1.0}), DetectorEfficiency(0.65), 1000000, 23);
        auto report = estimate_moments(batch, kDefaultBootstrapResamples, 24);
        CHECK(std::abs(report.kurtosis.value + 4.0 / 3.0) < 5.0 * report.kurtosis.std_error);
    }
    SUBCASE("poisson(1) variance") {
        auto batch = sample_homodyne(make_poisson(1.0), DetectorEfficiency(0.65), 1000000, 25);
        auto report = estimate_moments(batch, kDefaultBootstrapResamples, 26);
        CHECK(std::abs(report.variance_n.value - 1.0) < 5.0 * report.variance_n.std_error);
    }
    CHECK_THROWS_AS(estimate_variance_and_kurtosis(sample_homodyne(make_custom({1.0}), DetectorEfficiency(1.0), 100, 1)),
                    DomainError);
    CHECK_THROWS_AS(estimate_x_moment(QuadratureBatch{}, 1), DomainError);
}

TEST_CASE("x estimators are unbiased across seeds") {
    std::vector<PhotonDistribution> states{make_thermal(1.0), make_custom({0.0, 1.0}), make_poisson(2.0)};
    for (const auto &state : states) {
        std::array<std::vector<double>, 4> runs;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            auto batch = sample_homodyne(state, DetectorEfficiency(0.65), 100000, derive_seed(77, seed));
            for (int k = 1; k <= 4; ++k) {
                runs[static_cast<std::size_t>(k - 1)].push_back(estimate_x_moment(batch, k));
            }
        }
        for (int k = 1; k <= 4; ++k) {
            auto s = stats_of(runs[static_cast<std::size_t>(k - 1)], [](double v) { return v; });
            CHECK(std::abs(s.mean - quadrature_moment(state, k)) < 5.0 * s.std_error);
        }
    }
}

TEST_CASE("uncompensated patterns see eta^k scaled moments") {
    double eta = 0.65;
    auto truth = make_thermal(1.0);
    auto batch = sample_homodyne(truth, DetectorEfficiency(eta), 1000000, 31);
    QuadratureBatch naive = batch;
    naive.eta_h = DetectorEfficiency(1.0);
    for (int k = 1; k <= 2; ++k) {
        auto s = stats_of(batch.samples, [k](double x) { return n_moment_pattern(x, 1.0, k); });
        double expect = std::pow(eta, k) * factorial_moment(truth, k);
        CHECK(std::abs(estimate_n_moment(naive, k) - expect) < 5.0 * s.std_error);
    }
}

TEST_CASE("pattern functions are continuous at unit efficiency") {
    double eta = 1.0 - 1e-6;
    auto batch = sample_homodyne(make_thermal(1.0), DetectorEfficiency(eta), 1000000, 41);
    QuadratureBatch raw = batch;
    raw.eta_h = DetectorEfficiency(1.0);
    for (int k : {2, 4}) {
        CHECK(estimate_x_moment(batch, k) == doctest::Approx(estimate_x_moment(raw, k)).epsilon(1e-3));
    }
    for (int k : {1, 2}) {
        CHECK(estimate_n_moment(batch, k) == doctest::Approx(estimate_n_moment(raw, k)).epsilon(1e-3));
    }
}

TEST_CASE("binned distance to gaussian") {
    auto thermal = make_thermal(1.0);
    auto a = sample_homodyne(thermal, DetectorEfficiency(0.65), 20000, 51);
    CHECK(binned_distance_to_gaussian(a) == binned_distance_to_gaussian(a));
    CHECK_THROWS_AS(binned_distance_to_gaussian(a, 1), DomainError);

    std::vector<double> small;
    std::vector<double> large;
    for (std::uint64_t r = 0; r < 20; ++r) {
        small.push_back(binned_distance_to_gaussian(sample_homodyne(thermal, DetectorEfficiency(0.65), 10000, 1000 + r)));
        large.push_back(binned_distance_to_gaussian(sample_homodyne(thermal, DetectorEfficiency(0.65), 1000000, 2000 + r)));
    }
    std::nth_element(small.begin(), small.begin() + 10, small.end());
    std::nth_element(large.begin(), large.begin() + 10, large.end());
    CHECK(large[10] < small[10]);

    // a single photon is visibly non-gaussian
    auto photon = sample_homodyne(make_custom({0.0, 1.0}), DetectorEfficiency(1.0), 200000, 52);
    CHECK(binned_distance_to_gaussian(photon) > 0.05);
}

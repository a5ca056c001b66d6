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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gaussify/errors.h"
#include "gaussify/hermite.h"
#include "gaussify/photon_distribution.h"
#include "oracles.h"

using namespace gaussify;

namespace {

double sum(const PhotonDistribution &s) {
    double t = 0.0;
    for (double p : s.probs()) {
        t += p;
    }
    return t;
}

PhotonDistribution random_state(std::mt19937_64 &rng, int max_support) {
    std::uniform_int_distribution<int> support(1, max_support);
    return make_custom(oracle::random_distribution(rng, support(rng)));
}

}  // namespace

TEST_CASE("poisson construction") {
    CHECK(make_poisson(0.0).size() == 1);
    CHECK(make_poisson(0.0)[0] == 1.0);

    auto p = make_poisson(0.75);
    CHECK(p[1] / p[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(std::abs(sum(p) - 1.0) <= 1e-12);
    CHECK(p.tail_mass() < 1e-12);

    // e^{-1.25}
    CHECK(std::abs(make_poisson(1.25)[0] - 0.28650479686019010) < 1e-12);

    CHECK_THROWS_AS(make_poisson(-0.1), DomainError);
    CHECK_THROWS_AS(make_poisson(std::nan("")), DomainError);
}

TEST_CASE("poisson truncation respects the cap and reports the tail") {
    auto p = make_poisson(50.0, {1e-12, 40});
    CHECK(p.n_max() == 40);
    CHECK(p.tail_mass() > 0.9);
    CHECK(std::abs(sum(p) - 1.0) <= 1e-12);
}

TEST_CASE("thermal construction") {
    CHECK(make_thermal(0.0).size() == 1);
    auto t1 = make_thermal(1.0);
    for (std::size_t n = 0; n < 20; ++n) {
        CHECK(t1[n] == doctest::Approx(std::ldexp(1.0, -static_cast<int>(n) - 1)).epsilon(1e-11));
    }
    auto t3 = make_thermal(3.0);
    CHECK(std::abs(t3[0] - 0.25) < 1e-12);
    CHECK(t3[1] / t3[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(t3.tail_mass() < 1e-12);
    CHECK_THROWS_AS(make_thermal(-1.0), DomainError);
}

TEST_CASE("custom construction normalizes") {
    auto v = make_custom({1.0, 0.0});
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 0.0);
    auto h = make_custom({0.5, 0.5});
    CHECK(h[0] == 0.5);
    CHECK(h[1] == 0.5);
    auto t = make_custom({2.0, 1.0});
    CHECK(t[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(t[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_custom({0.5, -0.1}), DomainError);
    CHECK_THROWS_AS(make_custom({0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(make_custom({}), DomainError);
}

TEST_CASE("detector efficiency range") {
    CHECK_THROWS_AS(DetectorEfficiency(-0.01), DomainError);
    CHECK_THROWS_AS(DetectorEfficiency(1.01), DomainError);
    CHECK(DetectorEfficiency(0.4).value() == 0.4);
}

TEST_CASE("loss channel") {
    auto s = make_poisson(2.0);
    auto same = apply_loss(s, DetectorEfficiency(1.0));
    for (std::size_t n = 0; n < s.size(); ++n) {
        CHECK(same[n] == s[n]);
    }

    auto single = apply_loss(make_custom({0.0, 1.0}), DetectorEfficiency(0.4));
    CHECK(single[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(single[1] == doctest::Approx(0.4).epsilon(1e-14));

    auto vac = apply_loss(s, DetectorEfficiency(0.0));
    CHECK(vac[0] == 1.0);

    SUBCASE("poisson stays poisson") {
        for (double mu : {0.3, 1.5, 4.0}) {
            for (double eta : {0.1, 0.4, 0.65, 0.9}) {
                auto lossy = apply_loss(make_poisson(mu, {1e-16, 512}), DetectorEfficiency(eta));
                auto closed = make_poisson(eta * mu, {1e-16, 512});
                for (std::size_t n = 0; n < std::max(lossy.size(), closed.size()); ++n) {
                    CHECK(std::abs(lossy[n] - closed[n]) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("loss composes multiplicatively") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_state(rng, 25);
        double e1 = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        double e2 = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        auto twice = apply_loss(apply_loss(s, DetectorEfficiency(e1)), DetectorEfficiency(e2));
        auto once = apply_loss(s, DetectorEfficiency(e1 * e2));
        CHECK(std::abs(sum(twice) - 1.0) <= 1e-12);
        for (std::size_t n = 0; n < s.size(); ++n) {
            CHECK(std::abs(twice[n] - once[n]) <= 1e-12);
        }
    }
}

TEST_CASE("normally ordered moments scale as eta^k under loss") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_state(rng, 20);
        double eta = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        auto lossy = apply_loss(s, DetectorEfficiency(eta));
        for (int k = 1; k <= 3; ++k) {
            double expect = std::pow(eta, k) * factorial_moment(s, k);
            CHECK(std::abs(factorial_moment(lossy, k) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("photon moments") {
    auto t = make_thermal(1.0, {1e-16, 512});
    auto m = photon_moments(t);
    // Direct sums over the same vector as the oracle.
    double mean = 0.0;
    double second = 0.0;
    double fall = 0.0;
    for (std::size_t n = 0; n < t.size(); ++n) {
        mean += n * t[n];
        second += double(n) * n * t[n];
        fall += double(n) * (n - 1.0) * t[n];
    }
    CHECK(m.mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(m.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(m.g2.has_value());
    CHECK(*m.g2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(*m.g2 == doctest::Approx(fall / (mean * mean)).epsilon(1e-14));

    auto pm = photon_moments(make_poisson(0.75, {1e-16, 512}));
    CHECK(pm.variance == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(*pm.g2 == doctest::Approx(1.0).epsilon(1e-12));

    auto vm = photon_moments(make_custom({1.0}));
    CHECK(vm.mean == 0.0);
    CHECK(vm.variance == 0.0);
    CHECK_FALSE(vm.g2.has_value());
}

TEST_CASE("quadrature moments match operator algebra") {
    auto vac = make_custom({1.0});
    CHECK(quadrature_moment(vac, 2) == doctest::Approx(0.5).epsilon(1e-15));
    auto one = make_custom({0.0, 1.0});
    CHECK(quadrature_moment(one, 4) == doctest::Approx(15.0 / 4.0).epsilon(1e-14));
    CHECK(oracle::fock_x_power(1, 4) == doctest::Approx(15.0 / 4.0).epsilon(1e-14));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_state(rng, 15);
        CHECK(quadrature_moment(s, 3) == 0.0);
        for (int k = 2; k <= kMaxQuadratureOrder; k += 2) {
            double expect = 0.0;
            for (std::size_t n = 0; n < s.size(); ++n) {
                expect += s[n] * oracle::fock_x_power(static_cast<int>(n), k);
            }
            CHECK(quadrature_moment(s, k) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    // closed forms
    auto t = make_thermal(2.0, {1e-16, 512});
    CHECK(quadrature_moment(t, 2) == doctest::Approx(2.5).epsilon(1e-11));

    CHECK_THROWS_AS(quadrature_moment(vac, 0), DomainError);
    CHECK_THROWS_AS(quadrature_moment(vac, 9), DomainError);
}

TEST_CASE("excess kurtosis") {
    CHECK(std::abs(excess_kurtosis(make_thermal(0.7, {1e-16, 512}))) < 1e-12);
    CHECK(std::abs(excess_kurtosis(make_thermal(4.0, {1e-16, 512}))) < 1e-12);
    CHECK(excess_kurtosis(make_custom({0.0, 1.0})) == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    CHECK(excess_kurtosis(make_custom({1.0})) == doctest::Approx(0.0));
}

TEST_CASE("kurtosis equals the g2 identity on random states") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = random_state(rng, 20);
        auto m = photon_moments(s);
        if (!m.g2) {
            continue;
        }
        double n = m.mean;
        double identity = 6.0 * n * n / ((2.0 * n + 1.0) * (2.0 * n + 1.0)) * (*m.g2 - 2.0);
        CHECK(std::abs(excess_kurtosis(s) - identity) <= 1e-10);
    }
}

TEST_CASE("hermite functions are normalized and stable for large n") {
    for (int n : {0, 1, 5, 50, 300}) {
        double limit = std::sqrt(2.0 * n + 1.0) + 8.0;
        double norm = oracle::simpson(
            [n](double x) {
                double v = hermite_functions(x, n)[static_cast<std::size_t>(n)];
                return v * v;
            },
            -limit, limit, 20000);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
    }
    // psi_0 underflows at |x| = 40 but psi_1000 does not.
    auto big = hermite_functions(40.0, 1000);
    CHECK(std::isfinite(big[1000]));
    CHECK(big[1000] != 0.0);
    CHECK(big[0] == 0.0);
}

TEST_CASE("hermite function cdfs integrate psi_n^2") {
    for (double x : {-3.0, -0.4, 0.0, 1.1, 2.5}) {
        std::vector<double> cdf(12);
        hermite_function_cdfs(x, cdf);
        for (int n = 0; n < 12; ++n) {
            double expect = oracle::simpson(
                [n](double t) {
                    double v = hermite_functions(t, n)[static_cast<std::size_t>(n)];
                    return v * v;
                },
                -12.0, x, 20000);
            CHECK(cdf[static_cast<std::size_t>(n)] == doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("hermite polynomials") {
    CHECK(hermite_polynomial(0, 0.3L) == 1.0L);
    CHECK(static_cast<double>(hermite_polynomial(2, 1.5L)) == doctest::Approx(4 * 2.25 - 2));
    CHECK(static_cast<double>(hermite_polynomial(4, 0.7L)) ==
          doctest::Approx(16 * std::pow(0.7, 4) - 48 * 0.49 + 12));
}

TEST_CASE("quadrature pdf") {
    auto vac = make_custom({1.0});
    CHECK(quadrature_pdf(vac, 0.0) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));

    std::mt19937_64 rng(5);
    auto s = random_state(rng, 12);
    for (double x : {0.1, 0.9, 2.3}) {
        CHECK(quadrature_pdf(s, x) == doctest::Approx(quadrature_pdf(s, -x)).epsilon(1e-14));
    }

    for (double nbar : {0.3, 1.0, 3.0}) {
        auto t = make_thermal(nbar, {1e-16, 512});
        double var = nbar + 0.5;
        double worst = 0.0;
        for (double x = -10.0; x <= 10.0; x += 0.05) {
            double g = std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
            worst = std::max(worst, std::abs(quadrature_pdf(t, x) - g));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("quadrature pdf integrates to one and reproduces moments") {
    std::mt19937_64 rng(9);
    std::vector<PhotonDistribution> states{make_thermal(1.0), make_poisson(2.0), make_custom({0.0, 1.0})};
    for (int i = 0; i < 5; ++i) {
        states.push_back(random_state(rng, 15));
    }
    for (const auto &s : states) {
        REQUIRE(s.tail_mass() < 1e-10);
        double limit = quadrature_window(s);
        double norm = oracle::simpson([&](double x) { return quadrature_pdf(s, x); }, -limit, limit, 8000);
        CHECK(std::abs(norm - 1.0) < 1e-6);
        for (int k : {2, 4}) {
            double integral = oracle::simpson([&](double x) { return std::pow(x, k) * quadrature_pdf(s, x); },
                                              -limit, limit, 8000);
            CHECK(std::abs(integral - quadrature_moment(s, k)) < 1e-6);
        }
        double cdf_mid = quadrature_cdf(s, 0.0);
        CHECK(cdf_mid == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("fidelity to thermal") {
    CHECK(fidelity_to_thermal(make_thermal(2.0, {1e-16, 512})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_to_thermal(make_custom({1.0})) == 1.0);
    // q_n = 0.5^n / 1.5^(n+1): (sqrt(0.5 * 2/3) + sqrt(0.5 * 2/9))^2
    CHECK(fidelity_to_thermal(make_custom({0.5, 0.5})) == doctest::Approx(0.82934462390419495).epsilon(1e-13));
    double f = fidelity_to_thermal(make_poisson(2.0));
    CHECK(f > 0.0);
    CHECK(f < 1.0);
}

TEST_CASE("statistical distance to gaussian") {
    for (double nbar : {0.0, 0.5, 2.0}) {
        CHECK(statistical_distance_to_gaussian(make_thermal(nbar, {1e-15, 512})) < 1e-6);
    }
    // mpmath reference with root-split quadrature.
    CHECK(std::abs(statistical_distance_to_gaussian(make_custom({0.0, 1.0})) - 0.30085912487307069) < 1e-6);
    for (double mu : {0.05, 0.25, 1.0}) {
        CHECK(statistical_distance_to_gaussian(make_poisson(mu)) >= 0.0);
    }
}

TEST_CASE("trim tail folds dropped mass into tail_mass") {
    auto t = make_thermal(1.0, {1e-16, 512});
    auto trimmed = trim_tail(t, {1e-6, 512});
    CHECK(trimmed.state.size() < t.size());
    CHECK(trimmed.dropped_mass <= 1e-6);
    CHECK(trimmed.state.tail_mass() == doctest::Approx(t.tail_mass() + trimmed.dropped_mass));
    CHECK_FALSE(trimmed.cap_limited);

    auto capped = trim_tail(t, {1e-30, 5});
    CHECK(capped.state.n_max() == 5);
    CHECK(capped.cap_limited);
    CHECK(capped.state.tail_mass() == doctest::Approx(std::ldexp(1.0, -6)).epsilon(1e-10));
    CHECK(std::abs(sum(capped.state) - 1.0) <= 1e-12);
}

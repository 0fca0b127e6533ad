#include <doctest.h>

#include <cmath>
#include <random>

#include "gcme/thermo.hpp"

using namespace gcme;

namespace {

// Geometric closed forms for lambda_m = a*m models: sum_{m>=1} e^{-x m}.
double geom_inf(double x) { return std::exp(-x) / (1.0 - std::exp(-x)); }
double geom_trunc(double x, int max_index) {
    return std::exp(-x) * (1.0 - std::exp(-x * max_index)) /
           (1.0 - std::exp(-x));
}

ModelSpec flat_levels(double beta) {
    // lambda_m = m, N_m = 0
    return ModelSpec::affine(1.0, 0.0, 0.0, 0.0, beta, 0.0);
}

}  // namespace

TEST_CASE("partition function: geometric closed forms") {
    TruncationPolicy trunc{40, 1e-10};

    SUBCASE("beta = ln 2 sums to one") {
        auto pv = partition_function(flat_levels(1.0), std::log(2.0), 0.0, trunc);
        CHECK(pv.value == doctest::Approx(geom_trunc(std::log(2.0), 40)).epsilon(1e-15));
        CHECK(std::abs(pv.value + pv.tail_bound - 1.0) < 1e-12);
    }
    SUBCASE("beta = 1 gives 1/(e-1)") {
        auto pv = partition_function(flat_levels(1.0), 1.0, 0.0, trunc);
        CHECK(pv.value + pv.tail_bound == doctest::Approx(geom_inf(1.0)).epsilon(1e-14));
        CHECK(geom_inf(1.0) == doctest::Approx(0.581977).epsilon(1e-6));
    }
    SUBCASE("particle term shifts the decay rate") {
        auto model = ModelSpec::harmonic(1.0, 0.0);  // lambda_m = N_m = m
        auto pv = partition_function(model, 1.0, -1.0, trunc);
        CHECK(pv.value == doctest::Approx(geom_trunc(2.0, 40)).epsilon(1e-15));
        CHECK(geom_inf(2.0) == doctest::Approx(0.156518).epsilon(1e-6));
    }
}

TEST_CASE("partition function: tail certification") {
    SUBCASE("divergent scale parameters rejected") {
        auto model = ModelSpec::harmonic(1.0, 0.0);
        TruncationPolicy trunc{40, 1e-10};
        CHECK_THROWS_AS(partition_function(model, 1.0, 1.0, trunc),
                        TailNotConverged);
        CHECK_THROWS_AS(partition_function(model, 1.0, 2.0, trunc),
                        TailNotConverged);
    }
    SUBCASE("tail above tolerance rejected") {
        TruncationPolicy tight{5, 1e-12};
        CHECK_THROWS_AS(partition_function(flat_levels(1.0), 1.0, 0.0, tight),
                        TailNotConverged);
    }
    SUBCASE("overclaimed witness growth rejected") {
        auto model = flat_levels(1.0);
        model.witness.growth = 2.0;  // actual increment is 1
        TruncationPolicy trunc{40, 1e-10};
        CHECK_THROWS_AS(partition_function(model, 1.0, 0.0, trunc),
                        TailNotConverged);
    }
    SUBCASE("table models have exactly computable remainders") {
        auto model = ModelSpec::table({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 1.0, 0.0);
        TruncationPolicy trunc{2, 1e-1};
        auto pv = partition_function(model, 1.0, 0.0, trunc);
        CHECK(pv.value == doctest::Approx(std::exp(-1.0) + std::exp(-2.0)));
        CHECK(pv.tail_bound == doctest::Approx(std::exp(-3.0)));
    }
    SUBCASE("invalid scale_beta") {
        TruncationPolicy trunc{10, 1e-6};
        CHECK_THROWS_AS(partition_function(flat_levels(1.0), -1.0, 0.0, trunc),
                        InvalidParams);
    }
}

TEST_CASE("partition function decreases in beta on positive exponents") {
    TruncationPolicy trunc{40, 1e-6};
    auto model = flat_levels(1.0);
    double prev = partition_function(model, 0.5, 0.0, trunc).value;
    for (double b : {0.75, 1.0, 1.5, 2.0, 3.0}) {
        const double cur = partition_function(model, b, 0.0, trunc).value;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("weight sequence") {
    SUBCASE("pure energy weights") {
        auto model = flat_levels(1.0);
        auto w = weight_sequence(model, {3, 1e-6});
        CHECK(w[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
        CHECK(w[2] == doctest::Approx(std::exp(3.0)).epsilon(1e-15));
    }
    SUBCASE("mu = 1 cancels the harmonic exponent") {
        auto model = ModelSpec::harmonic(1.0, 1.0);
        for (double w : weight_sequence(model, {10, 1e-6}))
            CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("N_m = 2m at beta=2, mu=1") {
        auto model = ModelSpec::affine(1.0, 0.0, 2.0, 0.0, 2.0, 1.0);
        auto w = weight_sequence(model, {2, 1e-6});
        CHECK(w[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
    }
    SUBCASE("overflow cap") {
        auto model = flat_levels(10.0);
        CHECK_THROWS_AS(weight_sequence(model, {100, 1e-6}), OverflowRisk);
    }
}

TEST_CASE("equilibrium distribution") {
    SUBCASE("beta = ln 2: truncated dyadic probabilities") {
        const int max_index = 12;
        auto p = equilibrium_distribution(flat_levels(std::log(2.0)),
                                          {max_index, 1e-1});
        const double norm = 1.0 - std::pow(2.0, -max_index);
        for (int m = 1; m <= max_index; ++m)
            CHECK(p.coords[m - 1] ==
                  doctest::Approx(std::pow(2.0, -m) / norm).epsilon(1e-14));
    }
    SUBCASE("beta = 1, M = 60 ground state") {
        auto p = equilibrium_distribution(flat_levels(1.0), {60, 1e-10});
        CHECK(p.coords[0] ==
              doctest::Approx(std::exp(-1.0) / geom_trunc(1.0, 60)).epsilon(1e-14));
        // e^{-1} (e - 1) = 1 - e^{-1}
        CHECK(p.coords[0] == doctest::Approx(0.632121).epsilon(1e-5));
    }
    SUBCASE("positivity and exact normalization") {
        auto p = equilibrium_distribution(ModelSpec::harmonic(1.3, -0.4),
                                          {50, 1e-8});
        double sum = 0.0;
        for (double c : p.coords) {
            CHECK(c > 0.0);
            sum += c;
        }
        CHECK(std::abs(sum - 1.0) < 1e-14);
    }
    SUBCASE("w_m p_m is constant at the inverse closed partition sum") {
        auto model = ModelSpec::harmonic(0.7, 0.3);
        TruncationPolicy trunc{40, 1e-6};
        auto p = equilibrium_distribution(model, trunc);
        const double theta =
            partition_sum_closed(model, model.beta(), model.mu(), 40);
        for (int m = 0; m < 40; ++m)
            CHECK(p.weights[m] * p.coords[m] ==
                  doctest::Approx(1.0 / theta).epsilon(1e-12));
    }
}

TEST_CASE("weighted inner product") {
    auto model = flat_levels(1.0);
    TruncationPolicy trunc{8, 1e-2};
    auto w = weight_sequence(model, trunc);

    SUBCASE("unit vectors f_m are orthonormal") {
        WeightedVector f1{{0, 0, 0, 0, 0, 0, 0, 0}, w};
        WeightedVector f3 = f1;
        f1.coords[0] = 1.0 / std::sqrt(w[0]);
        f3.coords[2] = 1.0 / std::sqrt(w[2]);
        CHECK(weighted_inner_product(f1, f1) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(weighted_inner_product(f1, f3) == 0.0);
    }
    SUBCASE("equilibrium squared norm is the inverse partition sum") {
        TruncationPolicy big{60, 1e-10};
        auto p = equilibrium_distribution(model, big);
        const double z_inf = geom_inf(1.0);
        CHECK(weighted_inner_product(p, p) ==
              doctest::Approx(1.0 / z_inf).epsilon(1e-12));
    }
    SUBCASE("bilinearity and symmetry on random vectors") {
        std::mt19937_64 rng(271828);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int round = 0; round < 20; ++round) {
            WeightedVector p{{}, w}, q{{}, w}, r{{}, w};
            for (int m = 0; m < 8; ++m) {
                p.coords.push_back(dist(rng));
                q.coords.push_back(dist(rng));
                r.coords.push_back(dist(rng));
            }
            const double alpha = dist(rng);
            WeightedVector combo{{}, w};
            for (int m = 0; m < 8; ++m)
                combo.coords.push_back(alpha * p.coords[m] + q.coords[m]);
            const double lhs = weighted_inner_product(combo, r);
            const double rhs = alpha * weighted_inner_product(p, r) +
                               weighted_inner_product(q, r);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
            CHECK(weighted_inner_product(p, q) ==
                  doctest::Approx(weighted_inner_product(q, p)).epsilon(1e-14));
        }
    }
    SUBCASE("mismatched weights rejected") {
        WeightedVector p{{1, 0, 0, 0, 0, 0, 0, 0}, w};
        auto w2 = w;
        w2[3] *= 2.0;
        WeightedVector q{{1, 0, 0, 0, 0, 0, 0, 0}, w2};
        CHECK_THROWS_AS(weighted_inner_product(p, q), DimensionMismatch);
    }
}

TEST_CASE("model validation") {
    SUBCASE("beta must be positive") {
        auto model = ModelSpec::harmonic(-1.0, 0.0);
        CHECK_THROWS_AS(model.validate({10, 1e-6}), InvalidParams);
    }
    SUBCASE("particle counts must be non-negative integers") {
        auto frac = ModelSpec::affine(1.0, 0.0, 0.5, 0.0, 1.0, 0.0);
        CHECK_THROWS_AS(frac.validate({4, 1e-6}), InvalidParams);
        auto neg = ModelSpec::table({1.0, 2.0}, {0.0, -1.0}, 1.0, 0.0);
        CHECK_THROWS_AS(neg.validate({2, 1e-6}), InvalidParams);
    }
    SUBCASE("table shorter than truncation rejected") {
        auto model = ModelSpec::table({1.0, 2.0}, {0.0, 0.0}, 1.0, 0.0);
        CHECK_THROWS_AS(model.validate({5, 1e-6}), InvalidParams);
    }
}

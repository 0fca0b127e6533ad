#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gcme/spectral.hpp"

using namespace gcme;

namespace {

double geom_inf(double x) { return std::exp(-x) / (1.0 - std::exp(-x)); }

ModelSpec hand_model() {
    return ModelSpec::table({1.0, 2.0}, {0.0, 0.0}, 1.0, 0.0);
}
const TruncationPolicy kHandTrunc{2, 1e-1};
const double kHandNu2 = -(std::exp(-2.5) + std::exp(-3.5));

double overlap(const SpectralDecomposition& a, const SpectralDecomposition& b,
               int k) {
    double acc = 0.0;
    for (int m = 0; m < a.size; ++m)
        acc += a.weights[m] * a.eigenvectors[k][m] * b.eigenvectors[k][m];
    return acc;
}

}  // namespace

TEST_CASE("b-sequence") {
    SUBCASE("dyadic closed form") {
        auto model = ModelSpec::affine(1.0, 0.0, 0.0, 0.0, 2.0 * std::log(2.0), 0.0);
        auto b = b_sequence(model, {40, 1e-8});
        CHECK(b.theta == doctest::Approx(1.0 / 7.0).epsilon(1e-13));
        CHECK(b.values[0] == doctest::Approx(1.0 / 14.0).epsilon(1e-13));
        for (int m = 0; m < 6; ++m)
            CHECK(b.values[m] == doctest::Approx((1.0 / 7.0) * std::pow(2.0, -(m + 1)))
                                     .epsilon(1e-12));
    }
    SUBCASE("harmonic ratio is constant") {
        auto b = b_sequence(ModelSpec::harmonic(1.3, 0.0), {30, 1e-6});
        for (std::size_t m = 0; m + 1 < b.values.size(); ++m)
            CHECK(b.values[m + 1] / b.values[m] ==
                  doctest::Approx(std::exp(-0.65)).epsilon(1e-13));
    }
    SUBCASE("mu = 0 reduction matches the canonical form") {
        auto model = ModelSpec::table({0.5, 1.1, 2.7}, {3.0, 1.0, 0.0}, 0.9, 0.0);
        auto b = b_sequence(model, {3, 1e-1});
        const double z = partition_sum_closed(model, 1.35, 0.0, 3);
        for (int m = 1; m <= 3; ++m)
            CHECK(b.values[m - 1] ==
                  doctest::Approx(z * std::exp(-0.45 * model.level_energy(m)))
                      .epsilon(1e-13));
    }
    SUBCASE("open variant carries the Theta tail") {
        auto closed = b_sequence(ModelSpec::harmonic(1.0, 0.0), {40, 1e-8},
                                 BSequence::Variant::Closed);
        auto open = b_sequence(ModelSpec::harmonic(1.0, 0.0), {40, 1e-8},
                               BSequence::Variant::Open);
        CHECK(closed.theta_tail == 0.0);
        CHECK(open.theta_tail > 0.0);
        CHECK(std::abs(open.theta + open.theta_tail - geom_inf(1.5)) <= 1e-15);
    }
}

TEST_CASE("spectral condition") {
    SUBCASE("harmonic passes") {
        CHECK(verify_spectral_condition(ModelSpec::harmonic(1.0, 0.0), {20, 1e-6}).pass);
    }
    SUBCASE("repeated level fails at m = 1") {
        auto rep = verify_spectral_condition(
            ModelSpec::table({1.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, 1.0, 0.0), {3, 1e-1});
        CHECK_FALSE(rep.pass);
        CHECK(rep.first_violation == 1);
    }
    SUBCASE("mu = -1 harmonic fails (1 > 3 is false)") {
        auto rep = verify_spectral_condition(ModelSpec::harmonic(1.0, -1.0), {10, 1e10});
        CHECK_FALSE(rep.pass);
        CHECK(rep.first_violation == 1);
    }
    SUBCASE("equivalent to strict b decrease") {
        for (auto model : {ModelSpec::harmonic(0.8, 0.5), ModelSpec::harmonic(1.0, 1.0)}) {
            TruncationPolicy trunc{15, 1e10};
            auto rep = verify_spectral_condition(model, trunc);
            auto b = b_sequence(model, trunc);
            bool decreasing = true;
            for (std::size_t m = 0; m + 1 < b.values.size(); ++m)
                decreasing = decreasing && b.values[m + 1] < b.values[m];
            CHECK(rep.pass == decreasing);
        }
    }
}

TEST_CASE("secular function") {
    auto model = hand_model();
    SUBCASE("tends to zero from below at -infinity") {
        const double far = secular_value(-1e8, model, kHandTrunc);
        CHECK(far < 0.0);
        CHECK(std::abs(far) < 1e-8);
    }
    SUBCASE("pole-side signs") {
        auto b = b_sequence(model, kHandTrunc);
        const double eps = 1e-10 * b.values[1];
        CHECK(secular_value(-b.values[0] + eps, model, kHandTrunc) > 1.0);
        CHECK(secular_value(-b.values[1] - eps, model, kHandTrunc) < 1.0);
    }
    SUBCASE("equals one at the two-level eigenvalue") {
        CHECK(secular_value(kHandNu2, model, kHandTrunc) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("pole collision raises") {
        auto b = b_sequence(model, kHandTrunc);
        CHECK_THROWS_AS(secular_value(-b.values[0], model, kHandTrunc), PoleHit);
    }
    SUBCASE("strictly decreasing between poles") {
        auto big = ModelSpec::harmonic(1.0, 0.0);
        TruncationPolicy trunc{10, 1e-2};
        auto b = b_sequence(big, trunc);
        for (int k = 2; k <= 10; ++k) {
            const double left = -b.values[k - 2], right = -b.values[k - 1];
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 1; i <= 100; ++i) {
                const double nu =
                    left + (right - left) * (i / 101.0);
                const double val = secular_value(nu, big, trunc);
                CHECK(val < prev);
                prev = val;
            }
        }
    }
}

TEST_CASE("two-level eigensolve") {
    auto model = hand_model();
    SUBCASE("secular eigenvalues") {
        auto nu = solve_eigenvalues(model, kHandTrunc);
        REQUIRE(nu.size() == 2);
        CHECK(nu[0] == 0.0);
        CHECK(nu[1] == doctest::Approx(kHandNu2).epsilon(1e-14));
        CHECK(kHandNu2 == doctest::Approx(-0.112282).epsilon(1e-5));
    }
    SUBCASE("dense oracle agrees") {
        auto g = build_generator(model, kHandTrunc);
        auto dec = dense_eig_oracle(symmetrize(g), g.weights);
        CHECK(std::abs(dec.eigenvalues[0]) < 1e-16);
        CHECK(dec.eigenvalues[1] == doctest::Approx(kHandNu2).epsilon(1e-14));
    }
    SUBCASE("eigenvector components match the closed form and the oracle") {
        auto dec = solve_secular(model, kHandTrunc);
        auto b = b_sequence(model, kHandTrunc);
        const double u1 = std::exp(-1.5), u2 = std::exp(-3.0);
        double p1 = u1 / (kHandNu2 + b.values[0]);
        double p2 = u2 / (kHandNu2 + b.values[1]);
        const double norm = std::sqrt(std::exp(1.0) * p1 * p1 + std::exp(2.0) * p2 * p2);
        p1 /= norm;
        p2 /= norm;
        // orientation: dominant weighted component positive
        const double marker =
            std::abs(std::exp(0.5) * p1) >= std::abs(std::exp(1.0) * p2) ? p1 : p2;
        if (marker < 0) {
            p1 = -p1;
            p2 = -p2;
        }
        CHECK(dec.eigenvectors[1][0] == doctest::Approx(p1).epsilon(1e-12));
        CHECK(dec.eigenvectors[1][1] == doctest::Approx(p2).epsilon(1e-12));

        auto g = build_generator(model, kHandTrunc);
        auto dense = dense_eig_oracle(symmetrize(g), g.weights);
        CHECK(dense.eigenvectors[1][0] == doctest::Approx(p1).epsilon(1e-10));
        CHECK(dense.eigenvectors[1][1] == doctest::Approx(p2).epsilon(1e-10));
    }
}

TEST_CASE("secular pipeline on the harmonic model") {
    auto model = ModelSpec::harmonic(1.0, 0.0);
    TruncationPolicy trunc{60, 1e-9};
    auto dec = solve_secular(model, trunc);
    auto b = b_sequence(model, trunc);
    REQUIRE(dec.size == 60);
    REQUIRE(dec.method == SpectralDecomposition::Method::Secular);

    SUBCASE("zero mode is the scaled equilibrium") {
        CHECK(dec.eigenvalues[0] == 0.0);
        const double theta = partition_sum_closed(model, 1.0, 0.0, 60);
        double comp_sum = 0.0;
        for (double c : dec.eigenvectors[0]) comp_sum += c;
        CHECK(comp_sum == doctest::Approx(std::sqrt(theta)).epsilon(1e-13));
    }
    SUBCASE("strict localization and ascending order") {
        for (const auto& root : dec.roots) {
            const double width = b.values[root.k - 2] - b.values[root.k - 1];
            CHECK(root.offset > 0.0);
            CHECK(root.offset < width);
        }
        for (int k = 2; k < dec.size; ++k)
            CHECK(dec.eigenvalues[k - 1] < dec.eigenvalues[k]);
        CHECK(dec.eigenvalues.back() < 0.0);
    }
    SUBCASE("excited modes have zero component sum") {
        for (int k = 2; k <= dec.size; ++k) {
            double acc = 0.0;
            for (double c : dec.eigenvectors[k - 1]) acc += c;
            CHECK(std::abs(acc) <= 1e-10);
        }
    }
    SUBCASE("weighted orthonormality") {
        for (int j = 1; j <= dec.size; ++j) {
            for (int k = j; k <= dec.size; ++k) {
                double acc = 0.0;
                for (int m = 0; m < dec.size; ++m)
                    acc += dec.weights[m] * dec.eigenvectors[j - 1][m] *
                           dec.eigenvectors[k - 1][m];
                CHECK(std::abs(acc - (j == k ? 1.0 : 0.0)) <= 1e-10);
            }
        }
    }
    SUBCASE("eigen-residuals") {
        const double scale = std::abs(dec.eigenvalues[1]);
        for (double r : dec.residuals) CHECK(r <= 1e-9 * scale);
    }
    SUBCASE("completeness in the orthonormal-basis representation") {
        std::vector<std::vector<double>> z(static_cast<std::size_t>(dec.size));
        for (int k = 0; k < dec.size; ++k) {
            z[k].resize(dec.size);
            for (int m = 0; m < dec.size; ++m)
                z[k][m] = std::sqrt(dec.weights[m]) * dec.eigenvectors[k][m];
        }
        for (int m = 0; m < dec.size; ++m) {
            for (int n = m; n < dec.size; ++n) {
                double acc = 0.0;
                for (int k = 0; k < dec.size; ++k) acc += z[k][m] * z[k][n];
                CHECK(std::abs(acc - (m == n ? 1.0 : 0.0)) <= 1e-8);
            }
        }
    }
    SUBCASE("method agreement with the dense oracle") {
        auto g = build_generator(model, trunc);
        auto dense = dense_eig_oracle(symmetrize(g), g.weights);
        const double scale = std::abs(dec.eigenvalues[1]);
        for (int k = 0; k < dec.size; ++k)
            CHECK(std::abs(dec.eigenvalues[k] - dense.eigenvalues[k]) <=
                  1e-8 * scale);
        for (int k = 0; k < dec.size; ++k)
            CHECK(overlap(dec, dense, k) >= 1.0 - 1e-8);
    }
}

TEST_CASE("secular bracketing signs near the poles") {
    auto model = ModelSpec::harmonic(1.0, 0.0);
    TruncationPolicy trunc{25, 1e-6};
    auto b = b_sequence(model, trunc);
    auto dec = solve_secular(model, trunc);
    constexpr double ulp_guard = 64.0 * std::numeric_limits<double>::epsilon();
    for (const auto& root : dec.roots) {
        const int k = root.k;
        const double bl = b.values[k - 2], br = b.values[k - 1];
        // a - 1 is positive between the left pole and the root, negative
        // between the root and the right pole. Under closed truncation the
        // root hugs one pole, so the probe on that side must stay inside the
        // root's offset; on the far side any small inward offset works.
        const double far_eps = std::max(1e-8 * b.values.back(), 1e-13 * bl);
        const double near_eps = 0.5 * root.offset;
        const double left_eps = root.anchored_right ? far_eps : near_eps;
        const double right_eps = root.anchored_right ? near_eps : far_eps;
        if (left_eps > ulp_guard * bl)
            CHECK(secular_value(-bl + left_eps, model, trunc) > 1.0);
        if (right_eps > ulp_guard * br)
            CHECK(secular_value(-br - right_eps, model, trunc) < 1.0);
    }
}

TEST_CASE("spectral condition gates the secular solver") {
    CHECK_THROWS_AS(solve_eigenvalues(ModelSpec::harmonic(1.0, -1.0), {10, 1e10}),
                    SpectralConditionViolated);
}

TEST_CASE("near-degenerate poles fall back to the dense oracle") {
    auto model = ModelSpec::table({1.0, 1.0 + 1e-12, 2.0}, {0.0, 0.0, 0.0}, 1.0, 0.0);
    auto dec = solve_secular(model, {3, 1e-1});
    CHECK(dec.method == SpectralDecomposition::Method::Dense);
    REQUIRE(!dec.warnings.empty());
}

TEST_CASE("spectral trace check") {
    SUBCASE("two-level identity") {
        auto g = build_generator(hand_model(), kHandTrunc);
        auto dec = solve_secular(hand_model(), kHandTrunc);
        auto chk = spectral_trace_check(dec, g);
        CHECK(chk.pass);
        CHECK(chk.sum_eigs == doctest::Approx(kHandNu2).epsilon(1e-14));
    }
    SUBCASE("harmonic M = 60 against the closed form") {
        auto model = ModelSpec::harmonic(1.0, 0.0);
        TruncationPolicy trunc{60, 1e-9};
        auto g = build_generator(model, trunc);
        auto dec = solve_secular(model, trunc);
        auto chk = spectral_trace_check(dec, g);
        CHECK(chk.pass);
        auto closed = closed_form_trace(model, trunc);
        CHECK(std::abs(chk.sum_eigs - closed.value) <=
              closed.tail_bound + closed.fp_allowance + 1e-9 * std::abs(closed.value));
    }
}

TEST_CASE("gap profile") {
    auto model = ModelSpec::harmonic(1.0, 0.0);
    TruncationPolicy trunc{30, 1e-6};
    auto dec = solve_secular(model, trunc);
    auto b = b_sequence(model, trunc);
    auto prof = gap_profile(dec, b);
    REQUIRE(prof.magnitudes.size() == 29);
    SUBCASE("magnitudes decrease and respect localization") {
        for (std::size_t i = 0; i + 1 < prof.magnitudes.size(); ++i)
            CHECK(prof.magnitudes[i] >= prof.magnitudes[i + 1]);
        for (int k = 2; k <= dec.size; ++k)
            CHECK(prof.magnitudes[k - 2] < b.values[k - 2]);
        CHECK(prof.no_spectral_gap);
    }
    SUBCASE("smallest magnitude shrinks when the truncation doubles") {
        CHECK(gap_vanishes_with_truncation(model, trunc));
    }
    SUBCASE("two-level magnitude") {
        auto prof2 = gap_profile(solve_secular(hand_model(), kHandTrunc),
                                 b_sequence(hand_model(), kHandTrunc));
        REQUIRE(prof2.magnitudes.size() == 1);
        CHECK(prof2.magnitudes[0] == doctest::Approx(0.112282).epsilon(1e-5));
    }
}

TEST_CASE("public eigenvector op") {
    auto model = hand_model();
    SUBCASE("zero eigenvalue gives the equilibrium direction") {
        auto q1 = eigenvector(0.0, model, kHandTrunc);
        const double theta = std::exp(-1.0) + std::exp(-2.0);
        CHECK(q1.coords[0] ==
              doctest::Approx(std::exp(-1.0) / std::sqrt(theta)).epsilon(1e-14));
        CHECK(q1.coords[1] ==
              doctest::Approx(std::exp(-2.0) / std::sqrt(theta)).epsilon(1e-14));
    }
    SUBCASE("unit weighted norm") {
        auto q2 = eigenvector(kHandNu2, model, kHandTrunc);
        CHECK(weighted_norm(q2) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("degenerate denominator raises") {
        auto b = b_sequence(model, kHandTrunc);
        CHECK_THROWS_AS(eigenvector(-b.values[1], model, kHandTrunc),
                        DegenerateDenominator);
    }
}

TEST_CASE("single-state truncation is stationary") {
    auto model = ModelSpec::harmonic(1.0, 0.0);
    auto dec = solve_secular(model, {1, 1e10});
    REQUIRE(dec.size == 1);
    CHECK(dec.eigenvalues[0] == 0.0);
    CHECK(dec.eigenvectors[0][0] ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));  // e^{-beta}/sqrt(e^{-beta})
}

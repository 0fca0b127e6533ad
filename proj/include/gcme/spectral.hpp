#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcme/generator.hpp"
#include "gcme/thermo.hpp"

namespace gcme {

// b_m = Theta_{3b/2,-mu/3} * exp[-(beta/2)(lambda_m + 3*mu*N_m)].
// The negated values are the poles of the secular function; eigenvalue k
// lives between -b_{k-1} and -b_k. The closed variant uses the truncated
// Theta factor and makes the finite-matrix secular equation exact; the open
// variant carries the certified tail of the infinite factor and serves as
// the infinite-truncation reference.
struct BSequence {
    enum class Variant { Closed, Open };

    std::vector<double> values;  // b_m, m = 1..M
    Variant variant = Variant::Closed;
    double theta = 0.0;       // Theta_{3b/2,-mu/3} as summed
    double theta_tail = 0.0;  // 0 for closed; certified tail for open
};

BSequence b_sequence(const ModelSpec& model, const TruncationPolicy& trunc,
                     BSequence::Variant variant = BSequence::Variant::Closed);

struct SpectralConditionReport {
    bool pass = false;
    std::optional<int> first_violation;  // smallest m violating the condition
};

// lambda_{m+1} - lambda_m > 3*mu*(N_m - N_{m+1}) for every m < M; equivalent
// to the strict decrease of the b-sequence.
SpectralConditionReport verify_spectral_condition(const ModelSpec& model,
                                                  const TruncationPolicy& trunc);

// a(nu) = sum_m exp[-2*beta*(lambda_m + mu*N_m)] / (nu + b_m) with the closed
// b-sequence; the nonzero eigenvalues are exactly the solutions of a(nu) = 1.
double secular_value(double nu, const ModelSpec& model,
                     const TruncationPolicy& trunc);

// Root of the secular equation, kept as an exact offset from the pole it was
// bracketed against. For large k the offset is many orders of magnitude
// below one ulp of the pole itself, so the shifted representation is the
// only way to keep the eigenvector denominators meaningful.
struct SecularRoot {
    int k = 0;                   // 2..M
    double nu = 0.0;             // -(b_anchor + offset), rounded to double
    bool anchored_right = true;  // anchored at -b_k; otherwise at -b_{k-1}
    double offset = 0.0;         // distance from the anchoring pole, > 0
    double residual = 0.0;       // |a(nu) - 1| at the accepted root
};

// Nonzero spectrum via bracketed bisection/regula falsi in each localization
// interval. Returns [0, nu_2, ..., nu_M] with the nonzero part strictly
// increasing toward zero.
std::vector<double> solve_eigenvalues(const ModelSpec& model,
                                      const TruncationPolicy& trunc,
                                      double tol_root = 1e-13);

// Normalized eigenvector from the closed-form components
// p_m = exp[-(beta/2)(3*lambda_m + mu*N_m)] / (nu_k + b_m).
// nu_k = 0 returns the normalized equilibrium direction.
WeightedVector eigenvector(double nu_k, const ModelSpec& model,
                           const TruncationPolicy& trunc);

struct SpectralDecomposition {
    enum class Method { Secular, Dense };

    int size = 0;
    // eigenvalues[0] = 0; eigenvalues[1..M-1] = nu_2 < ... < nu_M < 0.
    std::vector<double> eigenvalues;
    // Weighted-orthonormal eigenvectors, first nonzero component positive.
    std::vector<std::vector<double>> eigenvectors;
    std::vector<double> weights;
    std::vector<double> residuals;  // ||A q_k - nu_k q_k||_{2,w}
    Method method = Method::Secular;
    std::vector<SecularRoot> roots;  // secular method only
    std::vector<std::string> warnings;

    WeightedVector vec(int k) const;  // k = 1..M
};

// Full decomposition through the secular characterization. Falls back to the
// dense oracle (with a warning) when consecutive b_m are too close for the
// brackets to be meaningful.
SpectralDecomposition solve_secular(const ModelSpec& model,
                                    const TruncationPolicy& trunc,
                                    double tol_root = 1e-13);

// Independent cross-check: dense symmetric eigensolver on D A D^{-1},
// eigenvectors mapped back to the weighted space via D^{-1}.
SpectralDecomposition dense_eig_oracle(const SymmetricGenerator& s,
                                       const std::vector<double>& weights);

struct TraceCheck {
    double sum_eigs = 0.0;
    double matrix_trace = 0.0;
    bool pass = false;
};

// Finite-matrix Lidskii identity: the spectral trace equals the matrix trace.
TraceCheck spectral_trace_check(const SpectralDecomposition& dec,
                                const GeneratorMatrix& g);

struct GapProfile {
    std::vector<double> magnitudes;  // |nu_2| >= ... >= |nu_M|
    bool no_spectral_gap = false;    // |nu_M| <= b_{M-1}
};

GapProfile gap_profile(const SpectralDecomposition& dec, const BSequence& b);

// Trend check across truncation levels M and 2M: the smallest nonzero
// magnitude keeps shrinking, exhibiting the absence of a spectral gap.
bool gap_vanishes_with_truncation(const ModelSpec& model,
                                  const TruncationPolicy& trunc,
                                  double tol_root = 1e-13);

}  // namespace gcme

#pragma once

#include <vector>

#include "gcme/evolution.hpp"
#include "gcme/spectral.hpp"

namespace gcme {

// Prescribed Fourier-coefficient decay for the harmonic-oscillator model
// (lambda_m = m, mu = 0):
//   exponential: |c_k|^2 = kappa * e^{-delta k}   (delta > 0)
//   power:       |c_k|^2 = kappa * k^{-delta}     (delta > 1)
// Coefficients are set at the bound, with alternating signs.
struct DecaySpec {
    enum class Law { Exponential, Power };

    Law law = Law::Exponential;
    double kappa = 1.0;
    double delta = 2.0;
    double beta = 1.0;

    void validate() const;
};

struct SynthesisResult {
    InitialData data;
    std::vector<double> prescribed;  // c_k, k = 2..M, signed
    std::vector<double> achieved;    // shrink * c_k
    double shrink = 1.0;
};

// Initial datum with Fourier coefficients saturating the decay hypothesis,
// made non-negative by the uniform positivity shrink. Throws ShrinkTooSevere
// when positivity forces the coefficients below 1e-6 of the prescription.
SynthesisResult synthesize_initial(const SpectralDecomposition& dec,
                                   const DecaySpec& spec);

struct EnvelopeReport {
    DecaySpec::Law law = DecaySpec::Law::Exponential;
    std::vector<double> compensated;  // error(tau) * g(tau) on the usable grid
    double sup_value = 0.0;
    double median_value = 0.0;
    double slope = 0.0;  // log error vs log tau (exp law) or log ln tau (power law)
    double intercept = 0.0;
    double slope_early = 0.0;
    double slope_late = 0.0;
    bool non_power_flag = false;  // decay visibly faster than any power
    bool pass = false;            // sup finite and <= 10x median
    int usable_points = 0;
};

// Least-squares envelope fit in the decay coordinates of the law, restricted
// to grid points with error above the 1e-280 underflow floor.
EnvelopeReport fit_envelope(const std::vector<double>& errors,
                            const std::vector<double>& times,
                            DecaySpec::Law law, double beta, double delta);

struct DecayExperiment {
    SynthesisResult synthesis;
    TrajectoryRecord trajectory;  // times/errors/fourier; states omitted
    EnvelopeReport envelope;
};

// Full experiment: synthesize the datum, evaluate error(tau) through the
// Fourier-sum formula over the grid, fit and judge the envelope. The grid
// must be geometric-like spanning at least [1e2, 1e8] (exponential law) or
// [1e2, 1e12] (power law).
DecayExperiment run_decay_experiment(const SpectralDecomposition& dec,
                                     const DecaySpec& spec,
                                     const std::vector<double>& tau_grid);

// Geometric grid helper: n points from tau_min to tau_max inclusive.
std::vector<double> geometric_grid(double tau_min, double tau_max, int n);

}  // namespace gcme

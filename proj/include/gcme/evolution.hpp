#pragma once

#include <vector>

#include "gcme/generator.hpp"
#include "gcme/spectral.hpp"
#include "gcme/thermo.hpp"

namespace gcme {

// Probability vector over the truncated levels.
struct InitialData {
    std::vector<double> coords;

    // p_m >= 0 and sum within 1e-13 of one.
    void validate() const;
};

InitialData delta_initial(int m, int size);
InitialData uniform_initial(int size);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> errors;   // ||p(tau) - p_eq||_{2,w}
    std::vector<double> fourier;  // c_k = <p*, q_k>_{2,w}, k = 1..M
};

// Equilibrium distribution recovered from the zero mode of a decomposition:
// p_eq = q_1 / sum(q_1).
std::vector<double> equilibrium_from(const SpectralDecomposition& dec);

std::vector<double> fourier_coefficients(const SpectralDecomposition& dec,
                                         const std::vector<double>& p);

// exp[tau A] p = sum_k c_k e^{tau nu_k} q_k.
std::vector<double> propagate_spectral(const SpectralDecomposition& dec,
                                       const InitialData& init, double tau);

// Independent oracle: classical fixed-step RK4 on dp/dtau = A p.
// Requires step <= 0.1 / max_m |a_{m,m}|.
std::vector<double> propagate_ode(const GeneratorMatrix& g,
                                  const InitialData& init, double tau,
                                  double step);

// ||p - p_eq||_{2,w}; p must carry the model weights.
double equilibrium_error(const WeightedVector& p, const ModelSpec& model,
                         const TruncationPolicy& trunc);

// Fourier-side distance: sqrt(sum_{k>=2} c_k^2 e^{2 tau nu_k}).
double fourier_error(const SpectralDecomposition& dec,
                     const std::vector<double>& coeffs, double tau);

struct SubspaceInitial {
    InitialData data;
    double shrink = 1.0;  // applied coefficient scale in (0, 1]
};

// p* = p_eq + sum_{k=2..N} c_k q_k, rescaled toward equilibrium by the
// largest s in (0,1] keeping every component non-negative. Sums to one
// automatically by the zero-sum property of the excited modes.
SubspaceInitial truncated_subspace_initial(const SpectralDecomposition& dec,
                                           int n_modes,
                                           const std::vector<double>& coeffs);

TrajectoryRecord run_trajectory(const SpectralDecomposition& dec,
                                const InitialData& init,
                                const std::vector<double>& tau_grid);

struct DecayBoundReport {
    double max_ratio = 0.0;
    bool pass = false;
};

// error(tau) <= e^{-tau |nu_N|} ||p*||_{2,w} along the trajectory.
DecayBoundReport decay_bound_check(const TrajectoryRecord& traj, double nu_n,
                                   double pstar_norm);

}  // namespace gcme

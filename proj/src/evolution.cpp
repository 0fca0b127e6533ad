#include "gcme/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gcme {

void InitialData::validate() const {
    double sum = 0.0;
    for (double p : coords) {
        if (!(p >= 0.0))
            throw InvalidParams("InitialData: negative component");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-13)
        throw InvalidParams("InitialData: components sum to " +
                            std::to_string(sum));
}

InitialData delta_initial(int m, int size) {
    if (m < 1 || m > size) throw IndexOutOfRange("delta_initial: bad index");
    InitialData d;
    d.coords.assign(static_cast<std::size_t>(size), 0.0);
    d.coords[static_cast<std::size_t>(m) - 1] = 1.0;
    return d;
}

InitialData uniform_initial(int size) {
    if (size < 1) throw InvalidParams("uniform_initial: empty");
    InitialData d;
    d.coords.assign(static_cast<std::size_t>(size),
                    1.0 / static_cast<double>(size));
    return d;
}

std::vector<double> equilibrium_from(const SpectralDecomposition& dec) {
    const auto& q1 = dec.eigenvectors.at(0);
    double total = 0.0;
    for (double c : q1) total += c;
    std::vector<double> p(q1.size());
    for (std::size_t m = 0; m < q1.size(); ++m) p[m] = q1[m] / total;
    return p;
}

std::vector<double> fourier_coefficients(const SpectralDecomposition& dec,
                                         const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != dec.size)
        throw DimensionMismatch("fourier_coefficients: size mismatch");
    std::vector<double> c(static_cast<std::size_t>(dec.size));
    for (int k = 0; k < dec.size; ++k) {
        double acc = 0.0;
        const auto& q = dec.eigenvectors[static_cast<std::size_t>(k)];
        for (int m = 0; m < dec.size; ++m)
            acc += dec.weights[m] * p[m] * q[m];
        c[static_cast<std::size_t>(k)] = acc;
    }
    return c;
}

std::vector<double> propagate_spectral(const SpectralDecomposition& dec,
                                       const InitialData& init, double tau) {
    if (!(tau >= 0.0)) throw InvalidParams("propagate_spectral: tau < 0");
    init.validate();
    const auto c = fourier_coefficients(dec, init.coords);
    std::vector<double> out(static_cast<std::size_t>(dec.size), 0.0);
    for (int k = 0; k < dec.size; ++k) {
        const double amp = c[k] * std::exp(tau * dec.eigenvalues[k]);
        if (amp == 0.0) continue;
        const auto& q = dec.eigenvectors[static_cast<std::size_t>(k)];
        for (int m = 0; m < dec.size; ++m) out[m] += amp * q[m];
    }
    return out;
}

std::vector<double> propagate_ode(const GeneratorMatrix& g,
                                  const InitialData& init, double tau,
                                  double step) {
    if (!(tau >= 0.0)) throw InvalidParams("propagate_ode: tau < 0");
    if (!(step > 0.0)) throw InvalidParams("propagate_ode: step must be > 0");
    init.validate();
    if (static_cast<int>(init.coords.size()) != g.size)
        throw DimensionMismatch("propagate_ode: size mismatch");

    double max_diag = 0.0;
    for (int m = 1; m <= g.size; ++m)
        max_diag = std::max(max_diag, std::abs(g.entry(m, m)));
    if (max_diag > 0.0 && step > 0.1 / max_diag)
        throw InvalidParams("propagate_ode: step exceeds stability margin 0.1/max|a_mm|");

    std::vector<double> y = init.coords;
    if (tau == 0.0) return y;

    const int n = g.size;
    auto deriv = [&](const std::vector<double>& x, std::vector<double>& dx) {
        for (int m = 0; m < n; ++m) {
            double acc = 0.0;
            const double* row = &g.entries[static_cast<std::size_t>(m) * n];
            for (int j = 0; j < n; ++j) acc += row[j] * x[j];
            dx[m] = acc;
        }
    };

    const auto steps = static_cast<long>(std::ceil(tau / step));
    const double h = tau / static_cast<double>(steps);
    std::vector<double> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()),
        tmp(y.size());
    for (long s = 0; s < steps; ++s) {
        deriv(y, k1);
        for (std::size_t m = 0; m < y.size(); ++m) tmp[m] = y[m] + 0.5 * h * k1[m];
        deriv(tmp, k2);
        for (std::size_t m = 0; m < y.size(); ++m) tmp[m] = y[m] + 0.5 * h * k2[m];
        deriv(tmp, k3);
        for (std::size_t m = 0; m < y.size(); ++m) tmp[m] = y[m] + h * k3[m];
        deriv(tmp, k4);
        for (std::size_t m = 0; m < y.size(); ++m)
            y[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
    }

    double sum = 0.0;
    for (double p : y) sum += p;
    if (std::abs(sum - 1.0) > 1e-6)
        throw UnstableStep("propagate_ode: probability mass drifted to " +
                           std::to_string(sum));
    return y;
}

double equilibrium_error(const WeightedVector& p, const ModelSpec& model,
                         const TruncationPolicy& trunc) {
    const auto eq = equilibrium_distribution(model, trunc);
    if (p.coords.size() != eq.coords.size())
        throw DimensionMismatch("equilibrium_error: size mismatch");
    for (std::size_t m = 0; m < p.weights.size(); ++m)
        if (p.weights[m] != eq.weights[m])
            throw DimensionMismatch("equilibrium_error: weights differ");
    double acc = 0.0;
    for (std::size_t m = 0; m < p.coords.size(); ++m) {
        const double d = p.coords[m] - eq.coords[m];
        acc += p.weights[m] * d * d;
    }
    return std::sqrt(acc);
}

double fourier_error(const SpectralDecomposition& dec,
                     const std::vector<double>& coeffs, double tau) {
    if (static_cast<int>(coeffs.size()) != dec.size)
        throw DimensionMismatch("fourier_error: coefficient count mismatch");
    double acc = 0.0;
    for (int k = 1; k < dec.size; ++k) {
        const double term =
            coeffs[k] * std::exp(tau * dec.eigenvalues[k]);
        acc += term * term;
    }
    return std::sqrt(acc);
}

SubspaceInitial truncated_subspace_initial(const SpectralDecomposition& dec,
                                           int n_modes,
                                           const std::vector<double>& coeffs) {
    if (n_modes < 2 || n_modes > dec.size)
        throw InvalidParams("truncated_subspace_initial: need 2 <= N <= M");
    if (static_cast<int>(coeffs.size()) != n_modes - 1)
        throw DimensionMismatch(
            "truncated_subspace_initial: expected N-1 coefficients");

    const auto p_eq = equilibrium_from(dec);
    std::vector<double> dir(p_eq.size(), 0.0);
    for (int k = 2; k <= n_modes; ++k) {
        const double c = coeffs[static_cast<std::size_t>(k) - 2];
        if (c == 0.0) continue;
        const auto& q = dec.eigenvectors[static_cast<std::size_t>(k) - 1];
        for (std::size_t m = 0; m < dir.size(); ++m) dir[m] += c * q[m];
    }

    double shrink = 1.0;
    for (std::size_t m = 0; m < dir.size(); ++m)
        if (dir[m] < 0.0) shrink = std::min(shrink, p_eq[m] / (-dir[m]));
    if (shrink < 1e-6)
        throw AllCoeffsZeroAfterShrink(
            "truncated_subspace_initial: positivity forces shrink " +
            std::to_string(shrink));

    SubspaceInitial out;
    out.shrink = shrink;
    out.data.coords.resize(p_eq.size());
    for (std::size_t m = 0; m < p_eq.size(); ++m) {
        double val = p_eq[m] + shrink * dir[m];
        if (val < 0.0 && val > -1e-15) val = 0.0;  // binding constraint roundoff
        out.data.coords[m] = val;
    }
    out.data.validate();
    return out;
}

TrajectoryRecord run_trajectory(const SpectralDecomposition& dec,
                                const InitialData& init,
                                const std::vector<double>& tau_grid) {
    TrajectoryRecord traj;
    traj.times = tau_grid;
    traj.fourier = fourier_coefficients(dec, init.coords);
    const auto p_eq = equilibrium_from(dec);
    for (double tau : tau_grid) {
        auto state = propagate_spectral(dec, init, tau);
        double acc = 0.0;
        for (int m = 0; m < dec.size; ++m) {
            const double d = state[m] - p_eq[m];
            acc += dec.weights[m] * d * d;
        }
        traj.errors.push_back(std::sqrt(acc));
        traj.states.push_back(std::move(state));
    }
    return traj;
}

DecayBoundReport decay_bound_check(const TrajectoryRecord& traj, double nu_n,
                                   double pstar_norm) {
    DecayBoundReport rep;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double envelope =
            std::exp(-traj.times[i] * std::abs(nu_n)) * pstar_norm;
        double ratio;
        if (traj.errors[i] == 0.0)
            ratio = 0.0;
        else if (envelope == 0.0)
            ratio = std::numeric_limits<double>::infinity();
        else
            ratio = traj.errors[i] / envelope;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    rep.pass = rep.max_ratio <= 1.0 + 1e-9;
    return rep;
}

}  // namespace gcme

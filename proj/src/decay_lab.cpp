#include "gcme/decay_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gcme {

namespace {

constexpr double kUnderflowFloor = 1e-280;

double prescription(const DecaySpec& spec, int k) {
    const double mag = (spec.law == DecaySpec::Law::Exponential)
                           ? std::sqrt(spec.kappa) * std::exp(-0.5 * spec.delta * k)
                           : std::sqrt(spec.kappa) * std::pow(k, -0.5 * spec.delta);
    return (k % 2 == 0) ? mag : -mag;
}

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                  std::size_t begin, std::size_t end) {
    const auto n = static_cast<double>(end - begin);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw DegenerateFit("fit_envelope: collinear abscissae");
    Fit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace

void DecaySpec::validate() const {
    if (!(kappa >= 0.0)) throw InvalidParams("DecaySpec: kappa must be >= 0");
    if (!(beta > 0.0)) throw InvalidParams("DecaySpec: beta must be > 0");
    if (law == Law::Exponential) {
        if (!(delta > 0.0))
            throw InvalidParams("DecaySpec: exponential law needs delta > 0");
    } else {
        if (!(delta > 1.0))
            throw InvalidParams("DecaySpec: power law needs delta > 1");
    }
}

SynthesisResult synthesize_initial(const SpectralDecomposition& dec,
                                   const DecaySpec& spec) {
    spec.validate();
    if (dec.size < 2)
        throw InvalidParams("synthesize_initial: need at least two modes");

    std::vector<double> coeffs(static_cast<std::size_t>(dec.size) - 1);
    for (int k = 2; k <= dec.size; ++k)
        coeffs[static_cast<std::size_t>(k) - 2] = prescription(spec, k);

    SubspaceInitial base;
    try {
        base = truncated_subspace_initial(dec, dec.size, coeffs);
    } catch (const AllCoeffsZeroAfterShrink& e) {
        throw ShrinkTooSevere(std::string("synthesize_initial: ") + e.what());
    }

    SynthesisResult out;
    out.data = std::move(base.data);
    out.shrink = base.shrink;
    out.prescribed = std::move(coeffs);
    out.achieved.resize(out.prescribed.size());
    for (std::size_t i = 0; i < out.prescribed.size(); ++i)
        out.achieved[i] = out.shrink * out.prescribed[i];
    return out;
}

EnvelopeReport fit_envelope(const std::vector<double>& errors,
                            const std::vector<double>& times,
                            DecaySpec::Law law, double beta, double delta) {
    if (errors.size() != times.size())
        throw DimensionMismatch("fit_envelope: grid size mismatch");

    EnvelopeReport rep;
    rep.law = law;

    std::vector<double> x, y;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > kUnderflowFloor)) break;  // underflow floor
        if (!(times[i] > 1.0)) continue;            // log coordinates need tau > 1
        const double comp =
            (law == DecaySpec::Law::Exponential)
                ? errors[i] * std::pow(times[i], delta / beta)
                : errors[i] * std::pow(std::log(times[i]), 0.5 * (delta - 1.0));
        rep.compensated.push_back(comp);
        x.push_back(law == DecaySpec::Law::Exponential
                        ? std::log(times[i])
                        : std::log(std::log(times[i])));
        y.push_back(std::log(errors[i]));
    }

    rep.usable_points = static_cast<int>(x.size());
    if (rep.usable_points < 4)
        throw DegenerateFit("fit_envelope: fewer than 4 usable points");

    const auto full = least_squares(x, y, 0, x.size());
    rep.slope = full.slope;
    rep.intercept = full.intercept;
    const std::size_t half = x.size() / 2;
    rep.slope_early = least_squares(x, y, 0, half).slope;
    rep.slope_late = least_squares(x, y, half, x.size()).slope;
    rep.non_power_flag =
        rep.slope_late - rep.slope_early < -0.5 * (1.0 + std::abs(rep.slope));

    std::vector<double> sorted = rep.compensated;
    std::sort(sorted.begin(), sorted.end());
    rep.median_value = (sorted.size() % 2 == 1)
                           ? sorted[sorted.size() / 2]
                           : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                    sorted[sorted.size() / 2]);
    rep.sup_value = sorted.back();
    rep.pass = std::isfinite(rep.sup_value) &&
               rep.sup_value <= 10.0 * rep.median_value;
    return rep;
}

DecayExperiment run_decay_experiment(const SpectralDecomposition& dec,
                                     const DecaySpec& spec,
                                     const std::vector<double>& tau_grid) {
    spec.validate();
    const double span_needed =
        (spec.law == DecaySpec::Law::Exponential) ? 1e8 : 1e12;
    if (tau_grid.size() < 4 || tau_grid.front() > 1e2 * (1.0 + 1e-9) ||
        tau_grid.back() < span_needed * (1.0 - 1e-9))
        throw GridTooShort("run_decay_experiment: grid must span [1e2, " +
                           std::to_string(span_needed) + "]");

    DecayExperiment out;
    out.synthesis = synthesize_initial(dec, spec);

    std::vector<double> coeffs(static_cast<std::size_t>(dec.size), 0.0);
    // c_1 is fixed by normalization; it does not enter the error formula.
    for (int k = 2; k <= dec.size; ++k)
        coeffs[static_cast<std::size_t>(k) - 1] =
            out.synthesis.achieved[static_cast<std::size_t>(k) - 2];

    out.trajectory.times = tau_grid;
    out.trajectory.fourier = coeffs;
    bool all_zero = true;
    for (double tau : tau_grid) {
        const double err = fourier_error(dec, coeffs, tau);
        out.trajectory.errors.push_back(err);
        all_zero = all_zero && err == 0.0;
    }

    if (all_zero) {
        out.envelope.law = spec.law;
        out.envelope.pass = true;  // identically zero error is bounded
        return out;
    }
    out.envelope = fit_envelope(out.trajectory.errors, tau_grid, spec.law,
                                spec.beta, spec.delta);
    return out;
}

std::vector<double> geometric_grid(double tau_min, double tau_max, int n) {
    if (!(tau_min > 0.0) || !(tau_max > tau_min) || n < 2)
        throw InvalidParams("geometric_grid: need 0 < tau_min < tau_max, n >= 2");
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double ratio = std::log(tau_max / tau_min) / (n - 1);
    for (int i = 0; i < n; ++i)
        grid[static_cast<std::size_t>(i)] = tau_min * std::exp(ratio * i);
    grid.back() = tau_max;
    return grid;
}

}  // namespace gcme

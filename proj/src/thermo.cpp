#include "gcme/thermo.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <utility>

namespace gcme {

void TruncationPolicy::validate() const {
    if (max_index < 1)
        throw InvalidParams("TruncationPolicy: max_index must be >= 1");
    if (!(tail_tol > 0.0))
        throw InvalidParams("TruncationPolicy: tail_tol must be > 0");
}

ModelSpec ModelSpec::harmonic(double beta, double mu) {
    return affine(1.0, 0.0, 1.0, 0.0, beta, mu);
}

ModelSpec ModelSpec::affine(double lambda_slope, double lambda_offset,
                            double n_slope, double n_offset, double beta,
                            double mu) {
    ModelSpec m;
    m.kind_ = (lambda_slope == 1.0 && lambda_offset == 0.0 &&
               n_slope == 1.0 && n_offset == 0.0)
                  ? ModelKind::Harmonic
                  : ModelKind::Affine;
    m.la_ = lambda_slope;
    m.lb_ = lambda_offset;
    m.na_ = n_slope;
    m.nb_ = n_offset;
    m.beta_ = beta;
    m.mu_ = mu;
    return m;
}

ModelSpec ModelSpec::table(std::vector<double> lambda,
                           std::vector<double> nparticles, double beta,
                           double mu) {
    ModelSpec m;
    m.kind_ = ModelKind::Table;
    m.lambda_table_ = std::move(lambda);
    m.n_table_ = std::move(nparticles);
    m.beta_ = beta;
    m.mu_ = mu;
    return m;
}

double ModelSpec::level_energy(int m) const {
    if (m < 1) throw IndexOutOfRange("level index must be >= 1");
    if (kind_ == ModelKind::Table) {
        if (static_cast<std::size_t>(m) > lambda_table_.size())
            throw IndexOutOfRange("level index exceeds table size");
        return lambda_table_[static_cast<std::size_t>(m) - 1];
    }
    return la_ * m + lb_;
}

double ModelSpec::particle_count(int m) const {
    if (m < 1) throw IndexOutOfRange("level index must be >= 1");
    if (kind_ == ModelKind::Table) {
        if (static_cast<std::size_t>(m) > n_table_.size())
            throw IndexOutOfRange("level index exceeds table size");
        return n_table_[static_cast<std::size_t>(m) - 1];
    }
    return na_ * m + nb_;
}

double ModelSpec::exponent(int m, double mu_scale) const {
    return level_energy(m) - mu_scale * particle_count(m);
}

std::optional<double> ModelSpec::exponent_step(double mu_scale) const {
    if (kind_ == ModelKind::Table) return std::nullopt;
    return la_ - mu_scale * na_;
}

std::optional<std::size_t> ModelSpec::table_size() const {
    if (kind_ == ModelKind::Table) return lambda_table_.size();
    return std::nullopt;
}

void ModelSpec::validate(const TruncationPolicy& trunc) const {
    trunc.validate();
    if (!(beta_ > 0.0)) throw InvalidParams("ModelSpec: beta must be > 0");
    if (kind_ == ModelKind::Table) {
        if (lambda_table_.empty())
            throw InvalidParams("ModelSpec: empty level table");
        if (lambda_table_.size() != n_table_.size())
            throw InvalidParams(
                "ModelSpec: lambda and nparticles tables differ in length");
        if (static_cast<std::size_t>(trunc.max_index) > lambda_table_.size())
            throw InvalidParams(
                "ModelSpec: max_index exceeds the level table size");
    }
    if (witness.m0 < 1)
        throw InvalidParams("ModelSpec: witness index m0 must be >= 1");
    if (!(witness.growth > 0.0))
        throw InvalidParams("ModelSpec: witness growth must be > 0");
    for (int m = 1; m <= trunc.max_index; ++m) {
        const double n = particle_count(m);
        if (!(n >= 0.0) || std::abs(n - std::round(n)) > 1e-9)
            throw InvalidParams(
                "ModelSpec: N_m must be a non-negative integer (m=" +
                std::to_string(m) + ")");
    }
}

std::optional<int> ModelSpec::witness_violation(
    const TruncationPolicy& trunc) const {
    const int m0 = witness.m0;
    if (m0 > trunc.max_index) return std::nullopt;
    const double base = exponent(m0, mu_);
    for (int m = m0 + 1; m <= trunc.max_index; ++m) {
        if (exponent(m, mu_) < base + witness.growth * (m - m0) - 1e-12)
            return m;
    }
    return std::nullopt;
}

namespace {

double checked_exp(double x, const char* what) {
    if (std::abs(x) > kDefaultExponentCap)
        throw OverflowRisk(std::string(what) + ": exponent magnitude " +
                           std::to_string(std::abs(x)) + " exceeds cap");
    return std::exp(x);
}

}  // namespace

double partition_sum_closed(const ModelSpec& model, double scale_beta,
                            double scale_mu, int max_index) {
    if (!(scale_beta > 0.0))
        throw InvalidParams("partition sum: scale_beta must be > 0");
    double sum = 0.0;
    for (int m = 1; m <= max_index; ++m)
        sum += checked_exp(-scale_beta * model.exponent(m, scale_mu),
                           "partition sum");
    return sum;
}

PartitionValue partition_function(const ModelSpec& model, double scale_beta,
                                  double scale_mu,
                                  const TruncationPolicy& trunc) {
    if (!(scale_beta > 0.0))
        throw InvalidParams("partition_function: scale_beta must be > 0");
    model.validate(trunc);
    const int max_index = trunc.max_index;

    PartitionValue out;
    out.value = partition_sum_closed(model, scale_beta, scale_mu, max_index);

    if (auto size = model.table_size()) {
        // Finite model: the remainder beyond M is itself a finite sum.
        double rest = 0.0;
        for (int m = max_index + 1; m <= static_cast<int>(*size); ++m)
            rest += checked_exp(-scale_beta * model.exponent(m, scale_mu),
                                "partition tail");
        out.tail_bound = rest;
    } else {
        const double step = *model.exponent_step(scale_mu);
        if (!(step > 0.0))
            throw TailNotConverged(
                "partition_function: exponent increment " +
                std::to_string(step) +
                " is not positive at the requested parameters");
        if (model.witness_violation(trunc))
            throw TailNotConverged(
                "partition_function: declared summability witness fails on "
                "the truncated range");
        // eps_m increases by exactly `step` per level, so the tail is the
        // geometric series starting at m = M+1.
        const double first =
            checked_exp(-scale_beta * model.exponent(max_index + 1, scale_mu),
                        "partition tail");
        const double ratio = std::exp(-scale_beta * step);
        out.tail_bound = first / (1.0 - ratio);
    }

    if (out.tail_bound > trunc.tail_tol)
        throw TailNotConverged("partition_function: tail bound " +
                               std::to_string(out.tail_bound) +
                               " exceeds tail_tol");
    return out;
}

std::vector<double> weight_sequence(const ModelSpec& model,
                                    const TruncationPolicy& trunc,
                                    double exponent_cap) {
    model.validate(trunc);
    std::vector<double> w(static_cast<std::size_t>(trunc.max_index));
    for (int m = 1; m <= trunc.max_index; ++m) {
        const double x = model.beta() * model.exponent(m, model.mu());
        if (std::abs(x) > exponent_cap)
            throw OverflowRisk("weight_sequence: exponent magnitude " +
                               std::to_string(std::abs(x)) +
                               " exceeds cap at m=" + std::to_string(m));
        w[static_cast<std::size_t>(m) - 1] = std::exp(x);
    }
    return w;
}

double weighted_inner_product(const WeightedVector& p,
                              const WeightedVector& q) {
    if (p.coords.size() != q.coords.size() ||
        p.weights.size() != q.weights.size() ||
        p.coords.size() != p.weights.size())
        throw DimensionMismatch("weighted_inner_product: size mismatch");
    for (std::size_t i = 0; i < p.weights.size(); ++i)
        if (p.weights[i] != q.weights[i])
            throw DimensionMismatch(
                "weighted_inner_product: vectors carry different weights");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        sum += p.weights[i] * p.coords[i] * q.coords[i];
    return sum;
}

double weighted_norm(const WeightedVector& p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.coords.size(); ++i)
        sum += p.weights[i] * p.coords[i] * p.coords[i];
    return std::sqrt(sum);
}

WeightedVector equilibrium_distribution(const ModelSpec& model,
                                        const TruncationPolicy& trunc) {
    const double theta =
        partition_sum_closed(model, model.beta(), model.mu(), trunc.max_index);
    if (!std::isfinite(theta) || theta <= 0.0)
        throw InvalidParams("equilibrium_distribution: degenerate normalizer");
    WeightedVector p;
    p.weights = weight_sequence(model, trunc);
    p.coords.resize(p.weights.size());
    for (int m = 1; m <= trunc.max_index; ++m)
        p.coords[static_cast<std::size_t>(m) - 1] =
            std::exp(-model.beta() * model.exponent(m, model.mu())) / theta;
    return p;
}

}  // namespace gcme

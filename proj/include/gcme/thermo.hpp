#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcme/errors.hpp"

namespace gcme {

// Truncation level and tail tolerance governing every partition-type sum.
// One-state truncation (M = 1) is allowed as a degenerate case; the chain is
// then stationary.
struct TruncationPolicy {
    int max_index = 2;       // M
    double tail_tol = 1e-10;

    void validate() const;
};

enum class ModelKind { Harmonic, Affine, Table };

// Declared growth certificate for the exponents eps_m = lambda_m - mu*N_m:
// eps_m >= eps_{m0} + growth*(m - m0) for m >= m0.
struct SummabilityWitness {
    int m0 = 1;
    double growth = 1.0;
};

// Problem instance: level energies lambda_m, particle counts N_m (both
// indexed from m = 1), inverse temperature beta and chemical potential mu.
// Closed-form kinds (harmonic, affine) extend to every index; a table model
// is inherently finite.
class ModelSpec {
  public:
    static ModelSpec harmonic(double beta, double mu);
    static ModelSpec affine(double lambda_slope, double lambda_offset,
                            double n_slope, double n_offset, double beta,
                            double mu);
    static ModelSpec table(std::vector<double> lambda,
                           std::vector<double> nparticles, double beta,
                           double mu);

    ModelKind kind() const { return kind_; }
    double beta() const { return beta_; }
    double mu() const { return mu_; }

    double level_energy(int m) const;    // lambda_m
    double particle_count(int m) const;  // N_m

    // eps_m(mu') = lambda_m - mu'*N_m, the exponent appearing in all
    // partition-type sums at a possibly rescaled chemical potential.
    double exponent(int m, double mu_scale) const;

    // Exact per-step increment of eps_m(mu') for the closed-form kinds;
    // empty for table models (those have no tail at all).
    std::optional<double> exponent_step(double mu_scale) const;

    std::optional<std::size_t> table_size() const;

    SummabilityWitness witness;

    // Structural invariants: beta > 0, N_m a non-negative integer over the
    // truncated range, table arrays consistent.
    void validate(const TruncationPolicy& trunc) const;

    // Declared-witness inequality on the truncated range [m0, M].
    // Returns the first violating index, if any.
    std::optional<int> witness_violation(const TruncationPolicy& trunc) const;

  private:
    ModelSpec() = default;

    ModelKind kind_ = ModelKind::Harmonic;
    double beta_ = 1.0;
    double mu_ = 0.0;
    // affine coefficients: lambda_m = la_*m + lb_, N_m = na_*m + nb_
    double la_ = 1.0, lb_ = 0.0, na_ = 1.0, nb_ = 0.0;
    std::vector<double> lambda_table_;
    std::vector<double> n_table_;
};

// Truncated partition sum plus a rigorous bound on the neglected tail.
struct PartitionValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Sum_{m<=M} exp[-scale_beta * eps_m(scale_mu)] with no tail certificate.
// This is the exact partition function of the closed finite model.
double partition_sum_closed(const ModelSpec& model, double scale_beta,
                            double scale_mu, int max_index);

// Certified partition function: closed sum plus a geometric tail bound
// derived from the exact exponent increments (rule kinds) or the explicit
// finite remainder (table kind). Throws TailNotConverged when no positive
// growth certifies the tail or when the bound exceeds trunc.tail_tol.
PartitionValue partition_function(const ModelSpec& model, double scale_beta,
                                  double scale_mu,
                                  const TruncationPolicy& trunc);

inline constexpr double kDefaultExponentCap = 700.0;

// w_m = exp[beta*(lambda_m - mu*N_m)] for m = 1..M. Throws OverflowRisk if
// any exponent magnitude exceeds the cap.
std::vector<double> weight_sequence(const ModelSpec& model,
                                    const TruncationPolicy& trunc,
                                    double exponent_cap = kDefaultExponentCap);

// Coordinates paired with the weights defining the ambient geometry.
struct WeightedVector {
    std::vector<double> coords;
    std::vector<double> weights;

    int size() const { return static_cast<int>(coords.size()); }
};

// Sum_m w_m p_m q_m. Both vectors must carry the same weight array.
double weighted_inner_product(const WeightedVector& p, const WeightedVector& q);

double weighted_norm(const WeightedVector& p);

// Closed-truncation equilibrium distribution: p_m proportional to
// exp[-beta*eps_m], normalized by the closed partition sum so that the
// components sum to one exactly (to rounding).
WeightedVector equilibrium_distribution(const ModelSpec& model,
                                        const TruncationPolicy& trunc);

}  // namespace gcme

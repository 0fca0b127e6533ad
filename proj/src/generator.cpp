#include "gcme/generator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gcme {

namespace {

// u_m = exp[-(beta/2)(3*lambda_m + mu*N_m)], the outgoing factor.
double rate_u(const ModelSpec& model, int m) {
    return std::exp(-0.5 * model.beta() *
                    (3.0 * model.level_energy(m) +
                     model.mu() * model.particle_count(m)));
}

// v_n = exp[-(beta/2)(lambda_n + 3*mu*N_n)], the incoming factor.
double rate_v(const ModelSpec& model, int n) {
    return std::exp(-0.5 * model.beta() *
                    (model.level_energy(n) +
                     3.0 * model.mu() * model.particle_count(n)));
}

}  // namespace

double transition_rate(const ModelSpec& model, int m, int n) {
    if (m < 1 || n < 1) throw IndexOutOfRange("transition_rate: indices start at 1");
    if (auto size = model.table_size()) {
        if (m > static_cast<int>(*size) || n > static_cast<int>(*size))
            throw IndexOutOfRange("transition_rate: index exceeds table size");
    }
    if (m == n) throw SameIndex("transition_rate: m == n has no rate");
    return rate_u(model, m) * rate_v(model, n);
}

GeneratorMatrix build_generator(const ModelSpec& model,
                                const TruncationPolicy& trunc) {
    model.validate(trunc);
    const int n_levels = trunc.max_index;
    const auto sz = static_cast<std::size_t>(n_levels);

    std::vector<double> u(sz), v(sz);
    double u_total = 0.0;
    for (int m = 1; m <= n_levels; ++m) {
        u[m - 1] = rate_u(model, m);
        v[m - 1] = rate_v(model, m);
        if (!std::isfinite(u[m - 1]) || !std::isfinite(v[m - 1]))
            throw OverflowRisk("build_generator: non-finite rate factor at m=" +
                               std::to_string(m));
        u_total += u[m - 1];
    }

    GeneratorMatrix g{n_levels,
                      std::vector<double>(sz * sz, 0.0),
                      std::vector<double>(sz * sz, 0.0),
                      weight_sequence(model, trunc),
                      model,
                      trunc,
                      true};

    for (int m = 0; m < n_levels; ++m) {
        for (int n = 0; n < n_levels; ++n) {
            if (m == n) continue;
            const double r = u[m] * v[n];
            g.rates[static_cast<std::size_t>(m) * sz + n] = r;
            g.entries[static_cast<std::size_t>(m) * sz + n] = r;
        }
        // Loss term summed over the retained levels only (closed truncation).
        g.entries[static_cast<std::size_t>(m) * sz + m] =
            -(u_total - u[m]) * v[m];
    }
    return g;
}

BalanceReport verify_detailed_balance(const GeneratorMatrix& g, double tol) {
    const auto p = equilibrium_distribution(g.params, g.trunc);
    double worst = 0.0;
    for (int m = 1; m <= g.size; ++m) {
        for (int n = 1; n <= g.size; ++n) {
            if (m == n) continue;
            const double gain = g.rate(m, n) * p.coords[n - 1];
            const double loss = g.rate(n, m) * p.coords[m - 1];
            const double rel = std::abs(gain - loss) / gain;
            if (rel > worst) worst = rel;
        }
    }
    return {worst, worst <= tol};
}

double matrix_trace(const GeneratorMatrix& g) {
    double tr = 0.0;
    for (int m = 1; m <= g.size; ++m) tr += g.entry(m, m);
    return tr;
}

TraceClosedForm closed_form_trace(const ModelSpec& model,
                                  const TruncationPolicy& trunc) {
    model.validate(trunc);
    const double b = model.beta();
    const double mu = model.mu();
    const int max_index = trunc.max_index;

    const double t2b = partition_sum_closed(model, 2.0 * b, -mu, max_index);
    const double thalf = partition_sum_closed(model, 0.5 * b, -3.0 * mu, max_index);
    const double t32 = partition_sum_closed(model, 1.5 * b, -mu / 3.0, max_index);

    TraceClosedForm out;
    out.value = t2b - thalf * t32;

    // Distance to the infinite-sum value, from the certified tails of the
    // three factors. Throws TailNotConverged when any factor diverges.
    const double tail_2b = partition_function(model, 2.0 * b, -mu, trunc).tail_bound;
    const double tail_half =
        partition_function(model, 0.5 * b, -3.0 * mu, trunc).tail_bound;
    const double tail_32 =
        partition_function(model, 1.5 * b, -mu / 3.0, trunc).tail_bound;
    out.tail_bound =
        tail_2b + thalf * tail_32 + t32 * tail_half + tail_half * tail_32;
    out.fp_allowance = 64.0 * std::numeric_limits<double>::epsilon() *
                       max_index * (t2b + thalf * t32);
    return out;
}

HsBoundReport hs_bound_check(const GeneratorMatrix& g, const ModelSpec& model,
                             const TruncationPolicy& trunc) {
    double hs = 0.0;
    for (int m = 1; m <= g.size; ++m) {
        for (int n = 1; n <= g.size; ++n) {
            const double a = g.entry(m, n);
            const double scaled =
                a * std::sqrt(g.weights[m - 1] / g.weights[n - 1]);
            hs += scaled * scaled;
        }
    }

    const double b = model.beta();
    const double mu = model.mu();
    const int max_index = trunc.max_index;
    const double tb3 = partition_sum_closed(model, b, -3.0 * mu, max_index);
    const double t32 = partition_sum_closed(model, 1.5 * b, -mu / 3.0, max_index);
    const double t2b = partition_sum_closed(model, 2.0 * b, -mu, max_index);
    const double bound = tb3 * t32 * t32 + t2b * t2b;

    return {hs, bound, hs <= bound * (1.0 + 1e-10)};
}

SymmetricGenerator symmetrize(const GeneratorMatrix& g) {
    SymmetricGenerator s{g.size, std::vector<double>(g.entries.size(), 0.0)};
    const auto sz = static_cast<std::size_t>(g.size);
    for (int m = 0; m < g.size; ++m)
        for (int n = 0; n < g.size; ++n)
            s.entries[static_cast<std::size_t>(m) * sz + n] =
                g.entries[static_cast<std::size_t>(m) * sz + n] *
                std::sqrt(g.weights[m] / g.weights[n]);
    return s;
}

}  // namespace gcme

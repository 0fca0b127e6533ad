#include "gcme/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gcme/symmetric_eigen.hpp"

namespace gcme {

namespace {

using Real = long double;

// Model quantities precomputed in extended precision, 0-based over m = 1..M:
//   u_m = exp[-(b/2)(3*lambda_m + mu*N_m)]   (outgoing factor)
//   v_m = exp[-(b/2)(lambda_m + 3*mu*N_m)]   (incoming factor)
//   g2_m = u_m * v_m                        (secular numerators)
//   b_m = U * v_m with U = sum u            (closed pole sequence)
struct Workspace {
    int size = 0;
    Real beta = 0.0L, mu = 0.0L;
    std::vector<Real> u, v, b, g2, w;
    Real u_total = 0.0L;
    Real theta = 0.0L;  // closed partition sum at the model parameters
};

Workspace make_workspace(const ModelSpec& model, const TruncationPolicy& trunc) {
    model.validate(trunc);
    Workspace ws;
    ws.size = trunc.max_index;
    ws.beta = static_cast<Real>(model.beta());
    ws.mu = static_cast<Real>(model.mu());
    const auto sz = static_cast<std::size_t>(ws.size);
    ws.u.resize(sz);
    ws.v.resize(sz);
    ws.b.resize(sz);
    ws.g2.resize(sz);
    ws.w.resize(sz);
    for (int m = 1; m <= ws.size; ++m) {
        const Real lam = static_cast<Real>(model.level_energy(m));
        const Real n = static_cast<Real>(model.particle_count(m));
        const Real half_beta = 0.5L * ws.beta;
        ws.u[m - 1] = std::exp(-half_beta * (3.0L * lam + ws.mu * n));
        ws.v[m - 1] = std::exp(-half_beta * (lam + 3.0L * ws.mu * n));
        ws.g2[m - 1] = ws.u[m - 1] * ws.v[m - 1];
        ws.w[m - 1] = std::exp(ws.beta * (lam - ws.mu * n));
        ws.theta += std::exp(-ws.beta * (lam - ws.mu * n));
        if (ws.u[m - 1] <= 0.0L || ws.v[m - 1] <= 0.0L ||
            !std::isfinite(static_cast<double>(ws.w[m - 1])))
            throw OverflowRisk("spectral: rate factor under/overflow at m=" +
                               std::to_string(m));
        ws.u_total += ws.u[m - 1];
    }
    for (std::size_t m = 0; m < sz; ++m) ws.b[m] = ws.u_total * ws.v[m];
    return ws;
}

SpectralConditionReport condition_report(const ModelSpec& model,
                                         const TruncationPolicy& trunc) {
    SpectralConditionReport rep;
    rep.pass = true;
    for (int m = 1; m < trunc.max_index; ++m) {
        const double lhs = model.level_energy(m + 1) - model.level_energy(m);
        const double rhs = 3.0 * model.mu() *
                           (model.particle_count(m) - model.particle_count(m + 1));
        if (!(lhs > rhs)) {
            rep.pass = false;
            rep.first_violation = m;
            break;
        }
    }
    return rep;
}

// Secular sum in pole-shifted coordinates. The root of
//   h(nu) = sum_m (u_m / U) / (nu + b_m)
// in a localization interval is evaluated at nu = -b_anchor + dir*t with
// denominators (b_m - b_anchor) + dir*t, so the anchor distance t survives
// far below one ulp of the poles. h = 0 is equivalent to a(nu) = 1 away
// from nu = 0.
struct ShiftedSecular {
    const Workspace& ws;
    std::vector<Real> d;  // b_m - b_anchor; exactly zero at the anchor
    Real dir;             // -1: nu = -b_anchor - t, +1: nu = -b_anchor + t

    Real operator()(Real t) const {
        Real sum = 0.0L;
        for (std::size_t m = 0; m < d.size(); ++m)
            sum += (ws.u[m] / ws.u_total) / (d[m] + dir * t);
        return sum;
    }
};

ShiftedSecular make_shifted(const Workspace& ws, int anchor_index, Real dir) {
    ShiftedSecular s{ws, std::vector<Real>(ws.b.size()), dir};
    for (std::size_t m = 0; m < ws.b.size(); ++m)
        s.d[m] = ws.b[m] - ws.b[static_cast<std::size_t>(anchor_index)];
    s.d[static_cast<std::size_t>(anchor_index)] = 0.0L;
    return s;
}

constexpr int kRootIterCap = 200;

// Bracketed root search on (lo, hi): geometric bisection while the bracket
// spans decades, then regula falsi guarded by arithmetic bisection.
// `increasing` describes the sign pattern of f across the root.
Real bracketed_root(const ShiftedSecular& f, Real lo, Real hi, bool increasing,
                    int k) {
    Real flo = f(lo);
    Real fhi = f(hi);
    auto below = [increasing](Real val) { return increasing ? val < 0.0L : val > 0.0L; };

    // The root can sit below any fixed fraction of the interval; walk the
    // lower end down until it is on the pole side of the root.
    int guard = 0;
    while (!below(flo)) {
        if (flo == 0.0L) return lo;
        lo *= 1e-40L;
        if (lo < 4.0L * LDBL_MIN || ++guard > 128) return lo;
        flo = f(lo);
    }
    if (below(fhi))
        throw RootNotBracketed("secular root escaped its bracket at k=" +
                               std::to_string(k));

    for (int iter = 0; iter < kRootIterCap; ++iter) {
        Real mid;
        if (hi / lo > 4.0L) {
            mid = std::sqrt(lo) * std::sqrt(hi);
        } else if ((iter & 1) == 0 && std::isfinite(static_cast<double>(flo)) &&
                   std::isfinite(static_cast<double>(fhi)) && fhi != flo) {
            // Regula falsi on the narrow bracket, alternated with plain
            // bisection so a one-sided sequence cannot stall the bracket.
            mid = (lo * fhi - hi * flo) / (fhi - flo);
            if (!(mid > lo && mid < hi)) mid = 0.5L * (lo + hi);
        } else {
            mid = 0.5L * (lo + hi);
        }
        if (!(mid > lo && mid < hi)) break;  // bracket at rounding resolution
        const Real fm = f(mid);
        if (fm == 0.0L) return mid;
        if (below(fm)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return 0.5L * (lo + hi);
}

struct RootData {
    SecularRoot info;
    Real t = 0.0L;          // offset in extended precision
    int anchor_index = 0;   // 0-based pole index
    Real dir = -1.0L;
};

// Locate the root in (-b_{k-1}, -b_k) for k = 2..M (1-based k).
RootData solve_interval(const Workspace& ws, int k, double tol_root) {
    const Real b_left = ws.b[static_cast<std::size_t>(k - 2)];   // b_{k-1}
    const Real b_right = ws.b[static_cast<std::size_t>(k - 1)];  // b_k
    const Real width = b_left - b_right;
    if (!(width > 0.0L))
        throw RootNotBracketed("secular interval degenerate at k=" +
                               std::to_string(k));

    const Real half = 0.5L * width;
    RootData out;

    // Decide which pole the root hugs by the sign at the interval midpoint.
    ShiftedSecular right = make_shifted(ws, k - 1, -1.0L);
    const Real h_mid = right(half);
    if (h_mid == 0.0L) {
        out.t = half;
        out.anchor_index = k - 1;
        out.dir = -1.0L;
        out.info.anchored_right = true;
    } else if (h_mid > 0.0L) {
        // Root between the midpoint and -b_k; h increases in t here.
        out.anchor_index = k - 1;
        out.dir = -1.0L;
        out.info.anchored_right = true;
        const Real lo = std::max(width * 1e-320L, 4.0L * LDBL_MIN);
        out.t = bracketed_root(right, lo, half, /*increasing=*/true, k);
    } else {
        // Root between -b_{k-1} and the midpoint; anchor left, h decreases.
        ShiftedSecular left = make_shifted(ws, k - 2, 1.0L);
        out.anchor_index = k - 2;
        out.dir = 1.0L;
        out.info.anchored_right = false;
        const Real lo = std::max(width * 1e-320L, 4.0L * LDBL_MIN);
        out.t = bracketed_root(left, lo, half, /*increasing=*/false, k);
    }

    const Real b_anchor = ws.b[static_cast<std::size_t>(out.anchor_index)];
    const Real nu = -(b_anchor + (-out.dir) * out.t);
    ShiftedSecular at = make_shifted(ws, out.anchor_index, out.dir);
    const Real h_res = at(out.t);

    out.info.k = k;
    out.info.nu = static_cast<double>(nu);
    out.info.offset = static_cast<double>(out.t);
    out.info.residual = static_cast<double>(std::abs(nu * h_res));

    if (out.info.residual > tol_root && out.t > width * 1e-12L)
        throw RootNotBracketed(
            "secular root did not meet tolerance at k=" + std::to_string(k) +
            " (residual " + std::to_string(out.info.residual) + ")");
    return out;
}

void require_condition(const ModelSpec& model, const TruncationPolicy& trunc) {
    const auto rep = condition_report(model, trunc);
    if (!rep.pass)
        throw SpectralConditionViolated(
            "spectral condition fails at m=" +
            std::to_string(rep.first_violation.value_or(0)));
}

bool near_degenerate(const Workspace& ws, int* where) {
    for (int m = 0; m + 1 < ws.size; ++m) {
        if (1.0L - ws.b[m + 1] / ws.b[m] < 1e-10L) {
            if (where) *where = m + 1;
            return true;
        }
    }
    return false;
}

// Deterministic orientation: the dominant component of the orthonormal-basis
// representation sqrt(w_m) q_m is made positive. Small leading components of
// the tail eigenvectors carry method-dependent rounding, so the dominant
// component is the only orientation marker both solvers agree on.
void apply_sign_convention(std::vector<double>& q,
                           const std::vector<double>& weights) {
    double peak = 0.0, marker = 0.0;
    for (std::size_t m = 0; m < q.size(); ++m) {
        const double v = std::sqrt(weights[m]) * q[m];
        if (std::abs(v) > peak) {
            peak = std::abs(v);
            marker = v;
        }
    }
    if (marker < 0.0)
        for (double& x : q) x = -x;
}

// ||S z - nu z||_2 over the symmetric representation z_m = sqrt(w_m) q_m,
// which equals the weighted residual norm of the original eigenpair.
double symmetric_residual(const Workspace& ws, const std::vector<Real>& z,
                          Real nu) {
    const int n = ws.size;
    Real acc = 0.0L;
    std::vector<Real> g(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) g[m] = std::sqrt(ws.g2[m]);
    Real gz = 0.0L;
    for (int m = 0; m < n; ++m) gz += g[m] * z[m];
    for (int m = 0; m < n; ++m) {
        // S = g g^T - diag(b); the diagonal of g g^T is part of the product.
        const Real row = g[m] * gz - ws.b[m] * z[m];
        const Real r = row - nu * z[m];
        acc += r * r;
    }
    return static_cast<double>(std::sqrt(acc));
}

std::vector<double> normalized_equilibrium_direction(const Workspace& ws) {
    // q_1 = Theta^{1/2} p_eq, unit in the weighted norm, all entries positive.
    std::vector<double> q(static_cast<std::size_t>(ws.size));
    const Real root_theta = std::sqrt(ws.theta);
    for (int m = 0; m < ws.size; ++m) {
        const Real boltzmann = ws.u[m] / ws.v[m];  // e^{-beta eps_m}
        q[m] = static_cast<double>(boltzmann / root_theta);
    }
    return q;
}

}  // namespace

BSequence b_sequence(const ModelSpec& model, const TruncationPolicy& trunc,
                     BSequence::Variant variant) {
    const Workspace ws = make_workspace(model, trunc);
    BSequence b;
    b.variant = variant;
    b.theta = static_cast<double>(ws.u_total);
    b.values.resize(ws.b.size());
    for (std::size_t m = 0; m < ws.b.size(); ++m)
        b.values[m] = static_cast<double>(ws.b[m]);
    if (variant == BSequence::Variant::Open) {
        b.theta_tail = partition_function(model, 1.5 * model.beta(),
                                          -model.mu() / 3.0, trunc)
                           .tail_bound;
    }
    return b;
}

SpectralConditionReport verify_spectral_condition(const ModelSpec& model,
                                                  const TruncationPolicy& trunc) {
    model.validate(trunc);
    return condition_report(model, trunc);
}

double secular_value(double nu, const ModelSpec& model,
                     const TruncationPolicy& trunc) {
    const Workspace ws = make_workspace(model, trunc);
    // Evaluated against the published double-precision poles, so an exact
    // collision with a b_m from b_sequence() is detectable.
    double sum = 0.0;
    for (int m = 0; m < ws.size; ++m) {
        const double den = nu + static_cast<double>(ws.b[m]);
        if (std::abs(den) < 1e-300)
            throw PoleHit("secular_value: nu collides with pole -b_" +
                          std::to_string(m + 1));
        sum += static_cast<double>(ws.g2[m]) / den;
    }
    return sum;
}

WeightedVector SpectralDecomposition::vec(int k) const {
    if (k < 1 || k > size) throw IndexOutOfRange("decomposition index");
    return WeightedVector{eigenvectors[static_cast<std::size_t>(k) - 1], weights};
}

SpectralDecomposition solve_secular(const ModelSpec& model,
                                    const TruncationPolicy& trunc,
                                    double tol_root) {
    Workspace ws = make_workspace(model, trunc);
    if (ws.size > 1) require_condition(model, trunc);

    int dg = 0;
    if (ws.size > 1 && near_degenerate(ws, &dg)) {
        auto g = build_generator(model, trunc);
        auto dec = dense_eig_oracle(symmetrize(g), g.weights);
        dec.warnings.push_back(
            "b-sequence nearly degenerate at m=" + std::to_string(dg) +
            "; secular brackets collapse, dense eigensolver used instead");
        return dec;
    }

    SpectralDecomposition dec;
    dec.size = ws.size;
    dec.method = SpectralDecomposition::Method::Secular;
    dec.weights.resize(ws.w.size());
    for (std::size_t m = 0; m < ws.w.size(); ++m)
        dec.weights[m] = static_cast<double>(ws.w[m]);

    dec.eigenvalues.resize(static_cast<std::size_t>(ws.size), 0.0);
    dec.eigenvectors.resize(static_cast<std::size_t>(ws.size));
    dec.residuals.resize(static_cast<std::size_t>(ws.size), 0.0);

    // nu_1 = 0 with the equilibrium direction.
    dec.eigenvalues[0] = 0.0;
    dec.eigenvectors[0] = normalized_equilibrium_direction(ws);
    {
        std::vector<Real> z(static_cast<std::size_t>(ws.size));
        for (int m = 0; m < ws.size; ++m)
            z[m] = std::sqrt(ws.w[m]) * static_cast<Real>(dec.eigenvectors[0][m]);
        dec.residuals[0] = symmetric_residual(ws, z, 0.0L);
    }

    for (int k = 2; k <= ws.size; ++k) {
        RootData root = solve_interval(ws, k, tol_root);
        dec.roots.push_back(root.info);
        dec.eigenvalues[static_cast<std::size_t>(k) - 1] = root.info.nu;

        // Components from exact pole differences: nu + b_m = d_m + dir*t.
        ShiftedSecular shifted = make_shifted(ws, root.anchor_index, root.dir);
        std::vector<Real> p(static_cast<std::size_t>(ws.size));
        Real norm_sq = 0.0L;
        for (int m = 0; m < ws.size; ++m) {
            const Real den = shifted.d[m] + root.dir * root.t;
            if (den == 0.0L)
                throw DegenerateDenominator(
                    "eigenvector denominator vanished at m=" +
                    std::to_string(m + 1));
            p[m] = ws.u[m] / den;
            norm_sq += ws.w[m] * p[m] * p[m];
        }
        const Real norm = std::sqrt(norm_sq);
        const Real nu = -(ws.b[static_cast<std::size_t>(root.anchor_index)] +
                          (-root.dir) * root.t);

        std::vector<Real> z(static_cast<std::size_t>(ws.size));
        std::vector<double> q(static_cast<std::size_t>(ws.size));
        for (int m = 0; m < ws.size; ++m) {
            z[m] = std::sqrt(ws.w[m]) * p[m] / norm;
            q[m] = static_cast<double>(p[m] / norm);
        }
        apply_sign_convention(q, dec.weights);
        dec.eigenvectors[static_cast<std::size_t>(k) - 1] = std::move(q);
        dec.residuals[static_cast<std::size_t>(k) - 1] =
            symmetric_residual(ws, z, nu);
    }
    return dec;
}

std::vector<double> solve_eigenvalues(const ModelSpec& model,
                                      const TruncationPolicy& trunc,
                                      double tol_root) {
    return solve_secular(model, trunc, tol_root).eigenvalues;
}

WeightedVector eigenvector(double nu_k, const ModelSpec& model,
                           const TruncationPolicy& trunc) {
    const Workspace ws = make_workspace(model, trunc);
    WeightedVector out;
    out.weights.resize(ws.w.size());
    for (std::size_t m = 0; m < ws.w.size(); ++m)
        out.weights[m] = static_cast<double>(ws.w[m]);

    std::vector<double> q;
    if (nu_k == 0.0) {
        q = normalized_equilibrium_direction(ws);
    } else {
        std::vector<Real> p(static_cast<std::size_t>(ws.size));
        Real norm_sq = 0.0L;
        for (int m = 0; m < ws.size; ++m) {
            const double den = nu_k + static_cast<double>(ws.b[m]);
            if (std::abs(den) < 1e-300)
                throw DegenerateDenominator(
                    "eigenvector: nu + b_m vanishes at m=" + std::to_string(m + 1));
            p[m] = ws.u[m] / static_cast<Real>(den);
            norm_sq += ws.w[m] * p[m] * p[m];
        }
        const Real norm = std::sqrt(norm_sq);
        q.resize(static_cast<std::size_t>(ws.size));
        for (int m = 0; m < ws.size; ++m)
            q[m] = static_cast<double>(p[m] / norm);
        apply_sign_convention(q, out.weights);
    }
    out.coords = std::move(q);
    return out;
}

SpectralDecomposition dense_eig_oracle(const SymmetricGenerator& s,
                                       const std::vector<double>& weights) {
    if (static_cast<int>(weights.size()) != s.size)
        throw DimensionMismatch("dense_eig_oracle: weight count mismatch");
    const int n = s.size;
    const auto res = symmetric_eigen(s.entries, n);

    SpectralDecomposition dec;
    dec.size = n;
    dec.method = SpectralDecomposition::Method::Dense;
    dec.weights = weights;
    dec.eigenvalues.resize(static_cast<std::size_t>(n));
    dec.eigenvectors.resize(static_cast<std::size_t>(n));
    dec.residuals.resize(static_cast<std::size_t>(n));

    // Ascending output puts the zero mode last; restore [0, nu_2, ...].
    auto source_column = [n](int k) { return (k == 1) ? n - 1 : k - 2; };

    for (int k = 1; k <= n; ++k) {
        const int col = source_column(k);
        dec.eigenvalues[static_cast<std::size_t>(k) - 1] = res.values[col];
        std::vector<double> q(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m)
            q[m] = res.vectors[static_cast<std::size_t>(m) * n + col] /
                   std::sqrt(weights[m]);
        apply_sign_convention(q, weights);
        dec.eigenvectors[static_cast<std::size_t>(k) - 1] = std::move(q);

        // Residual in the symmetric representation.
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
            double row = 0.0;
            for (int j = 0; j < n; ++j)
                row += s.entry(m + 1, j + 1) *
                       res.vectors[static_cast<std::size_t>(j) * n + col];
            const double r =
                row - res.values[col] *
                          res.vectors[static_cast<std::size_t>(m) * n + col];
            acc += r * r;
        }
        dec.residuals[static_cast<std::size_t>(k) - 1] = std::sqrt(acc);
    }
    return dec;
}

TraceCheck spectral_trace_check(const SpectralDecomposition& dec,
                                const GeneratorMatrix& g) {
    TraceCheck out;
    for (double nu : dec.eigenvalues) out.sum_eigs += nu;
    out.matrix_trace = matrix_trace(g);
    out.pass = std::abs(out.sum_eigs - out.matrix_trace) <=
               1e-9 * std::abs(out.matrix_trace);
    return out;
}

GapProfile gap_profile(const SpectralDecomposition& dec, const BSequence& b) {
    GapProfile out;
    for (std::size_t k = 1; k < dec.eigenvalues.size(); ++k)
        out.magnitudes.push_back(std::abs(dec.eigenvalues[k]));
    if (!out.magnitudes.empty() && b.values.size() >= 2)
        out.no_spectral_gap =
            out.magnitudes.back() <= b.values[b.values.size() - 2];
    return out;
}

bool gap_vanishes_with_truncation(const ModelSpec& model,
                                  const TruncationPolicy& trunc,
                                  double tol_root) {
    const auto dec_m = solve_secular(model, trunc, tol_root);
    TruncationPolicy doubled = trunc;
    doubled.max_index = 2 * trunc.max_index;
    const auto dec_2m = solve_secular(model, doubled, tol_root);
    if (dec_m.size < 2 || dec_2m.size < 2) return false;
    return std::abs(dec_2m.eigenvalues.back()) <
           std::abs(dec_m.eigenvalues.back());
}

}  // namespace gcme

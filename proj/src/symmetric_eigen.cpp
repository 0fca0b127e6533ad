#include "gcme/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gcme/errors.hpp"

namespace gcme {

namespace {

using Real = long double;

class Dense {
  public:
    Dense(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0L) {}
    Real& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    Real operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }

  private:
    int n_;
    std::vector<Real> a_;
};

// Householder reduction of z to tridiagonal form; z is replaced by the
// accumulated orthogonal transform, d receives the diagonal and e the
// subdiagonal (e[0] unused).
void tridiagonalize(Dense& z, std::vector<Real>& d, std::vector<Real>& e,
                    int n) {
    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        Real h = 0.0L, scale = 0.0L;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
            if (scale == 0.0L) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                Real f = z(i, l);
                Real g = (f >= 0.0L) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0L;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0L;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const Real hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k)
                        z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0L;
    e[0] = 0.0L;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0L) {
            for (int j = 0; j <= l; ++j) {
                Real g = 0.0L;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0L;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0L;
    }
}

// Implicit-shift QL iteration on the tridiagonal (d, e), rotations applied
// to the columns of z.
void ql_implicit(std::vector<Real>& d, std::vector<Real>& e, Dense& z, int n,
                 int max_sweeps) {
    constexpr Real eps = std::numeric_limits<Real>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0L;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const Real dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == max_sweeps)
                    throw NoConvergence(
                        "symmetric_eigen: QL sweep cap exceeded");
                Real g = (d[l + 1] - d[l]) / (2.0L * e[l]);
                Real r = std::hypot(g, 1.0L);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                Real s = 1.0L, c = 1.0L, p = 0.0L;
                int i = m - 1;
                for (; i >= l; --i) {
                    Real f = s * e[i];
                    const Real b = c * e[i];
                    e[i + 1] = r = std::hypot(f, g);
                    if (r == 0.0L) {
                        d[i + 1] -= p;
                        e[m] = 0.0L;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0L * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0L && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0L;
            }
        } while (m != l);
    }
}

}  // namespace

SymmetricEigenResult symmetric_eigen(const std::vector<double>& matrix, int n,
                                     int max_sweeps) {
    if (n < 1) throw InvalidParams("symmetric_eigen: empty matrix");
    if (matrix.size() != static_cast<std::size_t>(n) * n)
        throw DimensionMismatch("symmetric_eigen: size mismatch");

    Dense z(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            z(i, j) = static_cast<Real>(matrix[static_cast<std::size_t>(i) * n + j]);

    std::vector<Real> d(static_cast<std::size_t>(n), 0.0L);
    std::vector<Real> e(static_cast<std::size_t>(n), 0.0L);
    if (n == 1) {
        d[0] = z(0, 0);
        z(0, 0) = 1.0L;
    } else {
        tridiagonalize(z, d, e, n);
        ql_implicit(d, e, z, n, max_sweeps);
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&d](int a, int b) { return d[a] < d[b]; });

    SymmetricEigenResult out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = static_cast<double>(d[order[k]]);
        for (int i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(i) * n + k] =
                static_cast<double>(z(i, order[k]));
    }
    return out;
}

}  // namespace gcme

// Eigenvalue kernels: cyclic Jacobi for symmetric matrices, Hessenberg
// reduction plus Francis double-shift QR for general square matrices.
// Eigenvalues only; no eigenvector accumulation.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "swcert/matrix.hpp"

namespace swcert {

inline constexpr double kDefaultEigTol = 1e-10;

namespace detail {

// One cyclic-by-row Jacobi sweep; returns the off-diagonal Frobenius norm
// before the sweep.
inline double jacobi_sweep(Matrix& a) {
    const int n = a.rows();
    double off = 0.0;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    off = std::sqrt(2.0 * off);
    if (off == 0.0) return 0.0;

    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (apq == 0.0) continue;
            const double app = a(p, p);
            const double aqq = a(q, q);
            const double theta = 0.5 * (aqq - app) / apq;
            double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            if (theta < 0.0) t = -t;
            const double c = 1.0 / std::sqrt(t * t + 1.0);
            const double s = t * c;
            const double tau = s / (1.0 + c);

            a(p, p) = app - t * apq;
            a(q, q) = aqq + t * apq;
            a(p, q) = 0.0;
            a(q, p) = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == p || k == q) continue;
                const double akp = a(k, p);
                const double akq = a(k, q);
                a(k, p) = akp - s * (akq + akp * tau);
                a(p, k) = a(k, p);
                a(k, q) = akq + s * (akp - akq * tau);
                a(q, k) = a(k, q);
            }
        }
    }
    return off;
}

// Reduce to upper Hessenberg form by stabilized elementary similarity
// transformations (partial pivoting).
inline void hessenberg_reduce(Matrix& a) {
    const int n = a.rows();
    for (int m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; ++j) {
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        }
        if (piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                a(i, m - 1) = 0.0;
                for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; destroys `a`.
inline std::vector<std::complex<double>> hessenberg_qr_eigenvalues(Matrix& a) {
    const int n = a.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<std::complex<double>> eig(n);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) return eig;  // zero matrix

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                eig[nn--] = {x + t, 0.0};
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? z : -z);
                        eig[nn - 1] = eig[nn] = {x + z, 0.0};
                        if (z != 0.0) eig[nn] = {x - w / z, 0.0};
                    } else {
                        eig[nn] = {x + p, -z};
                        eig[nn - 1] = {x + p, z};
                    }
                    nn -= 2;
                } else {
                    if (its == 30)
                        throw numerical_error("eigenvalues: QR iteration did not converge");
                    if (its == 10 || its == 20) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double scl = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= scl;
                        q /= scl;
                        r /= scl;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return eig;
}

}  // namespace detail

/// All eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi.
inline std::vector<double> sym_eigenvalues(const SymMatrix& s, double tol = kDefaultEigTol) {
    const int n = s.dim();
    Matrix a = s.as_matrix();
    double scale = std::max(1.0, a.max_abs());
    const int max_sweeps = 64;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double off = detail::jacobi_sweep(a);
        if (off <= std::min(tol, 1e-14 * scale)) {
            converged = true;
            break;
        }
    }
    if (!converged) throw numerical_error("sym_eigenvalues: Jacobi iteration did not converge");
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = a(i, i);
    std::sort(vals.begin(), vals.end());
    return vals;
}

/// Largest eigenvalue of a symmetric matrix. S is negative definite iff the
/// returned value is < 0.
inline double max_sym_eigenvalue(const SymMatrix& s, double tol = kDefaultEigTol) {
    return sym_eigenvalues(s, tol).back();
}

inline double min_sym_eigenvalue(const SymMatrix& s, double tol = kDefaultEigTol) {
    return sym_eigenvalues(s, tol).front();
}

/// Eigenvalues of a general square matrix (complex conjugate pairs included).
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    if (!a.is_square()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (!a.all_finite()) throw std::invalid_argument("eigenvalues: entries must be finite");
    Matrix work = a;
    detail::hessenberg_reduce(work);
    return detail::hessenberg_qr_eigenvalues(work);
}

/// Spectral radius max|lambda| of a general square matrix.
/// The `tol` parameter documents the accuracy contract; the QR iteration
/// itself converges to machine precision or throws numerical_error.
inline double spectral_radius(const Matrix& a, double tol = kDefaultEigTol) {
    (void)tol;
    double rho = 0.0;
    for (const auto& lam : eigenvalues(a)) rho = std::max(rho, std::abs(lam));
    return rho;
}

}  // namespace swcert

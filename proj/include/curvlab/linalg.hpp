#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

/// Thomas algorithm for a tridiagonal system. The systems assembled here are
/// M-matrices (diagonally dominant), so no pivoting is needed; a vanishing
/// pivot indicates an assembly bug and is reported as a numeric error.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot at row 0");
    c[0] = upper[0] / piv;
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (piv == 0.0)
            throw std::runtime_error("solve_tridiagonal: zero pivot at row " +
                                     std::to_string(i));
        c[i] = upper[i] / piv;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

struct CgResult {
    int iterations;
    double relative_residual;
};

/// Jacobi-preconditioned conjugate gradients for an SPD operator given as a
/// matrix-vector apply. Throws on non-convergence, reporting the residual.
inline CgResult conjugate_gradient(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
    const std::vector<double>& diag, const std::vector<double>& rhs,
    std::vector<double>& x, double rel_tol, int max_iter) {
    const std::size_t n = rhs.size();
    std::vector<double> r(n), z(n), p(n), ap(n);

    apply(x, ap);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = rhs[i] - ap[i];
        bnorm += rhs[i] * rhs[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0};
    }

    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
        rz += r[i] * z[i];
    }
    p = z;

    for (int it = 1; it <= max_iter; ++it) {
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        const double alpha = rz / pap;
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rnorm += r[i] * r[i];
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm <= rel_tol * bnorm) return {it, rnorm / bnorm};
        double rz_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    apply(x, ap);
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) rnorm += (rhs[i] - ap[i]) * (rhs[i] - ap[i]);
    throw std::runtime_error("conjugate_gradient: no convergence, relative residual " +
                             std::to_string(std::sqrt(rnorm) / bnorm));
}

}  // namespace curvlab

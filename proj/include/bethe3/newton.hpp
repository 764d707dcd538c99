#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "tolerances.hpp"

namespace bethe3 {

struct NewtonOptions {
    double tol = tol::residual;
    int max_iter = tol::newton_max_iter;
    int max_halvings = tol::newton_max_halvings;
};

template <std::size_t N>
struct NewtonResult {
    std::array<double, N> x{};
    std::array<double, N> residual{};
    double norm = 0;
    int iterations = 0;
    int halvings = 0;
};

namespace detail {

template <std::size_t N>
double inf_norm(const std::array<double, N>& v)
{
    double m = 0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

// Gaussian elimination with partial pivoting; false when the matrix is numerically singular.
template <std::size_t N>
bool solve_linear(std::array<std::array<double, N>, N> a, std::array<double, N> b, std::array<double, N>& x)
{
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (!(std::abs(a[piv][col]) > 0) || !std::isfinite(a[piv][col])) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < N; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < N; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    for (double e : x)
        if (!std::isfinite(e)) return false;
    return true;
}

struct AlwaysFeasible {
    template <std::size_t N>
    bool operator()(const std::array<double, N>&) const { return true; }
};

} // namespace detail

/**
 * @brief Damped Newton iteration with a central-difference Jacobian.
 *
 * The residual may throw SolverError for points outside its valid sheet; such trial points
 * are treated like infeasible ones and the step is halved. Failure at the initial guess is
 * rethrown.
 */
template <std::size_t N, class F, class Feasible = detail::AlwaysFeasible>
NewtonResult<N> newton_solve(F&& residual, std::array<double, N> guess, const NewtonOptions& opt = {},
                             Feasible&& feasible = {})
{
    using Vec = std::array<double, N>;
    auto try_eval = [&](const Vec& x, Vec& r) -> bool {
        if (!feasible(x)) return false;
        try {
            r = residual(x);
        } catch (const SolverError& e) {
            if (e.kind() == ErrorKind::ConstraintViolation || e.kind() == ErrorKind::SingularArgument) return false;
            throw;
        }
        for (double v : r)
            if (!std::isfinite(v)) return false;
        return true;
    };

    NewtonResult<N> out;
    out.x = guess;
    if (!feasible(guess))
        throw SolverError(ErrorKind::ConstraintViolation, "newton_solve: initial guess is outside the valid region");
    out.residual = residual(guess);
    out.norm = detail::inf_norm(out.residual);
    if (!std::isfinite(out.norm))
        throw SolverError(ErrorKind::ConstraintViolation, "newton_solve: residual not finite at the initial guess");

    for (int it = 0; it < opt.max_iter; ++it) {
        if (out.norm < opt.tol) return out;
        out.iterations = it + 1;

        std::array<std::array<double, N>, N> jac{};
        for (std::size_t j = 0; j < N; ++j) {
            const double h = tol::fd_step * std::max(1.0, std::abs(out.x[j]));
            Vec xp = out.x, xm = out.x, rp{}, rm{};
            xp[j] += h;
            xm[j] -= h;
            const bool okp = try_eval(xp, rp), okm = try_eval(xm, rm);
            for (std::size_t i = 0; i < N; ++i) {
                if (okp && okm) jac[i][j] = (rp[i] - rm[i]) / (2 * h);
                else if (okp) jac[i][j] = (rp[i] - out.residual[i]) / h;
                else if (okm) jac[i][j] = (out.residual[i] - rm[i]) / h;
                else throw SolverError(ErrorKind::NoConvergence, "newton_solve: cannot form Jacobian at the sheet edge");
            }
        }
        Vec minus_r{};
        for (std::size_t i = 0; i < N; ++i) minus_r[i] = -out.residual[i];
        Vec dx{};
        if (!detail::solve_linear(jac, minus_r, dx))
            throw SolverError(ErrorKind::NoConvergence, "newton_solve: singular Jacobian");

        double lambda = 1;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            Vec xt = out.x, rt{};
            for (std::size_t i = 0; i < N; ++i) xt[i] += lambda * dx[i];
            if (try_eval(xt, rt)) {
                const double nt = detail::inf_norm(rt);
                if (nt < opt.tol || nt < (1 - 1e-4 * lambda) * out.norm) {
                    out.x = xt;
                    out.residual = rt;
                    out.norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
            ++out.halvings;
        }
        if (!accepted) {
            std::ostringstream os;
            os.precision(3);
            os << "newton_solve: line search stalled at |r|=" << out.norm;
            throw SolverError(ErrorKind::NoConvergence, os.str());
        }
    }
    if (out.norm < opt.tol) return out;
    std::ostringstream os;
    os.precision(3);
    os << "newton_solve: no convergence after " << opt.max_iter << " iterations, |r|=" << out.norm;
    throw SolverError(ErrorKind::NoConvergence, os.str());
}

} // namespace bethe3

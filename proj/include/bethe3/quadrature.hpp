#pragma once

#include <complex>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

namespace bethe3 {

/** @brief n-point Gauss-Legendre rule mapped to [0,1]. */
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline GaussRule gauss_legendre(unsigned n)
{
    GaussRule r;
    const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    auto add = [&](double t) {
        const double dp = boost::math::legendre_p_prime(static_cast<int>(n), t);
        r.x.push_back(0.5 * (1 + t));
        r.w.push_back(1 / ((1 - t * t) * dp * dp));
    };
    for (double z : zeros) {
        if (z == 0) {
            add(0);
            continue;
        }
        add(z);
        add(-z);
    }
    return r;
}

/** @brief Tensor-product rule on 0 <= x1 <= x2 <= x3 <= 1. */
template <class F>
std::complex<double> simplex3_quadrature(F&& f, unsigned n)
{
    const GaussRule g = gauss_legendre(n);
    std::complex<double> sum = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double x3 = g.x[i];
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double x2 = g.x[j] * x3;
            const double wij = g.w[i] * g.w[j] * x3 * x2;
            for (std::size_t k = 0; k < g.x.size(); ++k) sum += wij * g.w[k] * f(g.x[k] * x2, x2, x3);
        }
    }
    return sum;
}

/** @brief Tensor-product rule on 0 <= s <= t <= 1. */
template <class F>
std::complex<double> triangle_quadrature(F&& f, unsigned n)
{
    const GaussRule g = gauss_legendre(n);
    std::complex<double> sum = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double t = g.x[i];
        for (std::size_t j = 0; j < g.x.size(); ++j) sum += g.w[i] * g.w[j] * t * f(g.x[j] * t, t);
    }
    return sum;
}

} // namespace bethe3

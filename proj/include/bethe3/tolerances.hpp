#pragma once

namespace bethe3::tol {

inline constexpr double residual = 1e-12;
inline constexpr double identity = 1e-10;
inline constexpr double imag_part = 1e-10;
inline constexpr double degenerate_momenta = 1e-12;
inline constexpr double simplex_zero = 1e-10;
inline constexpr double simplex_near = 1e-6;
inline constexpr double bounds_slack = 1e-9;

inline constexpr int newton_max_iter = 100;
inline constexpr int newton_max_halvings = 40;
inline constexpr double fd_step = 1e-7;

} // namespace bethe3::tol

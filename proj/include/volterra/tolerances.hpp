#pragma once

namespace volterra::tol {

// Mass bookkeeping tolerance for simplex membership and per-step drift checks.
inline constexpr double mass = 1e-12;

// Dynamics flush threshold: coordinates below this collapse to exact zero.
inline constexpr double flush = 1e-300;

// Slack for monotonicity verdicts on compensated floating-point sums.
inline constexpr double slack = 1e-12;

} // namespace volterra::tol

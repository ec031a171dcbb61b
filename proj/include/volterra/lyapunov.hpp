#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "volterra/simplex.hpp"
#include "volterra/skew_matrix.hpp"
#include "volterra/volterra_operator.hpp"

namespace volterra {

// Tail behavior of a coefficient sequence past its explicit prefix.
enum class TailRule {
    Zero,      // b_k = 0
    Geometric, // b_k = 2^-k (absolute index)
    Constant,  // b_k = c
};

// Bounded coefficient sequence b = (b_1, b_2, ...) defining phi_b(x) = sum b_k x_k.
// The prefix-plus-rule representation makes order and limit properties exactly
// decidable instead of sampled.
class LinearFunctional {
public:
    LinearFunctional(std::vector<double> prefix, TailRule tail, double tail_constant = 0.0);

    double coefficient(Index k) const; // b_k
    const std::vector<double>& prefix() const { return prefix_; }
    TailRule tail_rule() const { return tail_; }
    double tail_constant() const { return c_; }

    double sup_norm() const { return sup_; }
    bool is_increasing() const { return increasing_; } // b_k <= b_{k+1} for all k
    bool is_decreasing() const { return decreasing_; } // b_k >= b_{k+1} for all k
    bool is_c0() const;                                // b_k -> 0
    bool is_nonneg() const { return nonneg_; }

    // Smallest rank R with |b_k| < eps for every k > R; nullopt when the tail
    // never drops below eps.
    std::optional<Index> vanishing_rank(double eps) const;

    Json descriptor() const;
    static LinearFunctional from_json(const Json& j);

private:
    std::vector<double> prefix_;
    TailRule tail_;
    double c_ = 0.0;
    double sup_ = 0.0;
    bool increasing_ = false;
    bool decreasing_ = false;
    bool nonneg_ = false;
    Json origin_; // factory descriptor, kept for faithful round-trips

    friend LinearFunctional make_bm(Index m);
    friend LinearFunctional make_bn_harmonic(Index n);
};

// phi_b(x), compensated, ascending index order.
double phi(const LinearFunctional& f, const SimplexPoint& x);

// Ones up to index m, then the geometric tail 2^-k.
LinearFunctional make_bm(Index m);

// 1/k up to index n, then zeros.
LinearFunctional make_bn_harmonic(Index n);

// Which monotonicity hypotheses the pair (b, matrix window) satisfies. Each
// flag is sufficient on its own for the stated trend of phi_b along orbits.
struct AdmissibilityReport {
    MatrixClass matrix_class;
    Index window = 0;
    // b_k a_ki <= 0 for every ordered pair k != i in the window: phi nonincreasing.
    bool sign_opposed_pairs = false;
    // Window class nonnegative (Aplus or Identity) and b increasing: phi nonincreasing.
    bool plus_with_increasing = false;
    // Window class nonpositive (Aminus or Identity) and b decreasing: phi nonincreasing.
    bool minus_with_decreasing = false;
    // Sign-definite window class, b decreasing and vanishing: phi trends away
    // from zero toward the orbit's limit (up for Aplus, down for Aminus).
    bool sign_definite_c0_decreasing = false;
};

AdmissibilityReport admissibility(const LinearFunctional& f, const SkewMatrix& m, Index scan_dim);

enum class MonotoneVerdict { Constant, Nonincreasing, Nondecreasing, Nonmonotone };

std::string to_string(MonotoneVerdict v);

struct MonotonicityReport {
    std::vector<double> values; // phi along the trajectory
    std::vector<double> deltas;
    bool nonincreasing = false; // every delta <= slack
    bool nondecreasing = false; // every delta >= -slack
    MonotoneVerdict verdict = MonotoneVerdict::Nonmonotone;
    double limit_estimate = 0.0; // last value
    double cauchy_width = 0.0;   // spread over the trailing tenth of the run
    double slack = 0.0;
};

MonotonicityReport monotonicity_report(const LinearFunctional& f, const Trajectory& t,
                                       double slack = tol::slack);

// Same classification for a value sequence computed elsewhere (e.g. streamed
// alongside a long run that never materializes its trajectory).
MonotonicityReport monotonicity_from_values(std::vector<double> values, double slack = tol::slack);

} // namespace volterra

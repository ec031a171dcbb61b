#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "volterra/simplex.hpp"
#include "volterra/volterra_operator.hpp"

namespace volterra {

// Which metric certifies convergence claims: the l1 norm, or the coordinate
// metric rho (pointwise convergence). On a fixed sphere with a limit on that
// sphere the two agree; rho alone can also witness mass escaping to ever
// higher indices, which the norm never sees.
enum class ConvergenceMode { Norm, Weak };

std::string to_string(ConvergenceMode mode);
ConvergenceMode mode_from_string(const std::string& s);

struct AnalysisBudget {
    std::uint64_t max_steps = 10000;
    double eps_conv = 1e-8;
    double eps_mass = 1e-3;
    // 0 picks the default: a tenth of max_steps, at least 2.
    std::uint64_t stability_window = 0;
    // Horizon for coordinate probes; watching mass leave this window is the
    // finite proxy for escape toward infinity.
    Index probe_dim = 32;
    // Checkpoint-to-checkpoint rho threshold for Cesaro averages.
    double eps_weak = 1e-4;

    std::uint64_t resolved_window() const;
    Json to_json() const;
    static AnalysisBudget from_json(const Json& j, const AnalysisBudget& defaults);
};

enum class OmegaKind {
    VertexLimit,   // trajectory stabilized at a vertex
    ZeroLimit,     // weak mode only: probed coordinates died while mass escaped
    PointOnSphere, // trajectory Cauchy with a stable limit estimate of mass r
    Undecided,
};

std::string to_string(OmegaKind kind);

struct MassTrendSample {
    std::uint64_t step = 0;
    double head_mass = 0.0; // mass on indices <= probe_dim
};

struct OmegaEvidence {
    std::uint64_t steps_used = 0;
    double final_l1 = 0.0;  // to the verdict's limit point
    double final_rho = 0.0;
    // First step of the final stretch at which each metric dropped below
    // eps_conv toward the verdict vertex; meaningful for VertexLimit.
    std::optional<std::uint64_t> first_step_l1_below;
    std::optional<std::uint64_t> first_step_rho_below;
    bool head_mass_monotone = true;
    std::vector<MassTrendSample> mass_trend;
};

struct OmegaEstimate {
    OmegaKind kind = OmegaKind::Undecided;
    ConvergenceMode mode = ConvergenceMode::Norm;
    std::optional<Index> vertex;
    SimplexPoint limit_point; // vertex, stable estimate, or the zero point
    double r_estimate = 0.0;  // mass of limit_point
    OmegaEvidence evidence;
    AnalysisBudget budget;
};

// Streams the orbit of x0 and reports where it is heading. VertexLimit is
// declared as soon as the requested metric stays below eps_conv toward a
// fixed vertex for a full stability window; the other verdicts are end-of-
// budget judgments. Norm mode never claims convergence to mass below one.
OmegaEstimate estimate_omega(const VolterraOperator& V, const SimplexPoint& x0,
                             ConvergenceMode mode, const AnalysisBudget& budget);

// Coordinate-wise average of x0, Vx0, ..., V^{n-1}x0 (compensated
// accumulation per coordinate).
SimplexPoint cesaro(const VolterraOperator& V, const SimplexPoint& x0, std::uint64_t n);

enum class NormErgodicVerdict { Ergodic, NonErgodic, Undecided };
enum class WeakErgodicVerdict { WeakErgodic, Undecided };

std::string to_string(NormErgodicVerdict v);
std::string to_string(WeakErgodicVerdict v);

struct ErgodicCheckpoint {
    std::uint64_t n = 0;
    SimplexPoint average;
    double stable_mass = 0.0; // mass of the average on the trajectory-stable set
    double rho_to_prev = 0.0; // zero for the first checkpoint
};

struct ErgodicReport {
    std::vector<ErgodicCheckpoint> checkpoints; // geometrically spaced n
    // Final average restricted to coordinates whose trajectory value is
    // stable and nonzero: the mass that has verifiably arrived somewhere.
    SimplexPoint weak_limit;
    double mass_of_weak_limit = 0.0;
    WeakErgodicVerdict weak_verdict = WeakErgodicVerdict::Undecided;
    NormErgodicVerdict norm_verdict = NormErgodicVerdict::Undecided;
    AnalysisBudget budget;
};

// Cesaro averages at geometric checkpoints. Weak-ergodic when successive
// averages are rho-close. Norm verdict: ergodic when the arrived mass reaches
// 1 - eps_mass, non-ergodic only when the arrived mass has stabilized
// strictly below that, undecided while it is still climbing.
ErgodicReport ergodicity_verdict(const VolterraOperator& V, const SimplexPoint& x0,
                                 const AnalysisBudget& budget);

struct SupportPairCheck {
    Index k = 0;
    Index i = 0;
    double smaller_value = 0.0;
    bool vanished = false; // min of the pair below eps
};

struct SupportPairReport {
    std::vector<SupportPairCheck> checks;
    bool all_vanished = true;
};

// For strictly coupled index pairs, a limit point cannot keep both
// coordinates: checks that at least one of each pair has (numerically)
// vanished in the estimated limit.
SupportPairReport check_support_pairs(const SimplexPoint& limit,
                                          const std::vector<std::pair<Index, Index>>& pairs,
                                          double eps);

// One step of the scalar comparison map xi -> xi (1 + alpha - alpha xi); for
// alpha < 0 it bounds the decay of head mass and has 0 as its only fixed
// point in [0, 1).
double logistic_step(double alpha, double xi);

// One truncated run of a sweep over the truncation dimension.
struct TruncationRun {
    Index truncation = 0;
    SimplexPoint final_average;
    double stable_mass = 0.0;
};

struct TruncationSweepReport {
    Index coord_probe = 0;
    bool coordinate_averages_decrease = false; // per fixed index, strictly in N
    bool stable_masses_decrease = false;
    // Both trends together: the finite-window averages sink as the truncation
    // grows, the signature of averages collapsing in the untruncated limit.
    bool extrapolates_non_ergodic = false;
};

// Runs must be ordered by strictly increasing truncation.
TruncationSweepReport analyze_truncation_sweep(const std::vector<TruncationRun>& runs,
                                               Index coord_probe);

} // namespace volterra

#pragma once

#include <cstdint>
#include <vector>

#include "volterra/simplex.hpp"
#include "volterra/skew_matrix.hpp"

namespace volterra {

// Quadratic operator (Vx)_k = x_k (1 + sum_i a_ki x_i) driven by a skew
// coefficient matrix. Holds a cached window classification of the matrix;
// immutable and shareable across threads.
class VolterraOperator {
public:
    explicit VolterraOperator(SkewMatrix m, Index class_window = 64);

    const SkewMatrix& matrix() const { return matrix_; }
    const MatrixClass& class_hint() const { return class_; }

private:
    SkewMatrix matrix_;
    MatrixClass class_;
};

struct ApplyOutcome {
    SimplexPoint next;
    std::vector<Index> flushed; // coordinates collapsed to exact zero this step
};

// One evolution step. The inner sum for each surviving coordinate runs over
// the support in ascending index order with compensated accumulation, skipping
// exact-zero coefficients (they contribute nothing, and skipping keeps block
// iteration bit-identical to joint iteration). Coordinates below the flush
// threshold collapse to exact zero. Throws NegativeCoordinateError if a
// coordinate lands below -tol::mass and MassDriftError if total mass moves by
// more than 10 * tol::mass; neither can happen for points on a sphere S_r with
// coefficients in [-1, 1] unless the inputs were already out of contract.
ApplyOutcome apply_step(const VolterraOperator& V, const SimplexPoint& x);

// apply_step without the flush report.
SimplexPoint apply(const VolterraOperator& V, const SimplexPoint& x);

struct StepDelta {
    double l1 = 0.0;
    double rho = 0.0;
};

struct FlushEvent {
    std::uint64_t step = 0; // step that produced the flush (1-based)
    Index index = 0;
};

struct Trajectory {
    std::vector<SimplexPoint> points; // steps + 1 entries, points[0] = x0
    std::vector<StepDelta> deltas;    // per-step displacement in both metrics
    std::uint64_t flush_count = 0;
    std::vector<FlushEvent> flush_events; // first few, capped

    const SimplexPoint& back() const { return points.back(); }
    std::uint64_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

Trajectory iterate(const VolterraOperator& V, const SimplexPoint& x0, std::uint64_t steps);

// Closed form for the cascade matrix constant(-1): the mass of the first m
// coordinates squares each step, so after n steps it is (mass_upto(m))^(2^n),
// evaluated here by repeated squaring. Independent of apply's code path.
double cascade_partial_sum_oracle(const SimplexPoint& x0, Index m, std::uint64_t n);

// Exact block split of a window-certified tilde operator: head block on
// indices below k0, tail re-indexed to start at 1. Iterating the parts and
// concatenating reproduces the joint iteration bit for bit, because the zero
// coupling terms are skipped rather than accumulated.
struct TildeDecomposition {
    Index k0 = 0;
    VolterraOperator head;
    SimplexPoint y0;
    double r1 = 0.0; // head mass
    VolterraOperator tail;
    SimplexPoint z0;
    double r2 = 0.0; // tail mass
};

TildeDecomposition decompose_tilde(const VolterraOperator& V, const SimplexPoint& x0);

// Stitches head/tail points back into the original indexing.
SimplexPoint concat_blocks(const SimplexPoint& head, const SimplexPoint& tail, Index k0);

} // namespace volterra

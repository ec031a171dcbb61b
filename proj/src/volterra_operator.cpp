#include "volterra/volterra_operator.hpp"

#include <cmath>
#include <string>

#include "volterra/kahan.hpp"

namespace volterra {

namespace {

constexpr std::size_t kFlushEventCap = 32;

} // namespace

VolterraOperator::VolterraOperator(SkewMatrix m, Index class_window)
    : matrix_(std::move(m)), class_(classify(matrix_, class_window)) {}

ApplyOutcome apply_step(const VolterraOperator& V, const SimplexPoint& x) {
    const SkewMatrix& m = V.matrix();
    const auto& coords = x.coords();

    ApplyOutcome out;
    std::vector<Coordinate> next;
    next.reserve(coords.size());

    for (const auto& ck : coords) {
        KahanAccumulator s;
        for (const auto& ci : coords) {
            if (ci.index == ck.index) continue;
            const double a = m.at(ck.index, ci.index);
            if (a == 0.0) continue;
            s += a * ci.value;
        }
        double v = ck.value * (1.0 + s.value());
        if (v < 0.0) {
            if (v < -tol::mass)
                throw NegativeCoordinateError("coordinate " + std::to_string(ck.index) +
                                              " fell to " + std::to_string(v));
            v = 0.0;
        }
        if (v < tol::flush) {
            out.flushed.push_back(ck.index);
            continue;
        }
        next.push_back({ck.index, v});
    }

    out.next = SimplexPoint::sparse(std::move(next));
    const double drift = std::fabs(out.next.mass() - x.mass());
    if (drift > 10.0 * tol::mass)
        throw MassDriftError("mass moved by " + std::to_string(drift) + " in one step");
    return out;
}

SimplexPoint apply(const VolterraOperator& V, const SimplexPoint& x) {
    return apply_step(V, x).next;
}

Trajectory iterate(const VolterraOperator& V, const SimplexPoint& x0, std::uint64_t steps) {
    Trajectory t;
    t.points.reserve(steps + 1);
    t.deltas.reserve(steps);
    t.points.push_back(x0);
    for (std::uint64_t n = 1; n <= steps; ++n) {
        ApplyOutcome step = apply_step(V, t.points.back());
        t.deltas.push_back({l1_distance(step.next, t.points.back()),
                            rho_distance(step.next, t.points.back())});
        t.flush_count += step.flushed.size();
        for (Index k : step.flushed) {
            if (t.flush_events.size() < kFlushEventCap) t.flush_events.push_back({n, k});
        }
        t.points.push_back(std::move(step.next));
    }
    return t;
}

double cascade_partial_sum_oracle(const SimplexPoint& x0, Index m, std::uint64_t n) {
    if (m == 0) throw InvalidRangeError("partial sum needs a positive cutoff index");
    double w = x0.mass_upto(m);
    for (std::uint64_t j = 0; j < n; ++j) w *= w;
    return w;
}

TildeDecomposition decompose_tilde(const VolterraOperator& V, const SimplexPoint& x0) {
    const MatrixClass& cls = V.class_hint();
    if (cls.tag != MatrixTag::TildePlus && cls.tag != MatrixTag::TildeMinus)
        throw NotTildeError("operator window class is " + to_string(cls.tag) +
                            ", not a block form");
    const Index k0 = cls.k0;

    // Head block materialized as an explicit table: the values are the same
    // doubles the joint operator sees, only the provenance changes.
    std::vector<SkewMatrix::TableEntry> head_entries;
    for (Index k = 1; k < k0; ++k) {
        for (Index i = k + 1; i < k0; ++i) {
            const double a = V.matrix().at(k, i);
            if (a != 0.0) head_entries.push_back({k, i, a});
        }
    }

    const Index head_window = std::max<Index>(2, k0 - 1);
    const Index tail_window =
        std::max<Index>(2, cls.scan_dim > (k0 - 1) ? cls.scan_dim - (k0 - 1) : 2);

    TildeDecomposition d{
        k0,
        VolterraOperator(SkewMatrix::table(head_entries), head_window),
        x0.head_slice(k0),
        0.0,
        VolterraOperator(SkewMatrix::shifted(V.matrix(), k0 - 1), tail_window),
        x0.tail_slice(k0),
        0.0,
    };
    d.r1 = d.y0.mass();
    d.r2 = d.z0.mass();
    return d;
}

SimplexPoint concat_blocks(const SimplexPoint& head, const SimplexPoint& tail, Index k0) {
    std::vector<Coordinate> coords;
    coords.reserve(head.support_size() + tail.support_size());
    for (const auto& c : head.coords()) {
        if (c.index >= k0) throw InvalidRangeError("head block reaches past the cut");
        coords.push_back(c);
    }
    for (const auto& c : tail.coords()) coords.push_back({c.index + k0 - 1, c.value});
    return SimplexPoint::sparse(std::move(coords));
}

} // namespace volterra

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "volterra/errors.hpp"
#include "volterra/tolerances.hpp"

namespace volterra {

// Project-wide JSON type; keeps object keys in insertion order so serialized
// output is stable and readable.
using Json = nlohmann::ordered_json;

// 1-based coordinate index into the infinite-dimensional simplex.
using Index = std::uint32_t;

// A JSON integer >= 0, whichever signedness the producer stored it with.
// Text parses store nonnegative integers unsigned; documents built in code
// usually carry plain ints.
inline bool json_uint(const Json& v) {
    return v.is_number_unsigned() ||
           (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

struct Coordinate {
    Index index = 0;
    double value = 0.0;

    bool operator==(const Coordinate&) const = default;
};

// Finitely supported point with nonnegative coordinates, stored in canonical
// form: indices strictly increasing, no explicit zeros. The default-constructed
// point is the zero point (empty support). Storage is permissive about total
// mass; membership of a specific sphere S_r is checked where an operation
// requires it, not at construction (renormalization legitimately passes
// through points of mass above one).
class SimplexPoint {
public:
    SimplexPoint() = default;

    // values[j] becomes coordinate j+1; zeros are dropped.
    static SimplexPoint dense(const std::vector<double>& values);

    // Canonicalizes: sorts by index, rejects duplicates, zero indices and
    // negative values, drops zeros.
    static SimplexPoint sparse(std::vector<Coordinate> coords);

    static SimplexPoint unit(Index k);
    static SimplexPoint uniform(Index lo, Index hi);

    // 2^-k on {1..n}, renormalized to mass one.
    static SimplexPoint geometric(Index n);

    const std::vector<Coordinate>& coords() const { return coords_; }
    double value_at(Index k) const;
    double mass() const { return mass_; }
    bool is_zero() const { return coords_.empty(); }
    std::size_t support_size() const { return coords_.size(); }
    std::vector<Index> support() const;

    Index min_support() const; // EmptySupportError on the zero point
    Index max_support() const;

    // Largest index with explicit storage; 0 for the zero point.
    Index dim() const { return coords_.empty() ? 0 : coords_.back().index; }

    // Index of the largest coordinate (smallest index wins ties).
    Index argmax() const;

    bool on_sphere(double r, double tolerance = tol::mass) const;

    // Strictly positive in every coordinate up to the declared ambient
    // dimension. Every finitely supported point fails this for a large enough
    // ambient dimension: such points sit on the boundary of the full simplex.
    bool interior_of(Index ambient_dim) const;

    SimplexPoint renormalized(double target_mass = 1.0) const;

    // Mass carried by indices <= m.
    double mass_upto(Index m) const;

    // Coordinates with index < k0, unchanged. Block-decomposition head.
    SimplexPoint head_slice(Index k0) const;

    // Coordinates with index >= k0, re-indexed so k0 becomes 1.
    SimplexPoint tail_slice(Index k0) const;

    bool operator==(const SimplexPoint&) const = default;

private:
    std::vector<Coordinate> coords_;
    double mass_ = 0.0;

    void recompute_mass();
};

// l1 norm of the difference, summed in ascending index order.
double l1_distance(const SimplexPoint& a, const SimplexPoint& b);

// sum_k 2^-k |a_k - b_k| / (1 + |a_k - b_k|). Metrizes pointwise convergence
// on norm-bounded sets; always below one.
double rho_distance(const SimplexPoint& a, const SimplexPoint& b);

// Distances to the vertex e_m without materializing it.
double l1_to_vertex(const SimplexPoint& x, Index m);
double rho_to_vertex(const SimplexPoint& x, Index m);

// Point literals: dense list [v1, v2, ...] or sparse map {"index": value}.
SimplexPoint point_from_json(const Json& j);
Json point_to_json(const SimplexPoint& x);

} // namespace volterra

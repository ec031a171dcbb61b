#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "volterra/simplex.hpp"

namespace volterra {

// Infinite skew-symmetric coefficient matrix with entries in [-1, 1],
// realized as a pure function of (k, i). Antisymmetry and the zero diagonal
// hold by construction: only the strict upper triangle is ever generated, the
// rest is derived. Instances are immutable and safe to share across threads.
class SkewMatrix {
public:
    // a_ki = c for all k < i. The cascade matrix is constant(-1).
    static SkewMatrix constant(double c);

    // Upper-triangle entries drawn strictly inside (lo, hi), each a pure
    // function of (seed, k, i) through a counter-based hash: no stream state,
    // identical values for identical triples everywhere.
    static SkewMatrix random_uniform(std::uint64_t seed, double lo, double hi);

    // Explicit entries; unlisted pairs are zero. Entries may be given in
    // either orientation and are normalized to the upper triangle.
    struct TableEntry {
        Index k = 0;
        Index i = 0;
        double value = 0.0;
    };
    static SkewMatrix table(const std::vector<TableEntry>& entries);

    // Block form: finite head block A (square, row-major, including the
    // diagonal) on indices below k0 = A.size() + 1, tail matrix B re-indexed
    // to start at k0, zero coupling between the blocks.
    static SkewMatrix tilde(const std::vector<std::vector<double>>& head, SkewMatrix tail);

    // View of base with indices shifted: at(k, i) = base.at(k + offset, i + offset).
    static SkewMatrix shifted(SkewMatrix base, Index offset);

    // Full antisymmetric lookup; indices are 1-based, at(k, k) == 0.
    double at(Index k, Index i) const;

    Json descriptor() const;
    static SkewMatrix from_json(const Json& j);

private:
    struct Constant {
        double c;
    };
    struct Random {
        std::uint64_t seed;
        double lo;
        double hi;
    };
    struct Table {
        std::vector<TableEntry> entries; // normalized k < i, sorted, unique
    };
    struct Tilde {
        std::vector<std::vector<double>> head;
        std::shared_ptr<const SkewMatrix> tail;
        Index k0;
    };
    struct Shift {
        std::shared_ptr<const SkewMatrix> base;
        Index offset;
    };

    using Source = std::variant<Constant, Random, Table, Tilde, Shift>;
    Source source_;

    explicit SkewMatrix(Source s) : source_(std::move(s)) {}

    // Requires k < i.
    double upper(Index k, Index i) const;
};

enum class MatrixTag {
    Identity,   // all entries zero
    Aplus,      // upper triangle nonnegative
    Aminus,     // upper triangle nonpositive
    TildePlus,  // zero coupling below k0, nonnegative tail block
    TildeMinus, // zero coupling below k0, nonpositive tail block
    General,
};

std::string to_string(MatrixTag tag);

struct ProbedEntry {
    Index k = 0;
    Index i = 0;
    double value = 0.0;
};

struct MatrixClass {
    MatrixTag tag = MatrixTag::General;
    Index k0 = 0;       // head size + 1 for the tilde tags, otherwise 0
    Index scan_dim = 0; // window the certificate covers
    std::vector<ProbedEntry> certificate;
};

// Scans the window k < i <= scan_dim and returns the most specific tag the
// window supports (Identity beats Aplus/Aminus, which beat the tilde tags,
// which beat General). For tilde tags k0 is minimal, at least 2, and
// TildePlus wins when a zero tail block satisfies both sign patterns. The
// verdict is a certificate about the window only; entries beyond it are
// deliberately not consulted.
MatrixClass classify(const SkewMatrix& m, Index scan_dim);

// Random spot checks of antisymmetry, zero diagonal and the entry bound;
// returns false and fills witness on the first violated probe.
bool spot_check_skew(const SkewMatrix& m, Index dim, std::uint64_t seed, std::size_t probes,
                     ProbedEntry* witness = nullptr);

} // namespace volterra

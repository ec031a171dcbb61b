#include "volterra/skew_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/hashing.hpp"

namespace volterra {

namespace {

void check_entry_bound(double v, const char* what) {
    if (!std::isfinite(v) || std::fabs(v) > 1.0)
        throw InvalidRangeError(std::string(what) + " must lie in [-1, 1]");
}

} // namespace

SkewMatrix SkewMatrix::constant(double c) {
    check_entry_bound(c, "constant coefficient");
    return SkewMatrix(Source{Constant{c}});
}

SkewMatrix SkewMatrix::random_uniform(std::uint64_t seed, double lo, double hi) {
    if (!(lo >= -1.0 && lo <= hi && hi <= 1.0))
        throw InvalidRangeError("random range must satisfy -1 <= lo <= hi <= 1");
    return SkewMatrix(Source{Random{seed, lo, hi}});
}

SkewMatrix SkewMatrix::table(const std::vector<TableEntry>& entries) {
    std::vector<TableEntry> normalized;
    normalized.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.k == 0 || e.i == 0) throw InvalidRangeError("table indices must be positive");
        if (e.k == e.i) throw NotSkewError("table entry on the diagonal");
        check_entry_bound(e.value, "table entry");
        if (e.k < e.i)
            normalized.push_back(e);
        else
            normalized.push_back({e.i, e.k, -e.value});
    }
    std::sort(normalized.begin(), normalized.end(), [](const TableEntry& a, const TableEntry& b) {
        return a.k != b.k ? a.k < b.k : a.i < b.i;
    });
    std::vector<TableEntry> unique;
    for (const auto& e : normalized) {
        if (!unique.empty() && unique.back().k == e.k && unique.back().i == e.i) {
            if (unique.back().value != e.value)
                throw NotSkewError("conflicting table entries for one index pair");
            continue;
        }
        if (e.value != 0.0) unique.push_back(e);
    }
    return SkewMatrix(Source{Table{std::move(unique)}});
}

SkewMatrix SkewMatrix::tilde(const std::vector<std::vector<double>>& head, SkewMatrix tail) {
    if (head.empty()) throw InvalidRangeError("tilde head block must be nonempty");
    const std::size_t n = head.size();
    for (const auto& row : head) {
        if (row.size() != n) throw InvalidRangeError("tilde head block must be square");
        for (double v : row) check_entry_bound(v, "tilde head entry");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (head[k][k] != 0.0) throw NotSkewError("tilde head diagonal must be zero");
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::fabs(head[k][i] + head[i][k]) > 1e-15)
                throw NotSkewError("tilde head block is not antisymmetric");
        }
    }
    return SkewMatrix(Source{Tilde{head, std::make_shared<const SkewMatrix>(std::move(tail)),
                                   static_cast<Index>(n + 1)}});
}

SkewMatrix SkewMatrix::shifted(SkewMatrix base, Index offset) {
    return SkewMatrix(Source{Shift{std::make_shared<const SkewMatrix>(std::move(base)), offset}});
}

double SkewMatrix::upper(Index k, Index i) const {
    struct Visitor {
        Index k;
        Index i;

        double operator()(const Constant& s) const { return s.c; }
        double operator()(const Random& s) const {
            if (s.lo == s.hi) return s.lo;
            return s.lo + (s.hi - s.lo) * unit_open(counter_hash(s.seed, k, i));
        }
        double operator()(const Table& s) const {
            auto it = std::lower_bound(s.entries.begin(), s.entries.end(), std::make_pair(k, i),
                                       [](const TableEntry& e, const std::pair<Index, Index>& p) {
                                           return e.k != p.first ? e.k < p.first : e.i < p.second;
                                       });
            if (it != s.entries.end() && it->k == k && it->i == i) return it->value;
            return 0.0;
        }
        double operator()(const Tilde& s) const {
            if (i < s.k0) return s.head[k - 1][i - 1];
            if (k < s.k0) return 0.0; // zero coupling between the blocks
            return s.tail->at(k - s.k0 + 1, i - s.k0 + 1);
        }
        double operator()(const Shift& s) const { return s.base->at(k + s.offset, i + s.offset); }
    };
    return std::visit(Visitor{k, i}, source_);
}

double SkewMatrix::at(Index k, Index i) const {
    if (k == 0 || i == 0) throw InvalidRangeError("matrix indices must be positive");
    if (k == i) return 0.0;
    if (k < i) return upper(k, i);
    return -upper(i, k);
}

Json SkewMatrix::descriptor() const {
    struct Visitor {
        Json operator()(const SkewMatrix::Constant& s) const {
            return Json{{"kind", "constant"}, {"c", s.c}};
        }
        Json operator()(const SkewMatrix::Random& s) const {
            return Json{{"kind", "random"}, {"seed", s.seed}, {"lo", s.lo}, {"hi", s.hi}};
        }
        Json operator()(const SkewMatrix::Table& s) const {
            auto entries = Json::array();
            for (const auto& e : s.entries) entries.push_back(Json::array({e.k, e.i, e.value}));
            return Json{{"kind", "table"}, {"entries", entries}};
        }
        Json operator()(const SkewMatrix::Tilde& s) const {
            auto head = Json::array();
            for (const auto& row : s.head) head.push_back(row);
            return Json{{"kind", "tilde"}, {"A", head}, {"B", s.tail->descriptor()}};
        }
        Json operator()(const SkewMatrix::Shift& s) const {
            return Json{{"kind", "shift"}, {"offset", s.offset}, {"base", s.base->descriptor()}};
        }
    };
    return std::visit(Visitor{}, source_);
}

SkewMatrix SkewMatrix::from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("matrix descriptor must be an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "constant") {
            if (!j.contains("c") || !j["c"].is_number())
                throw ConfigError("constant matrix descriptor needs numeric \"c\"");
            return constant(j["c"].get<double>());
        }
        if (kind == "random") {
            for (const char* field : {"seed", "lo", "hi"}) {
                if (!j.contains(field) || !j[field].is_number())
                    throw ConfigError(std::string("random matrix descriptor needs numeric \"") +
                                      field + "\"");
            }
            return random_uniform(j["seed"].get<std::uint64_t>(), j["lo"].get<double>(),
                                  j["hi"].get<double>());
        }
        if (kind == "table") {
            if (!j.contains("entries") || !j["entries"].is_array())
                throw ConfigError("table matrix descriptor needs an \"entries\" array");
            std::vector<TableEntry> entries;
            for (const auto& row : j["entries"]) {
                if (!row.is_array() || row.size() != 3 || !json_uint(row[0]) ||
                    !json_uint(row[1]) || !row[2].is_number())
                    throw ConfigError("table entries must be [k, i, value] triples");
                entries.push_back({row[0].get<Index>(), row[1].get<Index>(), row[2].get<double>()});
            }
            return table(entries);
        }
        if (kind == "tilde") {
            if (!j.contains("A") || !j["A"].is_array() || !j.contains("B"))
                throw ConfigError("tilde matrix descriptor needs \"A\" (rows) and \"B\" (descriptor)");
            std::vector<std::vector<double>> head;
            for (const auto& row : j["A"]) {
                if (!row.is_array()) throw ConfigError("tilde head rows must be arrays");
                head.push_back(row.get<std::vector<double>>());
            }
            return tilde(head, from_json(j["B"]));
        }
        if (kind == "shift") {
            if (!j.contains("offset") || !json_uint(j["offset"]) || !j.contains("base"))
                throw ConfigError("shift matrix descriptor needs \"offset\" and \"base\"");
            return shifted(from_json(j["base"]), j["offset"].get<Index>());
        }
    } catch (const InvalidRangeError& e) {
        throw ConfigError(std::string("invalid matrix descriptor: ") + e.what());
    } catch (const NotSkewError& e) {
        throw ConfigError(std::string("invalid matrix descriptor: ") + e.what());
    }
    throw ConfigError("unknown matrix kind \"" + kind + "\"");
}

std::string to_string(MatrixTag tag) {
    switch (tag) {
        case MatrixTag::Identity: return "Identity";
        case MatrixTag::Aplus: return "Aplus";
        case MatrixTag::Aminus: return "Aminus";
        case MatrixTag::TildePlus: return "TildePlus";
        case MatrixTag::TildeMinus: return "TildeMinus";
        case MatrixTag::General: return "General";
    }
    return "General";
}

MatrixClass classify(const SkewMatrix& m, Index scan_dim) {
    if (scan_dim < 2) throw InvalidRangeError("classification window must cover at least 2 indices");
    const Index d = scan_dim;

    // Materialize the window's upper triangle once; everything below is
    // index arithmetic on this buffer.
    std::vector<std::vector<double>> a(d);
    for (Index k = 1; k <= d; ++k) {
        a[k - 1].resize(d - k);
        for (Index i = k + 1; i <= d; ++i) a[k - 1][i - k - 1] = m.at(k, i);
    }
    auto entry = [&](Index k, Index i) { return a[k - 1][i - k - 1]; };

    // Largest column holding a nonzero in row k (0 if none); bounds the
    // feasible cut points for the zero-coupling rectangle.
    std::vector<Index> row_max_nonzero(d + 1, 0);
    bool all_zero = true;
    for (Index k = 1; k <= d; ++k) {
        for (Index i = k + 1; i <= d; ++i) {
            if (entry(k, i) != 0.0) {
                row_max_nonzero[k] = i;
                all_zero = false;
            }
        }
    }

    // nonneg_from[k0] / nonpos_from[k0]: sign condition on the block
    // k0 <= k < i <= d, computed by suffix recursion.
    std::vector<char> nonneg_from(d + 2, 1);
    std::vector<char> nonpos_from(d + 2, 1);
    for (Index k0 = d; k0 >= 1; --k0) {
        bool nn = nonneg_from[k0 + 1];
        bool np = nonpos_from[k0 + 1];
        for (Index i = k0 + 1; i <= d && (nn || np); ++i) {
            const double v = entry(k0, i);
            if (v < 0.0) nn = false;
            if (v > 0.0) np = false;
        }
        nonneg_from[k0] = nn;
        nonpos_from[k0] = np;
        if (k0 == 1) break;
    }

    MatrixClass result;
    result.scan_dim = d;

    auto push_probe = [&](Index k, Index i) {
        if (result.certificate.size() < 8) result.certificate.push_back({k, i, entry(k, i)});
    };

    if (all_zero) {
        result.tag = MatrixTag::Identity;
        push_probe(1, 2);
        push_probe(1, d);
        if (d > 2) push_probe(d - 1, d);
        return result;
    }

    auto extreme_probes = [&](Index from) {
        Index min_k = from, min_i = from + 1, max_k = from, max_i = from + 1;
        for (Index k = from; k <= d; ++k) {
            for (Index i = k + 1; i <= d; ++i) {
                if (entry(k, i) < entry(min_k, min_i)) { min_k = k; min_i = i; }
                if (entry(k, i) > entry(max_k, max_i)) { max_k = k; max_i = i; }
            }
        }
        push_probe(min_k, min_i);
        if (max_k != min_k || max_i != min_i) push_probe(max_k, max_i);
    };

    if (nonneg_from[1]) {
        result.tag = MatrixTag::Aplus;
        extreme_probes(1);
        return result;
    }
    if (nonpos_from[1]) {
        result.tag = MatrixTag::Aminus;
        extreme_probes(1);
        return result;
    }

    // Minimal cut k0 >= 2 with a zero coupling rectangle above it and a
    // sign-definite block from it on. The rectangle is empty exactly when no
    // row above the cut carries a nonzero at or past it.
    Index prefix_max_nonzero = 0;
    for (Index k0 = 2; k0 <= d; ++k0) {
        prefix_max_nonzero = std::max(prefix_max_nonzero, row_max_nonzero[k0 - 1]);
        if (prefix_max_nonzero >= k0) continue;
        if (nonneg_from[k0] || nonpos_from[k0]) {
            result.tag = nonneg_from[k0] ? MatrixTag::TildePlus : MatrixTag::TildeMinus;
            result.k0 = k0;
            // Witnesses: a nonzero head entry, the empty coupling corner, a
            // tail extreme.
            for (Index k = 1; k < k0 && result.certificate.empty(); ++k) {
                for (Index i = k + 1; i < k0; ++i) {
                    if (entry(k, i) != 0.0) {
                        push_probe(k, i);
                        break;
                    }
                }
            }
            push_probe(1, k0);
            if (k0 < d) extreme_probes(k0);
            return result;
        }
    }

    result.tag = MatrixTag::General;
    // Witness one entry of each sign; both exist here.
    bool want_pos = true, want_neg = true;
    for (Index k = 1; k <= d && (want_pos || want_neg); ++k) {
        for (Index i = k + 1; i <= d && (want_pos || want_neg); ++i) {
            const double v = entry(k, i);
            if (v > 0.0 && want_pos) {
                push_probe(k, i);
                want_pos = false;
            } else if (v < 0.0 && want_neg) {
                push_probe(k, i);
                want_neg = false;
            }
        }
    }
    return result;
}

bool spot_check_skew(const SkewMatrix& m, Index dim, std::uint64_t seed, std::size_t probes,
                     ProbedEntry* witness) {
    SplitMixRng rng(seed);
    for (std::size_t t = 0; t < probes; ++t) {
        const Index k = static_cast<Index>(rng.next_below(dim) + 1);
        const Index i = static_cast<Index>(rng.next_below(dim) + 1);
        const double v = m.at(k, i);
        const bool bad = (k == i && v != 0.0) || std::fabs(v) > 1.0 || (v + m.at(i, k) != 0.0);
        if (bad) {
            if (witness) *witness = {k, i, v};
            return false;
        }
    }
    return true;
}

} // namespace volterra

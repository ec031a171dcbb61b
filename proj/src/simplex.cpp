#include "volterra/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volterra/kahan.hpp"

namespace volterra {

namespace {

// 2^-k, exact down to the subnormal floor, then exactly zero.
double pow2neg(Index k) {
    return std::ldexp(1.0, -static_cast<int>(k));
}

double rho_term(Index k, double diff) {
    const double d = std::fabs(diff);
    return pow2neg(k) * (d / (1.0 + d));
}

} // namespace

void SimplexPoint::recompute_mass() {
    KahanAccumulator acc;
    for (const auto& c : coords_) acc += c.value;
    mass_ = acc.value();
}

SimplexPoint SimplexPoint::dense(const std::vector<double>& values) {
    std::vector<Coordinate> coords;
    coords.reserve(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] != 0.0) coords.push_back({static_cast<Index>(j + 1), values[j]});
    }
    return sparse(std::move(coords));
}

SimplexPoint SimplexPoint::sparse(std::vector<Coordinate> coords) {
    std::sort(coords.begin(), coords.end(),
              [](const Coordinate& a, const Coordinate& b) { return a.index < b.index; });
    SimplexPoint x;
    x.coords_.reserve(coords.size());
    for (const auto& c : coords) {
        if (c.index == 0) throw InvalidRangeError("coordinate index must be positive");
        if (!std::isfinite(c.value)) throw InvalidRangeError("coordinate value must be finite");
        if (c.value < 0.0) throw InvalidRangeError("coordinate value must be nonnegative");
        if (!x.coords_.empty() && x.coords_.back().index == c.index)
            throw InvalidRangeError("duplicate coordinate index");
        if (c.value != 0.0) x.coords_.push_back(c);
    }
    x.recompute_mass();
    return x;
}

SimplexPoint SimplexPoint::unit(Index k) {
    return sparse({{k, 1.0}});
}

SimplexPoint SimplexPoint::uniform(Index lo, Index hi) {
    if (lo == 0 || hi < lo) throw InvalidRangeError("uniform support range is empty");
    std::vector<Coordinate> coords;
    const double v = 1.0 / static_cast<double>(hi - lo + 1);
    for (Index k = lo; k <= hi; ++k) coords.push_back({k, v});
    return sparse(std::move(coords));
}

SimplexPoint SimplexPoint::geometric(Index n) {
    if (n == 0) throw InvalidRangeError("geometric support is empty");
    std::vector<Coordinate> coords;
    for (Index k = 1; k <= n; ++k) coords.push_back({k, pow2neg(k)});
    return sparse(std::move(coords)).renormalized(1.0);
}

double SimplexPoint::value_at(Index k) const {
    auto it = std::lower_bound(coords_.begin(), coords_.end(), k,
                               [](const Coordinate& c, Index idx) { return c.index < idx; });
    if (it != coords_.end() && it->index == k) return it->value;
    return 0.0;
}

std::vector<Index> SimplexPoint::support() const {
    std::vector<Index> idx;
    idx.reserve(coords_.size());
    for (const auto& c : coords_) idx.push_back(c.index);
    return idx;
}

Index SimplexPoint::min_support() const {
    if (coords_.empty()) throw EmptySupportError("zero point has no support");
    return coords_.front().index;
}

Index SimplexPoint::max_support() const {
    if (coords_.empty()) throw EmptySupportError("zero point has no support");
    return coords_.back().index;
}

Index SimplexPoint::argmax() const {
    if (coords_.empty()) throw EmptySupportError("zero point has no support");
    Index best = coords_.front().index;
    double best_value = coords_.front().value;
    for (const auto& c : coords_) {
        if (c.value > best_value) {
            best_value = c.value;
            best = c.index;
        }
    }
    return best;
}

bool SimplexPoint::on_sphere(double r, double tolerance) const {
    return std::fabs(mass_ - r) <= tolerance;
}

bool SimplexPoint::interior_of(Index ambient_dim) const {
    if (coords_.size() < ambient_dim) return false;
    for (Index k = 0; k < ambient_dim; ++k) {
        if (coords_[k].index != k + 1) return false;
    }
    return true;
}

SimplexPoint SimplexPoint::renormalized(double target_mass) const {
    if (target_mass <= 0.0 || !std::isfinite(target_mass))
        throw InvalidRangeError("renormalization target must be positive and finite");
    if (mass_ == 0.0) throw ZeroMassError("cannot renormalize the zero point");
    SimplexPoint out;
    out.coords_ = coords_;
    const double scale = target_mass / mass_;
    for (auto& c : out.coords_) c.value *= scale;
    out.recompute_mass();
    return out;
}

double SimplexPoint::mass_upto(Index m) const {
    KahanAccumulator acc;
    for (const auto& c : coords_) {
        if (c.index > m) break;
        acc += c.value;
    }
    return acc.value();
}

SimplexPoint SimplexPoint::head_slice(Index k0) const {
    SimplexPoint out;
    for (const auto& c : coords_) {
        if (c.index >= k0) break;
        out.coords_.push_back(c);
    }
    out.recompute_mass();
    return out;
}

SimplexPoint SimplexPoint::tail_slice(Index k0) const {
    if (k0 == 0) throw InvalidRangeError("tail slice needs a positive start index");
    SimplexPoint out;
    for (const auto& c : coords_) {
        if (c.index < k0) continue;
        out.coords_.push_back({c.index - k0 + 1, c.value});
    }
    out.recompute_mass();
    return out;
}

// Merge walk over two sorted supports; visit(k, a_k, b_k) in ascending k.
template <typename Visit>
static void merge_coords(const SimplexPoint& a, const SimplexPoint& b, Visit visit) {
    const auto& ca = a.coords();
    const auto& cb = b.coords();
    std::size_t ja = 0;
    std::size_t jb = 0;
    while (ja < ca.size() || jb < cb.size()) {
        if (jb == cb.size() || (ja < ca.size() && ca[ja].index < cb[jb].index)) {
            visit(ca[ja].index, ca[ja].value, 0.0);
            ++ja;
        } else if (ja == ca.size() || cb[jb].index < ca[ja].index) {
            visit(cb[jb].index, 0.0, cb[jb].value);
            ++jb;
        } else {
            visit(ca[ja].index, ca[ja].value, cb[jb].value);
            ++ja;
            ++jb;
        }
    }
}

double l1_distance(const SimplexPoint& a, const SimplexPoint& b) {
    KahanAccumulator acc;
    merge_coords(a, b, [&](Index, double va, double vb) { acc += std::fabs(va - vb); });
    return acc.value();
}

double rho_distance(const SimplexPoint& a, const SimplexPoint& b) {
    KahanAccumulator acc;
    merge_coords(a, b, [&](Index k, double va, double vb) { acc += rho_term(k, va - vb); });
    return acc.value();
}

double l1_to_vertex(const SimplexPoint& x, Index m) {
    KahanAccumulator acc;
    bool seen = false;
    for (const auto& c : x.coords()) {
        if (c.index == m) {
            acc += std::fabs(c.value - 1.0);
            seen = true;
        } else {
            acc += c.value;
        }
    }
    if (!seen) acc += 1.0;
    return acc.value();
}

double rho_to_vertex(const SimplexPoint& x, Index m) {
    KahanAccumulator acc;
    bool seen = false;
    for (const auto& c : x.coords()) {
        if (c.index == m) {
            acc += rho_term(m, c.value - 1.0);
            seen = true;
        } else {
            acc += rho_term(c.index, c.value);
        }
    }
    if (!seen) acc += rho_term(m, 1.0);
    return acc.value();
}

SimplexPoint point_from_json(const Json& j) {
    if (j.is_array()) {
        std::vector<double> values;
        values.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError("dense point literal entries must be numbers");
            values.push_back(v.get<double>());
        }
        try {
            return SimplexPoint::dense(values);
        } catch (const InvalidRangeError& e) {
            throw ConfigError(std::string("invalid point literal: ") + e.what());
        }
    }
    if (j.is_object()) {
        std::vector<Coordinate> coords;
        for (const auto& [key, v] : j.items()) {
            if (!v.is_number()) throw ConfigError("sparse point literal values must be numbers");
            std::size_t pos = 0;
            unsigned long idx = 0;
            try {
                idx = std::stoul(key, &pos);
            } catch (const std::exception&) {
                throw ConfigError("sparse point literal key is not an index: \"" + key + "\"");
            }
            if (pos != key.size() || idx == 0 || idx > std::numeric_limits<Index>::max())
                throw ConfigError("sparse point literal key is not an index: \"" + key + "\"");
            coords.push_back({static_cast<Index>(idx), v.get<double>()});
        }
        try {
            return SimplexPoint::sparse(std::move(coords));
        } catch (const InvalidRangeError& e) {
            throw ConfigError(std::string("invalid point literal: ") + e.what());
        }
    }
    throw ConfigError("point literal must be a dense list or a sparse {\"index\": value} map");
}

Json point_to_json(const SimplexPoint& x) {
    // Contiguous support starting at 1 serializes densely, everything else as
    // a sparse map; both shapes parse back to the same canonical point.
    if (!x.is_zero() && x.dim() == x.support_size()) {
        auto arr = Json::array();
        for (const auto& c : x.coords()) arr.push_back(c.value);
        return arr;
    }
    auto obj = Json::object();
    for (const auto& c : x.coords()) obj[std::to_string(c.index)] = c.value;
    return obj;
}

} // namespace volterra

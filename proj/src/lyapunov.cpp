#include "volterra/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "volterra/kahan.hpp"

namespace volterra {

namespace {

double pow2neg(Index k) {
    return std::ldexp(1.0, -static_cast<int>(k));
}

} // namespace

LinearFunctional::LinearFunctional(std::vector<double> prefix, TailRule tail, double tail_constant)
    : prefix_(std::move(prefix)), tail_(tail), c_(tail_constant) {
    for (double v : prefix_) {
        if (!std::isfinite(v)) throw InvalidRangeError("functional coefficients must be finite");
    }
    if (!std::isfinite(c_)) throw InvalidRangeError("functional tail constant must be finite");
    if (tail_ != TailRule::Constant) c_ = 0.0;

    bool nondecr = true;
    bool nonincr = true;
    nonneg_ = true;
    sup_ = 0.0;
    for (std::size_t j = 0; j < prefix_.size(); ++j) {
        sup_ = std::max(sup_, std::fabs(prefix_[j]));
        if (prefix_[j] < 0.0) nonneg_ = false;
        if (j + 1 < prefix_.size()) {
            if (prefix_[j] > prefix_[j + 1]) nondecr = false;
            if (prefix_[j] < prefix_[j + 1]) nonincr = false;
        }
    }

    const double joint = prefix_.empty() ? 0.0 : prefix_.back();
    switch (tail_) {
        case TailRule::Zero:
            increasing_ = nondecr && (prefix_.empty() || joint <= 0.0);
            decreasing_ = nonincr && (prefix_.empty() || joint >= 0.0);
            break;
        case TailRule::Geometric: {
            const double first_tail = pow2neg(static_cast<Index>(prefix_.size() + 1));
            increasing_ = false; // the geometric tail strictly decreases
            decreasing_ = nonincr && (prefix_.empty() || joint >= first_tail);
            sup_ = std::max(sup_, first_tail);
            break;
        }
        case TailRule::Constant:
            increasing_ = nondecr && (prefix_.empty() || joint <= c_);
            decreasing_ = nonincr && (prefix_.empty() || joint >= c_);
            if (c_ < 0.0) nonneg_ = false;
            sup_ = std::max(sup_, std::fabs(c_));
            break;
    }
}

double LinearFunctional::coefficient(Index k) const {
    if (k == 0) throw InvalidRangeError("coefficient index must be positive");
    if (k <= prefix_.size()) return prefix_[k - 1];
    switch (tail_) {
        case TailRule::Zero: return 0.0;
        case TailRule::Geometric: return pow2neg(k);
        case TailRule::Constant: return c_;
    }
    return 0.0;
}

bool LinearFunctional::is_c0() const {
    return tail_ != TailRule::Constant || c_ == 0.0;
}

std::optional<Index> LinearFunctional::vanishing_rank(double eps) const {
    if (eps <= 0.0) throw InvalidRangeError("vanishing rank threshold must be positive");
    Index rank = 0;
    switch (tail_) {
        case TailRule::Zero:
            break;
        case TailRule::Constant:
            if (std::fabs(c_) >= eps) return std::nullopt;
            break;
        case TailRule::Geometric: {
            // Smallest R with 2^-k < eps for all k > R.
            Index r = 0;
            while (pow2neg(r + 1) >= eps) ++r;
            if (r > prefix_.size()) rank = r;
            break;
        }
    }
    for (Index k = static_cast<Index>(prefix_.size()); k >= 1; --k) {
        if (std::fabs(prefix_[k - 1]) >= eps) {
            rank = std::max(rank, k);
            break;
        }
    }
    return rank;
}

double phi(const LinearFunctional& f, const SimplexPoint& x) {
    KahanAccumulator acc;
    for (const auto& c : x.coords()) acc += f.coefficient(c.index) * c.value;
    return acc.value();
}

LinearFunctional make_bm(Index m) {
    if (m == 0) throw InvalidRangeError("ones prefix must be nonempty");
    LinearFunctional f(std::vector<double>(m, 1.0), TailRule::Geometric);
    f.origin_ = Json{{"kind", "bm"}, {"m", m}};
    return f;
}

LinearFunctional make_bn_harmonic(Index n) {
    if (n == 0) throw InvalidRangeError("harmonic prefix must be nonempty");
    std::vector<double> prefix(n);
    for (Index k = 1; k <= n; ++k) prefix[k - 1] = 1.0 / static_cast<double>(k);
    LinearFunctional f(std::move(prefix), TailRule::Zero);
    f.origin_ = Json{{"kind", "harmonic"}, {"n", n}};
    return f;
}

Json LinearFunctional::descriptor() const {
    if (!origin_.is_null()) return origin_;
    Json tail;
    switch (tail_) {
        case TailRule::Zero: tail = Json{{"rule", "zero"}}; break;
        case TailRule::Geometric: tail = Json{{"rule", "geometric"}}; break;
        case TailRule::Constant: tail = Json{{"rule", "constant"}, {"c", c_}}; break;
    }
    return Json{{"kind", "prefix"}, {"values", prefix_}, {"tail", tail}};
}

LinearFunctional LinearFunctional::from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("functional descriptor must be an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "bm") {
            if (!j.contains("m") || !json_uint(j["m"]) || j["m"].get<Index>() == 0)
                throw ConfigError("bm functional descriptor needs a positive \"m\"");
            return make_bm(j["m"].get<Index>());
        }
        if (kind == "harmonic") {
            if (!j.contains("n") || !json_uint(j["n"]) || j["n"].get<Index>() == 0)
                throw ConfigError("harmonic functional descriptor needs a positive \"n\"");
            return make_bn_harmonic(j["n"].get<Index>());
        }
        if (kind == "prefix") {
            if (!j.contains("values") || !j["values"].is_array())
                throw ConfigError("prefix functional descriptor needs a \"values\" array");
            std::vector<double> values;
            for (const auto& v : j["values"]) {
                if (!v.is_number()) throw ConfigError("prefix values must be numbers");
                values.push_back(v.get<double>());
            }
            if (!j.contains("tail") || !j["tail"].is_object() || !j["tail"].contains("rule") ||
                !j["tail"]["rule"].is_string())
                throw ConfigError("prefix functional descriptor needs a tail {\"rule\": ...}");
            const std::string rule = j["tail"]["rule"].get<std::string>();
            if (rule == "zero") return LinearFunctional(std::move(values), TailRule::Zero);
            if (rule == "geometric") return LinearFunctional(std::move(values), TailRule::Geometric);
            if (rule == "constant") {
                if (!j["tail"].contains("c") || !j["tail"]["c"].is_number())
                    throw ConfigError("constant tail needs numeric \"c\"");
                return LinearFunctional(std::move(values), TailRule::Constant,
                                        j["tail"]["c"].get<double>());
            }
            throw ConfigError("unknown tail rule \"" + rule + "\"");
        }
    } catch (const InvalidRangeError& e) {
        throw ConfigError(std::string("invalid functional descriptor: ") + e.what());
    }
    throw ConfigError("unknown functional kind \"" + kind + "\"");
}

AdmissibilityReport admissibility(const LinearFunctional& f, const SkewMatrix& m, Index scan_dim) {
    AdmissibilityReport report;
    report.matrix_class = classify(m, scan_dim);
    report.window = scan_dim;

    bool opposed = true;
    for (Index k = 1; k <= scan_dim && opposed; ++k) {
        const double bk = f.coefficient(k);
        if (bk == 0.0) continue;
        for (Index i = 1; i <= scan_dim; ++i) {
            if (i == k) continue;
            if (bk * m.at(k, i) > 0.0) {
                opposed = false;
                break;
            }
        }
    }
    report.sign_opposed_pairs = opposed;

    const MatrixTag tag = report.matrix_class.tag;
    const bool plus = tag == MatrixTag::Aplus || tag == MatrixTag::Identity;
    const bool minus = tag == MatrixTag::Aminus || tag == MatrixTag::Identity;
    report.plus_with_increasing = plus && f.is_increasing();
    report.minus_with_decreasing = minus && f.is_decreasing();
    report.sign_definite_c0_decreasing = (plus || minus) && f.is_decreasing() && f.is_c0();
    return report;
}

std::string to_string(MonotoneVerdict v) {
    switch (v) {
        case MonotoneVerdict::Constant: return "constant";
        case MonotoneVerdict::Nonincreasing: return "nonincreasing";
        case MonotoneVerdict::Nondecreasing: return "nondecreasing";
        case MonotoneVerdict::Nonmonotone: return "nonmonotone";
    }
    return "nonmonotone";
}

MonotonicityReport monotonicity_report(const LinearFunctional& f, const Trajectory& t,
                                       double slack) {
    std::vector<double> values;
    values.reserve(t.points.size());
    for (const auto& p : t.points) values.push_back(phi(f, p));
    return monotonicity_from_values(std::move(values), slack);
}

MonotonicityReport monotonicity_from_values(std::vector<double> values, double slack) {
    MonotonicityReport report;
    report.slack = slack;
    report.values = std::move(values);
    if (report.values.empty()) return report;

    report.nonincreasing = true;
    report.nondecreasing = true;
    report.deltas.reserve(report.values.size() - 1);
    for (std::size_t j = 0; j + 1 < report.values.size(); ++j) {
        const double d = report.values[j + 1] - report.values[j];
        report.deltas.push_back(d);
        if (d > slack) report.nonincreasing = false;
        if (d < -slack) report.nondecreasing = false;
    }

    if (report.nonincreasing && report.nondecreasing)
        report.verdict = MonotoneVerdict::Constant;
    else if (report.nonincreasing)
        report.verdict = MonotoneVerdict::Nonincreasing;
    else if (report.nondecreasing)
        report.verdict = MonotoneVerdict::Nondecreasing;
    else
        report.verdict = MonotoneVerdict::Nonmonotone;

    report.limit_estimate = report.values.back();
    const std::size_t window = std::max<std::size_t>(1, report.values.size() / 10);
    const auto tail_begin = report.values.end() - static_cast<std::ptrdiff_t>(window);
    const auto [lo, hi] = std::minmax_element(tail_begin, report.values.end());
    report.cauchy_width = *hi - *lo;
    return report;
}

} // namespace volterra

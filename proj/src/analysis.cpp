#include "volterra/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volterra/kahan.hpp"

namespace volterra {

std::string to_string(ConvergenceMode mode) {
    return mode == ConvergenceMode::Norm ? "norm" : "weak";
}

ConvergenceMode mode_from_string(const std::string& s) {
    if (s == "norm") return ConvergenceMode::Norm;
    if (s == "weak") return ConvergenceMode::Weak;
    throw ConfigError("mode must be \"norm\" or \"weak\", got \"" + s + "\"");
}

std::uint64_t AnalysisBudget::resolved_window() const {
    if (stability_window > 0) return stability_window;
    return std::max<std::uint64_t>(2, max_steps / 10);
}

Json AnalysisBudget::to_json() const {
    return Json{{"max_steps", max_steps},   {"eps_conv", eps_conv},
                {"eps_mass", eps_mass},     {"stability_window", stability_window},
                {"probe_dim", probe_dim},   {"eps_weak", eps_weak}};
}

AnalysisBudget AnalysisBudget::from_json(const Json& j, const AnalysisBudget& defaults) {
    if (!j.is_object()) throw ConfigError("budget must be an object");
    AnalysisBudget b = defaults;
    for (const auto& [key, value] : j.items()) {
        if (key == "max_steps" && json_uint(value))
            b.max_steps = value.get<std::uint64_t>();
        else if (key == "eps_conv" && value.is_number())
            b.eps_conv = value.get<double>();
        else if (key == "eps_mass" && value.is_number())
            b.eps_mass = value.get<double>();
        else if (key == "stability_window" && json_uint(value))
            b.stability_window = value.get<std::uint64_t>();
        else if (key == "probe_dim" && json_uint(value))
            b.probe_dim = value.get<Index>();
        else if (key == "eps_weak" && value.is_number())
            b.eps_weak = value.get<double>();
        else
            throw ConfigError("unknown or ill-typed budget field \"" + key + "\"");
    }
    if (b.max_steps == 0) throw ConfigError("budget max_steps must be positive");
    if (b.eps_conv <= 0.0 || b.eps_mass <= 0.0 || b.eps_weak <= 0.0)
        throw ConfigError("budget tolerances must be positive");
    if (b.probe_dim == 0) throw ConfigError("budget probe_dim must be positive");
    return b;
}

std::string to_string(OmegaKind kind) {
    switch (kind) {
        case OmegaKind::VertexLimit: return "VertexLimit";
        case OmegaKind::ZeroLimit: return "ZeroLimit";
        case OmegaKind::PointOnSphere: return "PointOnSphere";
        case OmegaKind::Undecided: return "Undecided";
    }
    return "Undecided";
}

namespace {

// Rolling sum of the last `capacity` per-step displacements. Values are
// re-summed on demand in stored order, so the result does not accumulate
// floating-point drift from incremental add/subtract.
class TrailingWindow {
public:
    explicit TrailingWindow(std::uint64_t capacity) : values_(capacity, 0.0) {}

    void push(double v) {
        values_[next_ % values_.size()] = v;
        ++next_;
    }

    double sum() const {
        const std::uint64_t count = std::min<std::uint64_t>(next_, values_.size());
        KahanAccumulator acc;
        for (std::uint64_t j = 0; j < count; ++j) acc += values_[j];
        return acc.value();
    }

private:
    std::vector<double> values_;
    std::uint64_t next_ = 0;
};

// Coordinates of the final point that are materially nonzero and barely moved
// since a snapshot at least one stability window old.
SimplexPoint stable_part(const SimplexPoint& final_point, const SimplexPoint& snapshot,
                         double eps) {
    std::vector<Coordinate> stable;
    for (const auto& c : final_point.coords()) {
        if (c.value < eps) continue;
        if (std::fabs(c.value - snapshot.value_at(c.index)) < eps) stable.push_back(c);
    }
    return SimplexPoint::sparse(std::move(stable));
}

double max_coordinate_upto(const SimplexPoint& x, Index probe) {
    double best = 0.0;
    for (const auto& c : x.coords()) {
        if (c.index > probe) break;
        best = std::max(best, c.value);
    }
    return best;
}

} // namespace

OmegaEstimate estimate_omega(const VolterraOperator& V, const SimplexPoint& x0,
                             ConvergenceMode mode, const AnalysisBudget& budget) {
    if (x0.is_zero()) throw EmptySupportError("cannot analyze the orbit of the zero point");

    const std::uint64_t window = budget.resolved_window();
    const Index probe = budget.probe_dim;

    OmegaEstimate est;
    est.mode = mode;
    est.budget = budget;

    SimplexPoint x = x0;

    // Snapshots for end-of-budget coordinate stability; old one is always at
    // least a window of steps behind.
    SimplexPoint snapshot_old = x0;
    SimplexPoint snapshot_recent = x0;

    // Vertex detection state.
    Index candidate = 0;
    std::uint64_t run_length = 0;
    std::optional<std::uint64_t> first_l1;
    std::optional<std::uint64_t> first_rho;

    double head_mass = x0.mass_upto(probe);
    bool head_monotone = true;
    est.evidence.mass_trend.push_back({0, head_mass});
    std::uint64_t next_trend_step = 1;

    TrailingWindow trail_l1(window);
    TrailingWindow trail_rho(window);

    double dist_l1 = 0.0;
    double dist_rho = 0.0;

    for (std::uint64_t step = 1; step <= budget.max_steps; ++step) {
        SimplexPoint next = apply(V, x);
        trail_l1.push(l1_distance(next, x));
        trail_rho.push(rho_distance(next, x));
        x = std::move(next);

        const double h = x.mass_upto(probe);
        if (h > head_mass + tol::slack) head_monotone = false;
        head_mass = h;
        if (step == next_trend_step || step == budget.max_steps) {
            est.evidence.mass_trend.push_back({step, h});
            if (step == next_trend_step) next_trend_step *= 2;
        }

        if (!x.is_zero()) {
            const Index m = x.argmax();
            if (m != candidate) {
                candidate = m;
                run_length = 0;
                first_l1.reset();
                first_rho.reset();
            }
            dist_l1 = l1_to_vertex(x, m);
            dist_rho = rho_to_vertex(x, m);
            if (!first_l1 && dist_l1 < budget.eps_conv) first_l1 = step;
            if (!first_rho && dist_rho < budget.eps_conv) first_rho = step;
            const double watched = mode == ConvergenceMode::Norm ? dist_l1 : dist_rho;
            if (watched < budget.eps_conv)
                ++run_length;
            else
                run_length = 0;

            if (run_length >= window) {
                est.kind = OmegaKind::VertexLimit;
                est.vertex = candidate;
                est.limit_point = SimplexPoint::unit(candidate);
                est.r_estimate = 1.0;
                est.evidence.steps_used = step;
                est.evidence.final_l1 = dist_l1;
                est.evidence.final_rho = dist_rho;
                est.evidence.first_step_l1_below = first_l1;
                est.evidence.first_step_rho_below = first_rho;
                est.evidence.head_mass_monotone = head_monotone;
                if (est.evidence.mass_trend.back().step != step)
                    est.evidence.mass_trend.push_back({step, h});
                return est;
            }
        } else {
            candidate = 0;
            run_length = 0;
        }

        if (step % window == 0) {
            snapshot_old = std::move(snapshot_recent);
            snapshot_recent = x;
        }
    }

    // Budget exhausted without a certified vertex.
    est.evidence.steps_used = budget.max_steps;
    est.evidence.first_step_l1_below = first_l1;
    est.evidence.first_step_rho_below = first_rho;
    est.evidence.head_mass_monotone = head_monotone;

    const SimplexPoint stable = stable_part(x, snapshot_old, budget.eps_conv);
    const double r = stable.mass();

    const SimplexPoint zero;
    if (mode == ConvergenceMode::Weak) {
        if (max_coordinate_upto(x, probe) < budget.eps_conv && head_monotone) {
            est.kind = OmegaKind::ZeroLimit;
            est.limit_point = zero;
            est.r_estimate = 0.0;
            est.evidence.final_l1 = l1_distance(x, zero);
            est.evidence.final_rho = rho_distance(x, zero);
            return est;
        }
        if (trail_rho.sum() < budget.eps_conv) {
            est.kind = OmegaKind::PointOnSphere;
            est.limit_point = stable;
            est.r_estimate = r;
            est.evidence.final_l1 = l1_distance(x, stable);
            est.evidence.final_rho = rho_distance(x, stable);
            return est;
        }
    } else {
        if (trail_l1.sum() < budget.eps_conv && r >= 1.0 - budget.eps_mass) {
            est.kind = OmegaKind::PointOnSphere;
            est.limit_point = stable;
            est.r_estimate = r;
            est.evidence.final_l1 = l1_distance(x, stable);
            est.evidence.final_rho = rho_distance(x, stable);
            return est;
        }
    }

    est.kind = OmegaKind::Undecided;
    est.limit_point = stable;
    est.r_estimate = r;
    est.evidence.final_l1 = l1_distance(x, stable);
    est.evidence.final_rho = rho_distance(x, stable);
    return est;
}

SimplexPoint cesaro(const VolterraOperator& V, const SimplexPoint& x0, std::uint64_t n) {
    if (n == 0) throw InvalidRangeError("average needs at least one term");
    if (x0.is_zero()) return x0;

    const auto& base = x0.coords();
    std::vector<KahanAccumulator> acc(base.size());

    SimplexPoint x = x0;
    for (std::uint64_t t = 0; t < n; ++t) {
        if (t > 0) x = apply(V, x);
        std::size_t j = 0;
        for (const auto& c : x.coords()) {
            // Support never grows, so every index is found inside base.
            while (j < base.size() && base[j].index < c.index) ++j;
            if (j == base.size() || base[j].index != c.index)
                throw std::logic_error("support escaped the initial support");
            acc[j] += c.value;
        }
    }

    std::vector<Coordinate> coords;
    coords.reserve(base.size());
    const double count = static_cast<double>(n);
    for (std::size_t j = 0; j < base.size(); ++j) {
        const double v = acc[j].value() / count;
        if (v != 0.0) coords.push_back({base[j].index, v});
    }
    return SimplexPoint::sparse(std::move(coords));
}

std::string to_string(NormErgodicVerdict v) {
    switch (v) {
        case NormErgodicVerdict::Ergodic: return "ergodic";
        case NormErgodicVerdict::NonErgodic: return "non-ergodic";
        case NormErgodicVerdict::Undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(WeakErgodicVerdict v) {
    return v == WeakErgodicVerdict::WeakErgodic ? "weak-ergodic" : "undecided";
}

ErgodicReport ergodicity_verdict(const VolterraOperator& V, const SimplexPoint& x0,
                                 const AnalysisBudget& budget) {
    if (x0.is_zero()) throw EmptySupportError("cannot analyze the orbit of the zero point");

    ErgodicReport report;
    report.budget = budget;

    const std::uint64_t n_max = budget.max_steps;
    std::vector<std::uint64_t> marks;
    for (std::uint64_t div = 8; div >= 1; div /= 2) {
        const std::uint64_t n = std::max<std::uint64_t>(1, n_max / div);
        if (marks.empty() || marks.back() != n) marks.push_back(n);
    }

    const std::uint64_t window = budget.resolved_window();
    const auto& base = x0.coords();
    std::vector<KahanAccumulator> acc(base.size());

    SimplexPoint x = x0;
    SimplexPoint snapshot_old = x0;
    SimplexPoint snapshot_recent = x0;

    std::vector<SimplexPoint> averages;
    std::size_t next_mark = 0;

    for (std::uint64_t t = 0; t < n_max; ++t) {
        if (t > 0) {
            x = apply(V, x);
            if (t % window == 0) {
                snapshot_old = std::move(snapshot_recent);
                snapshot_recent = x;
            }
        }
        std::size_t j = 0;
        for (const auto& c : x.coords()) {
            while (j < base.size() && base[j].index < c.index) ++j;
            if (j == base.size() || base[j].index != c.index)
                throw std::logic_error("support escaped the initial support");
            acc[j] += c.value;
        }
        if (next_mark < marks.size() && t + 1 == marks[next_mark]) {
            std::vector<Coordinate> coords;
            const double inv = static_cast<double>(t + 1);
            for (std::size_t b = 0; b < base.size(); ++b) {
                const double v = acc[b].value() / inv;
                if (v != 0.0) coords.push_back({base[b].index, v});
            }
            averages.push_back(SimplexPoint::sparse(std::move(coords)));
            ++next_mark;
        }
    }

    const SimplexPoint stable = stable_part(x, snapshot_old, budget.eps_conv);

    for (std::size_t j = 0; j < averages.size(); ++j) {
        ErgodicCheckpoint cp;
        cp.n = marks[j];
        cp.average = averages[j];
        KahanAccumulator stable_mass;
        for (const auto& c : stable.coords()) stable_mass += averages[j].value_at(c.index);
        cp.stable_mass = stable_mass.value();
        cp.rho_to_prev = j == 0 ? 0.0 : rho_distance(averages[j], averages[j - 1]);
        report.checkpoints.push_back(std::move(cp));
    }

    const auto& last = report.checkpoints.back();
    std::vector<Coordinate> limit_coords;
    for (const auto& c : stable.coords()) {
        const double v = last.average.value_at(c.index);
        if (v != 0.0) limit_coords.push_back({c.index, v});
    }
    report.weak_limit = SimplexPoint::sparse(std::move(limit_coords));
    report.mass_of_weak_limit = last.stable_mass;

    const bool rho_settled = report.checkpoints.size() >= 2 && last.rho_to_prev < budget.eps_weak;
    report.weak_verdict =
        rho_settled ? WeakErgodicVerdict::WeakErgodic : WeakErgodicVerdict::Undecided;

    if (rho_settled && report.mass_of_weak_limit >= 1.0 - budget.eps_mass) {
        report.norm_verdict = NormErgodicVerdict::Ergodic;
    } else if (rho_settled && report.checkpoints.size() >= 2) {
        const double prev_mass = report.checkpoints[report.checkpoints.size() - 2].stable_mass;
        const bool mass_settled = std::fabs(report.mass_of_weak_limit - prev_mass) < budget.eps_mass;
        report.norm_verdict = mass_settled && report.mass_of_weak_limit < 1.0 - budget.eps_mass
                                  ? NormErgodicVerdict::NonErgodic
                                  : NormErgodicVerdict::Undecided;
    } else {
        report.norm_verdict = NormErgodicVerdict::Undecided;
    }
    return report;
}

SupportPairReport check_support_pairs(const SimplexPoint& limit,
                                          const std::vector<std::pair<Index, Index>>& pairs,
                                          double eps) {
    SupportPairReport report;
    for (const auto& [k, i] : pairs) {
        SupportPairCheck check;
        check.k = k;
        check.i = i;
        check.smaller_value = std::min(limit.value_at(k), limit.value_at(i));
        check.vanished = check.smaller_value < eps;
        if (!check.vanished) report.all_vanished = false;
        report.checks.push_back(check);
    }
    return report;
}

double logistic_step(double alpha, double xi) {
    return xi * (1.0 + alpha - alpha * xi);
}

TruncationSweepReport analyze_truncation_sweep(const std::vector<TruncationRun>& runs,
                                               Index coord_probe) {
    if (runs.size() < 2) throw InvalidRangeError("sweep extrapolation needs at least two runs");
    for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
        if (runs[j].truncation >= runs[j + 1].truncation)
            throw InvalidRangeError("sweep runs must have strictly increasing truncation");
    }

    TruncationSweepReport report;
    report.coord_probe = coord_probe;

    report.coordinate_averages_decrease = true;
    for (Index k = 1; k <= coord_probe && report.coordinate_averages_decrease; ++k) {
        for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
            if (!(runs[j].final_average.value_at(k) > runs[j + 1].final_average.value_at(k))) {
                report.coordinate_averages_decrease = false;
                break;
            }
        }
    }

    report.stable_masses_decrease = true;
    for (std::size_t j = 0; j + 1 < runs.size(); ++j) {
        if (!(runs[j].stable_mass > runs[j + 1].stable_mass)) {
            report.stable_masses_decrease = false;
            break;
        }
    }

    report.extrapolates_non_ergodic =
        report.coordinate_averages_decrease && report.stable_masses_decrease;
    return report;
}

} // namespace volterra

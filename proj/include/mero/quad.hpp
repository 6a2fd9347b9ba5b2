#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mero/poly.hpp"
#include "mero/transform.hpp"

namespace mero {

struct QuadOptions {
    double tol = 1e-10;
    int max_depth = 48;    // panel bisection depth on non-convergence
    int max_level = 10;    // trapezoid halvings inside one DE panel
    double bump_scale = 1.0;  // scales the PV bump half-width (test hook)
};

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int segments_used = 0;
    std::vector<double> pv_points;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, QuadResult best)
        : std::runtime_error(msg), best_(std::move(best)) {}
    const QuadResult& best() const { return best_; }

private:
    QuadResult best_;
};

/// F of the reduced identity: a named decaying kernel or a caller-supplied
/// expression with declared simple poles.
class IntegrandSpec {
public:
    static IntegrandSpec gaussian(double alpha) {
        if (!(alpha > 0))
            throw std::invalid_argument("gaussian integrand: alpha must be > 0");
        IntegrandSpec s;
        s.kind_ = "gaussian";
        s.alpha_ = alpha;
        s.fn_ = [alpha](double y) { return std::exp(-alpha * y * y); };
        return s;
    }
    static IntegrandSpec csch() {
        IntegrandSpec s;
        s.kind_ = "csch";
        s.fn_ = [](double y) { return 1.0 / std::sinh(y); };
        s.sing_ = {0.0};
        s.residues_ = {1.0};  // csch(y) ~ 1/y at 0
        return s;
    }
    static IntegrandSpec sech() {
        IntegrandSpec s;
        s.kind_ = "sech";
        s.fn_ = [](double y) { return 1.0 / std::cosh(y); };
        return s;
    }
    static IntegrandSpec expression(std::function<double(double)> fn,
                                    std::vector<double> poles,
                                    std::string display = "expr") {
        IntegrandSpec s;
        s.kind_ = "expr";
        s.display_ = std::move(display);
        s.fn_ = std::move(fn);
        s.sing_ = std::move(poles);
        s.residues_.assign(s.sing_.size(), std::nullopt);
        std::sort(s.sing_.begin(), s.sing_.end());
        return s;
    }

    double eval(double y) const { return fn_(y); }
    const std::string& kind() const { return kind_; }
    const std::string& display() const { return display_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& singularities() const { return sing_; }

    /// Residue of F at its k-th singularity when known analytically.
    std::optional<double> known_residue(std::size_t k) const {
        if (k < residues_.size()) return residues_[k];
        return std::nullopt;
    }

private:
    IntegrandSpec() = default;
    std::string kind_;
    std::string display_;
    double alpha_ = 0.0;
    std::function<double(double)> fn_;
    std::vector<double> sing_;
    std::vector<std::optional<double>> residues_;
};

namespace detail {

struct PanelOutcome {
    double value = 0.0;
    double err = 0.0;
    double l1 = 0.0;
    bool converged = false;
};

inline double guarded(double v) { return std::isfinite(v) ? v : 0.0; }

/// Tanh-sinh (double exponential) quadrature on a finite panel (a, b).
/// Endpoints are never evaluated; nodes stop at a relative distance of
/// 1e-15 of the half-width, which keeps pole-adjacent cancellation noise
/// integrable while leaving only O(1e-15 * width * |f|) truncation behind.
template <class F>
PanelOutcome tanh_sinh_panel(const F& f, double a, double b, double tol,
                             int max_level) {
    const double hw = 0.5 * (b - a);
    PanelOutcome out;
    if (!(hw > 0.0)) {
        out.converged = true;
        return out;
    }

    // value*weight at transformed parameter t, or nullopt past resolution
    auto term = [&](double t) -> std::optional<double> {
        double s = 1.5707963267948966 * std::sinh(t);
        double as = std::fabs(s);
        double e2 = std::exp(2.0 * as);
        double dist = hw * 2.0 / (e2 + 1.0);  // distance to nearer endpoint
        if (!(dist > 1e-15 * hw)) return std::nullopt;
        double x = s < 0.0 ? a + dist : b - dist;
        if (!(x > a && x < b)) return std::nullopt;
        double ch = std::cosh(s);
        double w = hw * 1.5707963267948966 * std::cosh(t) / (ch * ch);
        return w * guarded(f(x));
    };

    double sum = term(0.0).value_or(0.0);
    double l1 = std::fabs(sum);
    double d = 1.0;
    // level 0: integer nodes
    for (int dir = -1; dir <= 1; dir += 2) {
        for (int i = 1; i < 8; ++i) {
            auto v = term(dir * static_cast<double>(i));
            if (!v) break;
            sum += *v;
            l1 += std::fabs(*v);
        }
    }
    double value = sum * d;
    double prev = value;
    out.l1 = l1 * d;

    for (int level = 1; level <= max_level; ++level) {
        d *= 0.5;
        double add = 0.0, addl1 = 0.0;
        for (int dir = -1; dir <= 1; dir += 2) {
            for (int i = 0;; ++i) {
                double t = dir * (static_cast<double>(2 * i + 1)) * d;
                auto v = term(t);
                if (!v) break;
                add += *v;
                addl1 += std::fabs(*v);
            }
        }
        prev = value;
        value = 0.5 * value + d * add;
        out.l1 = 0.5 * out.l1 + d * addl1;
        out.err = std::fabs(value - prev);
        if (level >= 3 &&
            out.err <= std::max(tol, 1e-15 * std::max(1.0, out.l1))) {
            out.converged = true;
            break;
        }
    }
    out.value = value;
    return out;
}

/// Exp-sinh quadrature on a half-infinite panel from `a` toward
/// direction * infinity; requires integrable decay in the tail.
template <class F>
PanelOutcome exp_sinh_panel(const F& f, double a, int direction, double tol,
                            int max_level) {
    PanelOutcome out;
    const double dir = direction < 0 ? -1.0 : 1.0;
    const double scale = std::max(1.0, std::fabs(a));

    auto term = [&](double t) -> std::optional<double> {
        double s = 1.5707963267948966 * std::sinh(t);
        if (s > 700.0) return std::nullopt;  // x beyond any double mass
        double dist = std::exp(s);
        if (!(dist > 1e-15 * scale) && s < 0.0) return std::nullopt;
        double x = a + dir * dist;
        if (x == a) return std::nullopt;
        double w = 1.5707963267948966 * std::cosh(t) * dist;
        return w * guarded(f(x));
    };

    double sum = term(0.0).value_or(0.0);
    double l1 = std::fabs(sum);
    double d = 1.0;
    for (int dirn = -1; dirn <= 1; dirn += 2) {
        int dull = 0;
        for (int i = 1; i < 16; ++i) {
            auto v = term(dirn * static_cast<double>(i));
            if (!v) break;
            sum += *v;
            l1 += std::fabs(*v);
            if (std::fabs(*v) <= 1e-17 * (1.0 + l1)) {
                if (++dull >= 2) break;
            } else {
                dull = 0;
            }
        }
    }
    double value = sum * d;
    double prev = value;
    out.l1 = l1 * d;

    for (int level = 1; level <= max_level; ++level) {
        d *= 0.5;
        double add = 0.0, addl1 = 0.0;
        for (int dirn = -1; dirn <= 1; dirn += 2) {
            int dull = 0;
            for (int i = 0;; ++i) {
                double t = dirn * (static_cast<double>(2 * i + 1)) * d;
                auto v = term(t);
                if (!v) break;
                add += *v;
                addl1 += std::fabs(*v);
                if (std::fabs(*v) <= 1e-17 * (1.0 + addl1 + out.l1)) {
                    if (++dull >= 2) break;
                } else {
                    dull = 0;
                }
            }
        }
        prev = value;
        value = 0.5 * value + d * add;
        out.l1 = 0.5 * out.l1 + d * addl1;
        out.err = std::fabs(value - prev);
        if (level >= 3 &&
            out.err <= std::max(tol, 1e-15 * std::max(1.0, out.l1))) {
            out.converged = true;
            break;
        }
    }
    out.value = value;
    return out;
}

/// Finite panel with bisection fallback when the DE rule stalls.
template <class F>
PanelOutcome finite_panel_adaptive(const F& f, double a, double b, double tol,
                                   int depth, int max_level) {
    PanelOutcome out = tanh_sinh_panel(f, a, b, tol, max_level);
    if (out.converged || depth <= 0) return out;
    double mid = 0.5 * (a + b);
    if (!(a < mid && mid < b)) return out;
    // tolerance budget splits between the halves, floored at the noise
    // level so a bad patch cannot demand the impossible from its siblings
    double child_tol =
        std::max(0.5 * tol, 1e-15 * std::max(1.0, out.l1));
    PanelOutcome l =
        finite_panel_adaptive(f, a, mid, child_tol, depth - 1, max_level);
    PanelOutcome r =
        finite_panel_adaptive(f, mid, b, child_tol, depth - 1, max_level);
    PanelOutcome combined;
    combined.value = l.value + r.value;
    combined.err = l.err + r.err;
    combined.l1 = l.l1 + r.l1;
    combined.converged = l.converged && r.converged;
    return combined;
}

/// Half-infinite panel; on a stall, peels off a finite chunk and retries
/// the remaining tail.
template <class F>
PanelOutcome tail_panel_adaptive(const F& f, double a, int direction,
                                 double tol, int depth, int max_level) {
    PanelOutcome out = exp_sinh_panel(f, a, direction, tol, max_level);
    if (out.converged || depth <= 0) return out;
    double step = 8.0 * std::max(1.0, std::fabs(a));
    double next = a + (direction < 0 ? -step : step);
    double child_tol =
        std::max(0.5 * tol, 1e-15 * std::max(1.0, out.l1));
    PanelOutcome fin = finite_panel_adaptive(
        f, std::min(a, next), std::max(a, next), child_tol, depth - 1,
        max_level);
    PanelOutcome tail = tail_panel_adaptive(f, next, direction, child_tol,
                                            depth - 1, max_level);
    PanelOutcome combined;
    combined.value = fin.value + tail.value;
    combined.err = fin.err + tail.err;
    combined.l1 = fin.l1 + tail.l1;
    combined.converged = fin.converged && tail.converged;
    return combined;
}

struct SegmentedSpec {
    std::vector<double> cuts;  // sorted finite panel boundaries
    // finite overall bounds; when unset the corresponding tail panel runs
    std::optional<double> lower, upper;
    bool paired_tails = false;  // sum x and -x tails (principal value at inf)
};

template <class F>
QuadResult integrate_segmented(const F& f, const SegmentedSpec& spec,
                               const QuadOptions& opts) {
    std::vector<double> cuts = spec.cuts;
    std::sort(cuts.begin(), cuts.end());
    if (spec.lower) cuts.insert(cuts.begin(), *spec.lower);
    if (spec.upper) cuts.push_back(*spec.upper);
    if (cuts.empty()) cuts.push_back(0.0);

    double pair_start = 0.0;
    if (spec.paired_tails) {
        for (double c : cuts) pair_start = std::max(pair_start, std::fabs(c));
        pair_start = 1.25 * pair_start + 1.0;
        if (!spec.lower) cuts.insert(cuts.begin(), -pair_start);
        if (!spec.upper) cuts.push_back(pair_start);
    }

    QuadResult res;
    bool all_converged = true;
    std::string first_failure;

    auto absorb = [&](const PanelOutcome& p, const char* what, double a,
                      double b) {
        res.value += p.value;
        res.abs_error_estimate += p.err;
        if (!p.converged) {
            all_converged = false;
            if (first_failure.empty()) {
                std::ostringstream os;
                os << what << " panel [" << a << ", " << b
                   << "] did not converge (best err " << p.err << ")";
                first_failure = os.str();
            }
        }
    };

    if (!spec.lower) {
        if (spec.paired_tails) {
            auto g = [&](double y) { return f(y) + f(-y); };
            absorb(tail_panel_adaptive(g, pair_start, +1, opts.tol,
                                       opts.max_depth, opts.max_level),
                   "paired tail", pair_start,
                   std::numeric_limits<double>::infinity());
        } else {
            absorb(tail_panel_adaptive(f, cuts.front(), -1, opts.tol,
                                       opts.max_depth, opts.max_level),
                   "lower tail", -std::numeric_limits<double>::infinity(),
                   cuts.front());
        }
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        absorb(finite_panel_adaptive(f, cuts[i], cuts[i + 1], opts.tol,
                                     opts.max_depth, opts.max_level),
               "finite", cuts[i], cuts[i + 1]);
    if (!spec.upper && !spec.paired_tails)
        absorb(tail_panel_adaptive(f, cuts.back(), +1, opts.tol,
                                   opts.max_depth, opts.max_level),
               "upper tail", cuts.back(),
               std::numeric_limits<double>::infinity());

    res.segments_used = 1;
    if (!all_converged) throw QuadratureError(first_failure, res);
    return res;
}

/// Residue of a simple pole of f at s: the symmetrized scaled limit
/// (h/2)(f(s+h) - f(s-h)) -> rho, accelerated by one Richardson step at
/// offsets h, h/2. The one-sided limit h f(s+h) is cross-checked because
/// the symmetric average silently cancels even-order poles. Throws when
/// either limit fails to settle.
template <class F>
double estimate_residue(const F& f, double s, double h_max) {
    const double h0 = std::min(h_max, 1e-3 * (1.0 + std::fabs(s)));
    auto A = [&](double h) { return 0.5 * h * (f(s + h) - f(s - h)); };
    double a0 = A(h0), a1 = A(0.5 * h0), a2 = A(0.25 * h0);
    double r1 = (4.0 * a1 - a0) / 3.0;
    double r2 = (4.0 * a2 - a1) / 3.0;

    auto B = [&](double h) { return h * f(s + h); };
    double b0 = B(h0), b1 = B(0.5 * h0), b2 = B(0.25 * h0);
    double rb1 = 2.0 * b1 - b0;
    double rb2 = 2.0 * b2 - b1;

    bool ok = std::isfinite(r2) && std::isfinite(rb2) &&
              std::fabs(r2 - r1) <= 1e-6 * (1.0 + std::fabs(r2)) &&
              std::fabs(rb2 - rb1) <= 1e-4 * (1.0 + std::fabs(rb2));
    if (!ok) {
        std::ostringstream os;
        os << "residue estimation failed at x = " << s
           << " (pole does not look simple: symmetric estimates " << r1
           << " vs " << r2 << ", one-sided " << rb1 << " vs " << rb2 << ")";
        throw QuadratureError(os.str(), QuadResult{});
    }
    return r2;
}

struct PvTerm {
    double location;
    double residue;
    double half_width;
    double clamp;  // dead-zone radius where evaluations are frozen
};

inline double pv_clamp_radius(double s) {
    return std::sqrt(std::numeric_limits<double>::epsilon()) *
           (1.0 + std::fabs(s));
}

/// Compact even bump: 1 on |y| <= 1/2 of the window, cosine-tapered to 0
/// at the edge. The subtracted pole term rho * w(x)/(x - s) then has zero
/// principal value over its own (symmetric) window.
inline double pv_bump(double y) {
    double a = std::fabs(y);
    if (a >= 1.0) return 0.0;
    if (a <= 0.5) return 1.0;
    double cth = std::cos(3.141592653589793 * (a - 0.5));
    return cth * cth;
}

/// f minus its bumped pole terms. The subtracted function is smooth across
/// each pole, but evaluating f closer than ~sqrt(eps) to one amplifies
/// rounding noise quadratically; inside that dead zone the evaluation is
/// frozen at the zone edge, which biases the result only at O(sqrt(eps)).
template <class F>
auto make_pv_subtracted(const F& f, const std::vector<PvTerm>& terms) {
    return [&f, terms](double x) {
        double xe = x;
        for (const auto& t : terms) {
            double dx = xe - t.location;
            if (std::fabs(dx) < t.clamp) {
                xe = t.location + (dx < 0.0 ? -t.clamp : t.clamp);
                break;  // zones are disjoint
            }
        }
        double v = f(xe);
        for (const auto& t : terms) {
            double dx = xe - t.location;
            if (std::fabs(dx) < t.half_width)
                v -= t.residue * pv_bump(dx / t.half_width) / dx;
        }
        return v;
    };
}

inline void add_pv_cuts(std::vector<double>& cuts, const PvTerm& t) {
    cuts.push_back(t.location - t.half_width);
    cuts.push_back(t.location - 0.5 * t.half_width);
    cuts.push_back(t.location);
    cuts.push_back(t.location + 0.5 * t.half_width);
    cuts.push_back(t.location + t.half_width);
}

/// Rectangle bound on what freezing the dead zone can mis-assign.
template <class H>
double pv_clamp_allowance(const H& h, const std::vector<PvTerm>& terms) {
    double e = 0.0;
    for (const auto& t : terms)
        e += t.clamp * (std::fabs(h(t.location + 1.0625 * t.clamp)) +
                        std::fabs(h(t.location - 1.0625 * t.clamp)));
    return e;
}

}  // namespace detail

/// Integral of f over the real line (or [lower, upper] when given); f must
/// decay integrably toward every open end.
template <class F>
QuadResult integrate_line(const F& f, const QuadOptions& opts = {},
                          std::vector<double> split_hints = {},
                          std::optional<double> lower = std::nullopt,
                          std::optional<double> upper = std::nullopt) {
    detail::SegmentedSpec spec;
    spec.cuts = std::move(split_hints);
    spec.lower = lower;
    spec.upper = upper;
    if (spec.cuts.empty() && !lower && !upper) spec.cuts = {0.0};
    return detail::integrate_segmented(f, spec, opts);
}

/// Cauchy principal value of f across the given simple poles. Residues are
/// estimated numerically and subtracted under a compact bump; the remaining
/// integrand is smooth and the subtracted terms have zero principal value.
/// Tails are summed in symmetric pairs, so residue tails that cancel only
/// in the symmetric limit are handled.
template <class F>
QuadResult integrate_pv(const F& f, const std::vector<double>& simple_poles,
                        const QuadOptions& opts = {},
                        std::optional<double> lower = std::nullopt,
                        std::optional<double> upper = std::nullopt) {
    std::vector<double> poles = simple_poles;
    std::sort(poles.begin(), poles.end());
    for (std::size_t i = 0; i + 1 < poles.size(); ++i)
        if (!(poles[i + 1] - poles[i] > 1e-6))
            throw std::invalid_argument(
                "integrate_pv: poles must be separated by more than 1e-6");

    std::vector<detail::PvTerm> terms;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        double gap = std::numeric_limits<double>::infinity();
        if (i > 0) gap = std::min(gap, poles[i] - poles[i - 1]);
        if (i + 1 < poles.size()) gap = std::min(gap, poles[i + 1] - poles[i]);
        if (lower) gap = std::min(gap, poles[i] - *lower);
        if (upper) gap = std::min(gap, *upper - poles[i]);
        double hwid = 0.5 * std::min(1.0, 0.5 * gap) * opts.bump_scale;
        double rho = detail::estimate_residue(f, poles[i], 0.125 * hwid);
        terms.push_back(
            {poles[i], rho, hwid, detail::pv_clamp_radius(poles[i])});
    }

    detail::SegmentedSpec spec;
    spec.lower = lower;
    spec.upper = upper;
    spec.paired_tails = !lower && !upper;
    for (const auto& t : terms) detail::add_pv_cuts(spec.cuts, t);

    auto h = detail::make_pv_subtracted(f, terms);
    QuadResult res = detail::integrate_segmented(h, spec, opts);
    res.abs_error_estimate += detail::pv_clamp_allowance(h, terms);
    for (const auto& t : terms) res.pv_points.push_back(t.location);
    return res;
}

/// Left side of the reduced identity: integral of p(x) F(u(x)) over the
/// line, split at the poles of u. When F has simple poles, every branch
/// preimage becomes a principal value point with residue
/// p(x0) * rho_F / u'(x0).
template <class K>
QuadResult integrate_lhs(const Poly<double>& p, const MeroTransform<K>& tk,
                         const IntegrandSpec& F, const QuadOptions& opts = {}) {
    MeroTransform<double> t = [&] {
        if constexpr (std::is_same_v<K, double>)
            return tk;
        else
            return MeroTransform<double>(to_float_poles(tk.poles));
    }();

    // u at extended precision: near a branch preimage of an F-pole, u is a
    // tiny difference of large terms and double evaluation would leave
    // absolute noise that csch amplifies by 1/u^2
    auto raw = [&t, &p, &F](double x) {
        double u = static_cast<double>(detail::eval_u_ld(t.poles, x));
        double Fu = F.eval(u);
        if (Fu == 0.0) return 0.0;  // decay beats any polynomial growth
        return p.eval(x) * Fu;
    };

    std::vector<double> boundaries;
    for (const auto& term : t.poles.terms()) boundaries.push_back(term.b);

    // branch preimages of F's poles, with analytic residues when known
    std::vector<detail::PvTerm> pv;
    const auto& sing = F.singularities();
    for (std::size_t si = 0; si < sing.size(); ++si) {
        double rho_f;
        if (auto known = F.known_residue(si); known.has_value())
            rho_f = *known;
        else
            rho_f = detail::estimate_residue(
                [&F](double y) { return F.eval(y); }, sing[si], 1e-2);
        BranchSet br = branches(t, sing[si]);
        for (double r : br.roots)
            pv.push_back({r, p.eval(r) * rho_f / u_prime(t, r), 0.0,
                          detail::pv_clamp_radius(r)});
    }
    // bump half-widths from the gaps between pv points and segment edges
    std::vector<double> obstacles = boundaries;
    for (const auto& term : pv) obstacles.push_back(term.location);
    std::sort(obstacles.begin(), obstacles.end());
    for (auto& term : pv) {
        double gap = std::numeric_limits<double>::infinity();
        for (double o : obstacles) {
            double d = std::fabs(o - term.location);
            if (d > 1e-12) gap = std::min(gap, d);
        }
        if (!std::isfinite(gap)) gap = 2.0;
        term.half_width = 0.5 * std::min(1.0, 0.5 * gap) * opts.bump_scale;
    }

    detail::SegmentedSpec spec;
    spec.cuts = boundaries;
    for (const auto& term : pv) detail::add_pv_cuts(spec.cuts, term);

    // F's mass sits around u = 0 for every built-in kernel, so each segment
    // carries a sharp interior feature at the branch preimage of 0.
    // Cutting there hands the feature to the endpoint-clustered nodes;
    // without the cut the level-doubling estimate can settle before any
    // node lands on a narrow spike.
    bool zero_is_pole = false;
    for (double s : sing)
        if (std::fabs(s) < 1e-12) zero_is_pole = true;
    if (!zero_is_pole)
        for (double r : branches(t, 0.0).roots) spec.cuts.push_back(r);

    auto h = detail::make_pv_subtracted(raw, pv);
    QuadResult res = detail::integrate_segmented(h, spec, opts);
    res.abs_error_estimate += detail::pv_clamp_allowance(h, pv);
    res.segments_used = static_cast<int>(t.poles.size()) + 1;
    for (const auto& term : pv) res.pv_points.push_back(term.location);
    std::sort(res.pv_points.begin(), res.pv_points.end());
    return res;
}

}  // namespace mero

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mero/poles.hpp"
#include "mero/poly.hpp"

namespace mero {

/// A rational function that is not of the form x - sum a_k/(x - b_k) with
/// a_k > 0 and real distinct b_k. `condition()` names the failed test.
class NotInClassError : public std::runtime_error {
public:
    NotInClassError(const std::string& condition, const std::string& details)
        : std::runtime_error("not in the transform class: " + condition +
                             (details.empty() ? "" : "; " + details)),
          condition_(condition) {}
    const std::string& condition() const { return condition_; }

private:
    std::string condition_;
};

/// The map u(x) = x - sum_k a_k/(x - b_k) together with its cached rational
/// form (num/den with den = prod (x - b_k), num monic of degree n+1). On
/// each of the n+1 open segments cut by the poles, u increases strictly
/// from -inf to +inf.
template <class K>
struct MeroTransform {
    PoleSet<K> poles;
    RationalFn<K> rational;

    MeroTransform() = default;
    explicit MeroTransform(PoleSet<K> ps)
        : poles(std::move(ps)), rational(build_rational(poles)) {}

    // Assembled coefficient-by-coefficient (Vieta accumulation and synthetic
    // division on raw vectors): num and den are monic and coprime by
    // construction, and the coefficient dynamic range can be enormous for
    // many-pole transforms, so the round-off trim must not run here.
    static RationalFn<K> build_rational(const PoleSet<K>& ps) {
        using T = ring_traits<K>;
        const std::size_t n = ps.size();
        std::vector<K> den(n + 1, T::zero());
        den[0] = T::one();
        std::size_t used = 0;
        for (const auto& t : ps.terms()) {
            ++used;
            den[used] = den[used - 1];
            for (std::size_t i = used - 1; i >= 1; --i)
                den[i] = den[i - 1] - t.b * den[i];
            den[0] = -t.b * den[0];
        }
        // num = x * den - sum_k a_k * den/(x - b_k)
        std::vector<K> num(n + 2, T::zero());
        for (std::size_t i = 0; i <= n; ++i) num[i + 1] = den[i];
        for (const auto& t : ps.terms()) {
            K carry = den[n];  // synthetic division of den by (x - b)
            for (std::size_t i = n; i-- > 0;) {
                num[i] = num[i] - t.a * carry;
                carry = den[i] + carry * t.b;
            }
        }
        return RationalFn<K>(Poly<K>::from_raw(std::move(num)),
                             Poly<K>::from_raw(std::move(den)),
                             typename RationalFn<K>::already_normalized_tag{});
    }
};

/// The n+1 branch inverses at a fixed u: one root per segment, ascending.
struct BranchSet {
    double u = 0.0;
    std::vector<double> roots;
};

/// u(x) from the pole-sum form (accurate near the poles, where the rational
/// form cancels catastrophically).
template <class K>
K eval_u(const MeroTransform<K>& t, const K& x) {
    K s = x;
    for (const auto& term : t.poles.terms()) {
        K d = x - term.b;
        if (ring_traits<K>::is_zero(d))
            throw std::domain_error("eval_u: x hits a pole");
        s = s - term.a / d;
    }
    return s;
}

/// u'(x) = 1 + sum a_k/(x - b_k)^2 >= 1.
template <class K>
K u_prime(const MeroTransform<K>& t, const K& x) {
    K s = ring_traits<K>::one();
    for (const auto& term : t.poles.terms()) {
        K d = x - term.b;
        if (ring_traits<K>::is_zero(d))
            throw std::domain_error("u_prime: x hits a pole");
        s = s + term.a / (d * d);
    }
    return s;
}

/// dx/du along the branch through x: 1/u'(x), always in (0, 1].
template <class K>
K branch_derivative(const MeroTransform<K>& t, const K& x) {
    return ring_traits<K>::one() / u_prime(t, x);
}

namespace detail {

inline long double eval_u_ld(const PoleSet<double>& ps, long double x) {
    long double s = x;
    for (const auto& t : ps.terms()) s -= (long double)t.a / (x - t.b);
    return s;
}

inline long double u_prime_ld(const PoleSet<double>& ps, long double x) {
    long double s = 1.0L;
    for (const auto& t : ps.terms()) {
        long double d = x - t.b;
        s += (long double)t.a / (d * d);
    }
    return s;
}

/// One safeguarded Newton solve of u(x) = u0 inside the bracket
/// lo < x < hi with g(lo) < 0 < g(hi), g = u - u0 strictly increasing.
inline double solve_bracketed(const PoleSet<double>& ps, double u0, double lo,
                              double hi) {
    const double tol = 1e-12 * (1.0 + std::fabs(u0));
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        long double g = eval_u_ld(ps, x) - (long double)u0;
        if (std::fabs((double)g) <= tol) break;
        if (g < 0)
            lo = x;
        else
            hi = x;
        long double gp = u_prime_ld(ps, x);
        double xn = (double)((long double)x - g / gp);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) break;
        x = xn;
        if (hi - lo <= std::numeric_limits<double>::epsilon() *
                           (std::fabs(x) + 1.0))
            break;
    }
    // Extended-precision polish: two Newton steps at long double.
    long double xl = x;
    for (int i = 0; i < 2; ++i) {
        long double g = eval_u_ld(ps, xl) - (long double)u0;
        xl -= g / u_prime_ld(ps, xl);
    }
    double out = (double)xl;
    if (out > lo && out < hi) return out;
    return x;
}

[[noreturn]] inline void bracket_failure(const char* what, double u0,
                                         double a, double b) {
    std::ostringstream os;
    os << "internal error: branch bracketing failed (" << what
       << ") for u=" << u0 << " on segment (" << a << ", " << b << ")";
    throw std::logic_error(os.str());
}

}  // namespace detail

/// All n+1 real solutions of u(x) = u, one per segment, strictly ascending.
inline BranchSet branches(const MeroTransform<double>& t, double u0) {
    const auto& ps = t.poles;
    const std::size_t n = ps.size();
    BranchSet out;
    out.u = u0;
    out.roots.reserve(n + 1);
    if (n == 0) {
        out.roots.push_back(u0);
        return out;
    }
    double asum = ps.alpha1();

    // Probe geometrically toward a pole from inside a segment until the
    // sign of u - u0 settles; start strictly inside the segment.
    auto g_neg_from_right = [&](double b, double start) {
        double delta = start;
        for (int i = 0; i < 4000; ++i) {
            double x = b + delta;
            if (x > b && detail::eval_u_ld(ps, x) < (long double)u0) return x;
            delta *= 0.25;
        }
        detail::bracket_failure("descent to pole from right", u0, b, b);
    };
    auto g_pos_from_left = [&](double b, double start) {
        double delta = start;
        for (int i = 0; i < 4000; ++i) {
            double x = b - delta;
            if (x < b && detail::eval_u_ld(ps, x) > (long double)u0) return x;
            delta *= 0.25;
        }
        detail::bracket_failure("ascent to pole from left", u0, b, b);
    };

    for (std::size_t seg = 0; seg <= n; ++seg) {
        double lo, hi;
        if (seg == 0) {
            double b1 = ps.term(0).b;
            hi = g_pos_from_left(b1, 1.0);
            // u(x) <= x + asum/(b1 - x) for x < b1, so far enough left
            // u drops below u0.
            lo = std::min(u0, b1 - 1.0) - 1.0 - asum;
            for (int i = 0; i < 200 && !(detail::eval_u_ld(ps, lo) <
                                         (long double)u0);
                 ++i)
                lo = b1 - 2.0 * (b1 - lo);
            if (!(detail::eval_u_ld(ps, lo) < (long double)u0))
                detail::bracket_failure("left tail", u0, lo, b1);
        } else if (seg == n) {
            double bn = ps.term(n - 1).b;
            lo = g_neg_from_right(bn, 1.0);
            hi = std::max(u0, bn + 1.0) + 1.0 + asum;
            for (int i = 0; i < 200 && !(detail::eval_u_ld(ps, hi) >
                                         (long double)u0);
                 ++i)
                hi = bn + 2.0 * (hi - bn);
            if (!(detail::eval_u_ld(ps, hi) > (long double)u0))
                detail::bracket_failure("right tail", u0, bn, hi);
        } else {
            double width = ps.term(seg).b - ps.term(seg - 1).b;
            lo = g_neg_from_right(ps.term(seg - 1).b, 0.25 * width);
            hi = g_pos_from_left(ps.term(seg).b, 0.25 * width);
            if (!(lo < hi))
                detail::bracket_failure("interior bracket collapsed", u0, lo,
                                        hi);
        }
        out.roots.push_back(detail::solve_bracketed(ps, u0, lo, hi));
    }
    for (std::size_t i = 0; i + 1 < out.roots.size(); ++i)
        if (!(out.roots[i] < out.roots[i + 1]))
            detail::bracket_failure("roots out of order", u0, out.roots[i],
                                    out.roots[i + 1]);
    return out;
}

namespace detail {

/// Durand-Kerner iteration for all complex roots of a monic polynomial.
inline std::vector<std::complex<double>> all_roots(const Poly<double>& p) {
    const int n = p.degree();
    std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
    double radius = 1.0;
    for (const auto& c : p.coeffs())
        radius = std::max(radius, std::fabs(c));
    radius = 1.0 + radius;
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> w(1.0, 0.0);
    for (auto& zi : z) {
        w *= seed;
        zi = w * radius;
    }
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = p.coeffs().size(); i-- > 0;)
            acc = acc * x + p.coeffs()[i];
        return acc;
    };
    for (int iter = 0; iter < 600; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i) denom *= z[i] - z[j];
            std::complex<double> step = eval(z[i]) / denom;
            z[i] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

}  // namespace detail

/// Recognizes r as x - sum a_k/(x - b_k) and returns the transform, or
/// throws NotInClassError naming the failed condition: the degree
/// relation, the leading-coefficient ratio, the constant term, pole
/// reality/simplicity, or residue positivity.
inline MeroTransform<double> from_rational(const RationalFn<double>& r) {
    const Poly<double>& num = r.num;
    const Poly<double>& den = r.den;
    if (num.degree() != den.degree() + 1)
        throw NotInClassError("degree of numerator must exceed denominator by 1",
                              "");
    // den is monic after normalization, so the leading ratio is num's lead.
    if (std::fabs(num.leading() - 1.0) > 1e-10)
        throw NotInClassError("leading-coefficient ratio must be 1", "");
    auto [quot, rem] = poly_divmod(num, den);
    double c = -quot.coeff(0);
    if (std::fabs(c) > 1e-10)
        throw NotInClassError("constant term must vanish",
                              "got " + std::to_string(c));
    if (den.degree() == 0) return MeroTransform<double>(PoleSet<double>{});

    auto roots = detail::all_roots(den);
    std::vector<double> b;
    for (const auto& z : roots) {
        if (std::fabs(z.imag()) > 1e-8 * (1.0 + std::fabs(z.real())))
            throw NotInClassError("denominator has complex roots", "");
        b.push_back(z.real());
    }
    std::sort(b.begin(), b.end());
    Poly<double> dden = den.derivative();
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        if (std::fabs(b[i + 1] - b[i]) <= 1e-8 * scale)
            throw NotInClassError("denominator has repeated roots", "");
    // Newton-polish the real roots.
    for (double& v : b)
        for (int it = 0; it < 3; ++it) {
            double d = dden.eval(v);
            if (d == 0.0) break;
            v -= den.eval(v) / d;
        }

    std::vector<PoleTerm<double>> terms;
    for (double v : b) {
        double a = -rem.eval(v) / dden.eval(v);
        if (!(a > 1e-10))
            throw NotInClassError("residues must be strictly negative",
                                  "pole at b=" + std::to_string(v) +
                                      " has residue " + std::to_string(-a));
        terms.push_back({a, v});
    }
    return MeroTransform<double>(PoleSet<double>(std::move(terms)));
}

namespace detail {

inline std::vector<std::int64_t> small_divisors(std::int64_t v) {
    v = v < 0 ? -v : v;
    if (v == 0) return {};
    if (v > 1000000000000LL)
        throw std::domain_error(
            "exact factorization out of range (constant too large)");
    std::vector<std::int64_t> out;
    for (std::int64_t d = 1; d * d <= v; ++d)
        if (v % d == 0) {
            out.push_back(d);
            if (d != v / d) out.push_back(v / d);
        }
    return out;
}

/// All roots of an exact-rational polynomial that splits into distinct
/// rational linear factors; throws if it does not split.
inline std::vector<Rat> rational_roots_of_split_poly(Poly<Rat> p) {
    std::vector<Rat> roots;
    while (p.degree() > 0) {
        // strip x | p
        if (ring_traits<Rat>::is_zero(p.coeff(0))) {
            roots.push_back(Rat(0));
            p = deflate(p, Rat(0));
            continue;
        }
        // scale to a primitive integer polynomial
        BigInt lcm_den(1);
        for (const auto& c : p.coeffs())
            lcm_den = boost::multiprecision::lcm(lcm_den, denominator(c));
        std::vector<BigInt> ic;
        for (const auto& c : p.coeffs())
            ic.push_back(numerator(c) * (lcm_den / denominator(c)));
        BigInt g(0);
        for (const auto& c : ic) g = boost::multiprecision::gcd(g, c);
        if (g > 1)
            for (auto& c : ic) c /= g;
        BigInt lead = ic.back(), cst = ic.front();
        if (lead > BigInt(1000000000000LL) || cst > BigInt(1000000000000LL) ||
            lead < BigInt(-1000000000000LL) || cst < BigInt(-1000000000000LL))
            throw std::domain_error(
                "exact factorization out of range (coefficients too large)");
        bool found = false;
        for (std::int64_t pn : small_divisors(cst.convert_to<std::int64_t>())) {
            for (std::int64_t qd :
                 small_divisors(lead.convert_to<std::int64_t>())) {
                for (int sign = 0; sign < 2 && !found; ++sign) {
                    Rat cand(sign == 0 ? pn : -pn, qd);
                    if (ring_traits<Rat>::is_zero(p.eval(cand))) {
                        roots.push_back(cand);
                        p = deflate(p, cand);
                        found = true;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found)
            throw std::domain_error(
                "exact mode requires the denominator to split over the "
                "rationals");
    }
    return roots;
}

}  // namespace detail

/// Exact-arithmetic variant: conditions are tested exactly; the denominator
/// must split into distinct rational linear factors.
inline MeroTransform<Rat> from_rational(const RationalFn<Rat>& r) {
    const Poly<Rat>& num = r.num;
    const Poly<Rat>& den = r.den;
    if (num.degree() != den.degree() + 1)
        throw NotInClassError("degree of numerator must exceed denominator by 1",
                              "");
    if (!(num.leading() == Rat(1)))
        throw NotInClassError("leading-coefficient ratio must be 1", "");
    auto [quot, rem] = poly_divmod(num, den);
    if (!quot.coeff(0).is_zero())
        throw NotInClassError("constant term must vanish",
                              "got " + quot.coeff(0).str());
    if (den.degree() == 0) return MeroTransform<Rat>(PoleSet<Rat>{});

    std::vector<Rat> b = detail::rational_roots_of_split_poly(den);
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        if (b[i] == b[i + 1])
            throw NotInClassError("denominator has repeated roots", "");
    Poly<Rat> dden = den.derivative();
    std::vector<PoleTerm<Rat>> terms;
    for (const Rat& v : b) {
        Rat a = -rem.eval(v) / dden.eval(v);
        if (!(a > 0))
            throw NotInClassError("residues must be strictly negative",
                                  "pole at b=" + v.str() + " has residue " +
                                      Rat(-a).str());
        terms.push_back({a, v});
    }
    return MeroTransform<Rat>(PoleSet<Rat>(std::move(terms)));
}

/// outer(inner(x)) as a rational map, fed back through from_rational. The
/// class is not known to be closed under composition; NotInClassError
/// carries the composed rational for diagnosis.
template <class K>
MeroTransform<K> compose(const MeroTransform<K>& outer,
                         const MeroTransform<K>& inner) {
    auto [num, nden] = compose_poly_rational(
        outer.rational.num, inner.rational.num, inner.rational.den);
    auto [dnum, dden] = compose_poly_rational(
        outer.rational.den, inner.rational.num, inner.rational.den);
    (void)dden;
    // outer.num has degree one above outer.den, so nden = dden * inner.den:
    // r = num / (dnum * inner.den).
    RationalFn<K> composed(num, dnum * inner.rational.den);
    try {
        return from_rational(composed);
    } catch (const NotInClassError& e) {
        throw NotInClassError(e.condition(),
                              "composed rational: (" +
                                  poly_to_string(composed.num) + ") / (" +
                                  poly_to_string(composed.den) + ")");
    }
}

/// Truncation of the cotangent pole expansion: unit residues at the integers
/// 0, +-1, ..., +-N, i.e. u_N(x) = x - 1/x - sum_{k=1}^N (1/(x-k) + 1/(x+k)).
inline MeroTransform<double> cot_truncation(int N) {
    if (N < 0) throw std::invalid_argument("cot_truncation: N must be >= 0");
    std::vector<PoleTerm<double>> terms;
    terms.reserve(2 * static_cast<std::size_t>(N) + 1);
    for (int k = -N; k <= N; ++k)
        terms.push_back({1.0, static_cast<double>(k)});
    return MeroTransform<double>(PoleSet<double>(std::move(terms)));
}

}  // namespace mero

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mero/scalar.hpp"

namespace mero {

/// Dense univariate polynomial over a coefficient ring R, stored as
/// ascending-degree coefficients. The zero polynomial is canonical: empty
/// coefficient vector, degree() == -1 (the "minus infinity" sentinel).
template <class R>
class Poly {
public:
    using traits = ring_traits<R>;

    Poly() = default;
    Poly(std::initializer_list<R> cs) : c_(cs) { trim(); }
    explicit Poly(std::vector<R> cs) : c_(std::move(cs)) { trim(); }

    static Poly zero() { return Poly(); }
    static Poly one() { return Poly{traits::one()}; }
    static Poly constant(R c) { return Poly{std::move(c)}; }
    /// The monomial x.
    static Poly identity() { return Poly{traits::zero(), traits::one()}; }

    /// Builds from coefficients that are structurally exact (e.g. monic
    /// products assembled coefficient-by-coefficient): only exact zeros are
    /// trimmed, bypassing the round-off threshold, which would misread a
    /// unit leading coefficient next to a huge dynamic range as noise.
    static Poly from_raw(std::vector<R> cs) {
        Poly p;
        p.c_ = std::move(cs);
        while (!p.c_.empty() && traits::is_zero(p.c_.back())) p.c_.pop_back();
        return p;
    }

    const std::vector<R>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    /// Coefficient of x^i; zero beyond the stored degree.
    R coeff(std::size_t i) const {
        return i < c_.size() ? c_[i] : traits::zero();
    }
    const R& leading() const {
        if (c_.empty()) throw std::logic_error("leading() of zero polynomial");
        return c_.back();
    }

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator-() const {
        Poly r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), traits::zero());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), traits::zero());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
        trim();
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<R> out(a.c_.size() + b.c_.size() - 1, traits::zero());
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                out[i + j] = out[i + j] + a.c_[i] * b.c_[j];
        return Poly(std::move(out));
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    /// Multiplies every coefficient by s.
    Poly scaled(const R& s) const {
        if (traits::is_zero(s)) return Poly();
        Poly r(*this);
        for (auto& c : r.c_) c = c * s;
        r.trim();
        return r;
    }

    /// Horner evaluation; exact over an exact ring.
    R eval(const R& x) const {
        R acc = traits::zero();
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    /// Formal derivative.
    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<R> out(c_.size() - 1, traits::zero());
        for (std::size_t i = 1; i < c_.size(); ++i)
            out[i - 1] = c_[i] * traits::from_int(static_cast<long long>(i));
        return Poly(std::move(out));
    }

private:
    void trim() {
        double scale = 0.0;
        for (const auto& c : c_) scale = std::max(scale, traits::magnitude(c));
        while (!c_.empty() &&
               (traits::is_zero(c_.back()) ||
                traits::negligible(c_.back(), scale)))
            c_.pop_back();
    }

    std::vector<R> c_;
};

// Nested polynomials form a ring themselves; this makes Poly<Poly<K>> work
// for the x-polynomial-with-u-polynomial-coefficients expansion.
template <class K>
struct ring_traits<Poly<K>> {
    static constexpr bool exact = ring_traits<K>::exact;
    static Poly<K> zero() { return Poly<K>(); }
    static Poly<K> one() { return Poly<K>::one(); }
    static Poly<K> from_int(long long n) {
        return Poly<K>::constant(ring_traits<K>::from_int(n));
    }
    static bool is_zero(const Poly<K>& p) { return p.is_zero(); }
    static double magnitude(const Poly<K>& p) {
        double m = 0.0;
        for (const auto& c : p.coeffs())
            m = std::max(m, ring_traits<K>::magnitude(c));
        return m;
    }
    static bool negligible(const Poly<K>& p, double) { return p.is_zero(); }
};

template <class K>
Poly<double> to_float_poly(const Poly<K>& p) {
    std::vector<double> cs;
    cs.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) cs.push_back(to_double(c));
    return Poly<double>(std::move(cs));
}

/// Horner evaluation in extended precision (oracle-grade accuracy).
template <class K>
long double eval_long_double(const Poly<K>& p, long double x) {
    long double acc = 0.0L;
    const auto& cs = p.coeffs();
    for (std::size_t i = cs.size(); i-- > 0;)
        acc = acc * x + to_long_double(cs[i]);
    return acc;
}

/// Quotient and remainder of a / b over a field K; deg(rem) < deg(b).
template <class K>
std::pair<Poly<K>, Poly<K>> poly_divmod(const Poly<K>& a, const Poly<K>& b) {
    if (b.is_zero()) throw std::invalid_argument("polynomial division by zero");
    std::vector<K> rem(a.coeffs());
    const int db = b.degree();
    const int da = a.degree();
    if (da < db) return {Poly<K>(), a};
    std::vector<K> quot(static_cast<std::size_t>(da - db + 1),
                        ring_traits<K>::zero());
    const K& lead = b.leading();
    for (int i = da; i >= db; --i) {
        K q = rem[static_cast<std::size_t>(i)] / lead;
        quot[static_cast<std::size_t>(i - db)] = q;
        if (ring_traits<K>::is_zero(q)) continue;
        for (int j = 0; j <= db; ++j)
            rem[static_cast<std::size_t>(i - db + j)] =
                rem[static_cast<std::size_t>(i - db + j)] -
                q * b.coeff(static_cast<std::size_t>(j));
    }
    rem.resize(static_cast<std::size_t>(db > 0 ? db : 0));
    return {Poly<K>(std::move(quot)), Poly<K>(std::move(rem))};
}

/// Divides p by (x - root); exact when root is a true root (synthetic
/// division, the remainder is discarded).
template <class K>
Poly<K> deflate(const Poly<K>& p, const K& root) {
    if (p.degree() < 1) return Poly<K>();
    std::vector<K> out(static_cast<std::size_t>(p.degree()),
                       ring_traits<K>::zero());
    K carry = p.leading();
    for (int i = p.degree() - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = carry;
        carry = p.coeff(static_cast<std::size_t>(i)) + carry * root;
    }
    return Poly<K>(std::move(out));
}

/// Monic GCD over an exact field (Euclid). Only used to normalize rational
/// functions in exact mode.
template <class K>
Poly<K> poly_gcd(Poly<K> a, Poly<K> b) {
    static_assert(ring_traits<K>::exact, "gcd requires exact arithmetic");
    while (!b.is_zero()) {
        auto [q, r] = poly_divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) a = a.scaled(ring_traits<K>::one() / a.leading());
    return a;
}

/// Rational function num/den, kept with a monic denominator. In exact mode
/// the common factor is removed as well.
template <class K>
struct RationalFn {
    Poly<K> num;
    Poly<K> den;

    struct already_normalized_tag {};

    RationalFn() : den(Poly<K>::one()) {}
    RationalFn(Poly<K> n, Poly<K> d) : num(std::move(n)), den(std::move(d)) {
        normalize();
    }
    /// For callers that construct num/den monic and coprime directly.
    RationalFn(Poly<K> n, Poly<K> d, already_normalized_tag)
        : num(std::move(n)), den(std::move(d)) {}

    K eval(const K& x) const { return num.eval(x) / den.eval(x); }

private:
    void normalize() {
        if (den.is_zero())
            throw std::invalid_argument("rational function with zero denominator");
        if constexpr (ring_traits<K>::exact) {
            if (!num.is_zero()) {
                Poly<K> g = poly_gcd(num, den);
                if (g.degree() > 0) {
                    num = poly_divmod(num, g).first;
                    den = poly_divmod(den, g).first;
                }
            }
        }
        K lead = den.leading();
        den = den.scaled(ring_traits<K>::one() / lead);
        num = num.scaled(ring_traits<K>::one() / lead);
    }
};

/// Composition outer(inner) for polynomial outer and rational inner, as a
/// (num, den) pair with den = inner.den ^ deg(outer). Homogenized Horner.
template <class K>
std::pair<Poly<K>, Poly<K>> compose_poly_rational(const Poly<K>& outer,
                                                  const Poly<K>& inner_num,
                                                  const Poly<K>& inner_den) {
    if (outer.is_zero()) return {Poly<K>(), Poly<K>::one()};
    const int d = outer.degree();
    Poly<K> acc = Poly<K>::constant(outer.coeff(static_cast<std::size_t>(d)));
    Poly<K> den_pow = Poly<K>::one();
    for (int i = d - 1; i >= 0; --i) {
        den_pow = den_pow * inner_den;
        acc = acc * inner_num +
              den_pow.scaled(outer.coeff(static_cast<std::size_t>(i)));
    }
    Poly<K> full_den = Poly<K>::one();
    for (int i = 0; i < d; ++i) full_den = full_den * inner_den;
    return {acc, full_den};
}

template <class K>
std::string poly_to_string(const Poly<K>& p, const std::string& var = "x") {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        K c = p.coeff(static_cast<std::size_t>(i));
        if (ring_traits<K>::is_zero(c)) continue;
        double sign = to_double(c) < 0 ? -1 : 1;
        if (first) {
            if (sign < 0) os << "-";
        } else {
            os << (sign < 0 ? " - " : " + ");
        }
        first = false;
        K mag = sign < 0 ? K(-c) : c;
        bool unit = scalar_to_string(mag) == "1";
        if (i == 0 || !unit) os << scalar_to_string(mag);
        if (i > 0) {
            if (!unit) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

}  // namespace mero

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mero/poles.hpp"
#include "mero/poly.hpp"

namespace mero {

/// sigma_0..sigma_{n+1} of the branch-root polynomial, each a polynomial in
/// u of degree at most 1 (u enters the defining equation linearly).
template <class K>
struct SigmaSeq {
    std::vector<Poly<K>> sigma;  // sigma[k] = sigma_k, sigma[0] == 1
    std::size_t count() const { return sigma.size(); }
};

/// Power sums tau_1..tau_M of the branch roots; tau[j-1] = tau_j, monic of
/// degree j in u.
template <class K>
struct TauSeq {
    std::vector<Poly<K>> tau;
};

/// Newton's identities as the standard recurrence over any commutative ring:
///   p_m = sum_{i=1}^{m-1} (-1)^{i-1} e_i p_{m-i} + (-1)^{m-1} m e_m,
/// with e_i taken as zero beyond the supplied list. `elementary` holds
/// e_1..e_n (e_0 = 1 implicit).
template <class R>
std::vector<R> newton_power_sums(const std::vector<R>& elementary,
                                 std::size_t M) {
    using T = ring_traits<R>;
    auto e = [&](std::size_t i) -> R {
        return i >= 1 && i <= elementary.size() ? elementary[i - 1] : T::zero();
    };
    std::vector<R> p;
    p.reserve(M);
    for (std::size_t m = 1; m <= M; ++m) {
        R acc = T::zero();
        for (std::size_t i = 1; i < m; ++i) {
            R term = e(i) * p[m - i - 1];
            if (i % 2 == 1)
                acc = acc + term;
            else
                acc = acc - term;
        }
        R last = e(m) * T::from_int(static_cast<long long>(m));
        if (m % 2 == 1)
            acc = acc + last;
        else
            acc = acc - last;
        p.push_back(acc);
    }
    return p;
}

/// Elementary symmetric polynomials e_1..e_n of explicit roots, by
/// incremental expansion of prod (X - x_k). Companion oracle to
/// power_sums_direct.
template <class K>
std::vector<K> sigma_from_roots(const std::vector<K>& roots) {
    using T = ring_traits<K>;
    std::vector<K> e(roots.size() + 1, T::zero());
    e[0] = T::one();
    std::size_t used = 0;
    for (const K& r : roots) {
        ++used;
        for (std::size_t k = used; k >= 1; --k)
            e[k] = e[k] + r * e[k - 1];
    }
    return std::vector<K>(e.begin() + 1, e.end());
}

/// Brute-force power sums sum_k roots[k]^j for j = 1..M.
template <class K>
std::vector<K> power_sums_direct(const std::vector<K>& roots, std::size_t M) {
    using T = ring_traits<K>;
    std::vector<K> pw(roots.size(), T::one());
    std::vector<K> out;
    out.reserve(M);
    for (std::size_t j = 1; j <= M; ++j) {
        K s = T::zero();
        for (std::size_t k = 0; k < roots.size(); ++k) {
            pw[k] = pw[k] * roots[k];
            s = s + pw[k];
        }
        out.push_back(s);
    }
    return out;
}

/// Synthetic division of an x-polynomial with u-polynomial coefficients by
/// (x - b) for scalar b; used for the barred products (l != k).
template <class K>
Poly<Poly<K>> deflate_xpoly(const Poly<Poly<K>>& p, const K& b) {
    if (p.degree() < 1) return Poly<Poly<K>>();
    std::vector<Poly<K>> out(static_cast<std::size_t>(p.degree()));
    Poly<K> carry = p.leading();
    for (int i = p.degree() - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = carry;
        carry = p.coeff(static_cast<std::size_t>(i)) + carry.scaled(b);
    }
    return Poly<Poly<K>>(std::move(out));
}

/// Expands the branch-root equation
///   (u - x) prod_k (x - b_k) + sum_k a_k prod_{l != k} (x - b_l) = 0
/// into a monic degree-(n+1) polynomial in x whose coefficients are affine
/// in u, and reads off the elementary symmetric polynomials of its roots:
/// sigma_k = (-1)^k * coeff(x^{n+1-k}). Returns sigma_0..sigma_{n+1}.
template <class K>
SigmaSeq<K> sigma_from_poles(const PoleSet<K>& poles) {
    using T = ring_traits<K>;
    using UP = Poly<K>;   // polynomial in u
    using XP = Poly<UP>;  // polynomial in x, coefficients in u
    const std::size_t n = poles.size();

    XP prod = XP::one();
    for (const auto& t : poles.terms())
        prod = prod * XP{UP::constant(-t.b), UP::one()};

    // Negate the defining equation so it is monic in x:
    // (x - u) * prod - sum_k a_k * prod/(x - b_k).
    XP x_minus_u{UP{T::zero(), -T::one()}, UP::one()};
    XP m = x_minus_u * prod;
    for (const auto& t : poles.terms())
        m -= deflate_xpoly(prod, t.b).scaled(UP::constant(t.a));

    SigmaSeq<K> out;
    out.sigma.reserve(n + 2);
    for (std::size_t k = 0; k <= n + 1; ++k) {
        UP c = m.coeff(n + 1 - k);
        out.sigma.push_back(k % 2 == 0 ? c : -c);
    }
    return out;
}

/// Power sums tau_1..tau_M of the branch roots as u-polynomials, via the
/// Newton recurrence on the sigma sequence (sigma_k = 0 for k > n+1).
template <class K>
TauSeq<K> tau_from_sigma(const SigmaSeq<K>& sigmas, std::size_t M) {
    if (M < 1) throw std::invalid_argument("tau_from_sigma: M must be >= 1");
    std::vector<Poly<K>> e(sigmas.sigma.begin() + 1, sigmas.sigma.end());
    return TauSeq<K>{newton_power_sums(e, M)};
}

}  // namespace mero

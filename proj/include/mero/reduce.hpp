#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mero/poles.hpp"
#include "mero/poly.hpp"
#include "mero/symm.hpp"

namespace mero {

/// A completed reduction: integrating p(x) F(u(x)) over the line equals
/// integrating q(x) F(x), with q of the same degree and leading coefficient
/// as p.
template <class K>
struct Reduction {
    PoleSet<K> poles;
    Poly<K> p;
    Poly<K> q;
    std::vector<Poly<K>> per_monomial;  // q_m for m = 0..deg p
};

/// q_m = (1/(m+1)) d/du tau_{m+1}: the image of the monomial x^m under the
/// transform with the given poles. Monic of degree m; q_0 = 1, q_1 = u.
template <class K>
Poly<K> reduce_monomial(const PoleSet<K>& poles, std::size_t m) {
    SigmaSeq<K> sig = sigma_from_poles(poles);
    TauSeq<K> tau = tau_from_sigma(sig, m + 1);
    Poly<K> d = tau.tau[m].derivative();
    return d.scaled(ring_traits<K>::one() /
                    ring_traits<K>::from_int(static_cast<long long>(m + 1)));
}

/// Linear extension of reduce_monomial: q = sum_m p_m q_m.
template <class K>
Reduction<K> reduce_poly(const PoleSet<K>& poles, const Poly<K>& p) {
    if (p.is_zero())
        throw std::invalid_argument("reduce_poly: zero polynomial");
    Reduction<K> out;
    out.poles = poles;
    out.p = p;

    // One sigma/tau pass at the top degree covers every monomial.
    SigmaSeq<K> sig = sigma_from_poles(poles);
    const std::size_t deg = static_cast<std::size_t>(p.degree());
    TauSeq<K> tau = tau_from_sigma(sig, deg + 1);

    out.per_monomial.reserve(deg + 1);
    Poly<K> q;
    for (std::size_t m = 0; m <= deg; ++m) {
        Poly<K> qm = tau.tau[m].derivative().scaled(
            ring_traits<K>::one() /
            ring_traits<K>::from_int(static_cast<long long>(m + 1)));
        out.per_monomial.push_back(qm);
        q += qm.scaled(p.coeff(m));
    }
    out.q = q;
    return out;
}

}  // namespace mero

#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mero/poly.hpp"
#include "mero/scalar.hpp"

namespace mero {

/// One simple-pole term a/(x - b) of the transform u(x) = x - sum a_k/(x - b_k).
template <class K>
struct PoleTerm {
    K a;  // residue, strictly positive
    K b;  // pole location
};

/// The transform data {a_k > 0, b_k distinct}. Construction canonicalizes:
/// terms are sorted by ascending b and duplicate b's are merged by summing
/// their residues. An empty set is allowed (u = x).
template <class K>
class PoleSet {
public:
    PoleSet() = default;

    explicit PoleSet(std::vector<PoleTerm<K>> terms) {
        for (auto& t : terms) {
            if (!(to_double(t.a) > 0) || ring_traits<K>::is_zero(t.a))
                throw std::invalid_argument(
                    "PoleSet: residues must be strictly positive");
            bool merged = false;
            for (auto& u : terms_)
                if (u.b == t.b) {
                    u.a = u.a + t.a;
                    merged = true;
                    break;
                }
            if (!merged) terms_.push_back(t);
        }
        std::sort(terms_.begin(), terms_.end(),
                  [](const PoleTerm<K>& x, const PoleTerm<K>& y) {
                      return to_double(x.b) < to_double(y.b) ||
                             (!(to_double(y.b) < to_double(x.b)) &&
                              to_double(x.a) < to_double(y.a));
                  });
    }

    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::vector<PoleTerm<K>>& terms() const { return terms_; }
    const PoleTerm<K>& term(std::size_t k) const { return terms_[k]; }

    /// alpha_1 = sum of residues.
    K alpha1() const {
        K s = ring_traits<K>::zero();
        for (const auto& t : terms_) s = s + t.a;
        return s;
    }
    /// beta_1 = sum of pole locations.
    K beta1() const {
        K s = ring_traits<K>::zero();
        for (const auto& t : terms_) s = s + t.b;
        return s;
    }
    /// beta_2 = second elementary symmetric polynomial of the pole locations.
    K beta2() const {
        K s = ring_traits<K>::zero();
        for (std::size_t i = 0; i < terms_.size(); ++i)
            for (std::size_t j = i + 1; j < terms_.size(); ++j)
                s = s + terms_[i].b * terms_[j].b;
        return s;
    }
    /// sum a_k * b_k.
    K sum_ab() const {
        K s = ring_traits<K>::zero();
        for (const auto& t : terms_) s = s + t.a * t.b;
        return s;
    }

    bool operator==(const PoleSet& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (!(terms_[i].a == o.terms_[i].a && terms_[i].b == o.terms_[i].b))
                return false;
        return true;
    }

private:
    std::vector<PoleTerm<K>> terms_;
};

template <class K>
PoleSet<double> to_float_poles(const PoleSet<K>& ps) {
    std::vector<PoleTerm<double>> ts;
    ts.reserve(ps.size());
    for (const auto& t : ps.terms())
        ts.push_back({to_double(t.a), to_double(t.b)});
    return PoleSet<double>(std::move(ts));
}

}  // namespace mero

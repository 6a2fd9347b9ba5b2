#include <doctest.h>

#include <cmath>

#include "mero/reduce.hpp"
#include "mero/transform.hpp"
#include "test_util.hpp"

using namespace mero;
using namespace mero::testing;

namespace {

/// Independent numeric oracle for q_m: sum over all branch roots of
/// x_k(u)^m * x_k'(u), accumulated in extended precision.
double branch_sum(const MeroTransform<double>& t, int m, double u0) {
    auto br = branches(t, u0);
    long double acc = 0.0L;
    for (double r : br.roots) {
        long double x = r;
        // extra polish keeps the oracle sharper than what it checks
        for (int i = 0; i < 2; ++i)
            x -= (detail::eval_u_ld(t.poles, x) - (long double)u0) /
                 detail::u_prime_ld(t.poles, x);
        long double pw = 1.0L;
        for (int i = 0; i < m; ++i) pw *= x;
        acc += pw / detail::u_prime_ld(t.poles, x);
    }
    return (double)acc;
}

}  // namespace

TEST_CASE("low-order reductions have closed forms") {
    for (int trial = 0; trial < 20; ++trial) {
        int n = rand_int(0, 6);
        PoleSet<Rat> ps = rand_rat_poles(n);
        CHECK(reduce_monomial(ps, 0) == Poly<Rat>::one());
        CHECK(reduce_monomial(ps, 1) == Poly<Rat>::identity());
        CHECK(reduce_monomial(ps, 2) ==
              Poly<Rat>{ps.alpha1(), Rat(0), Rat(1)});
        CHECK(reduce_monomial(ps, 3) ==
              Poly<Rat>{ps.sum_ab(), Rat(2) * ps.alpha1(), Rat(0), Rat(1)});
    }
}

TEST_CASE("pi-configuration monomial reductions") {
    const double pi = M_PI;
    PoleSet<double> ps({{pi, 3.0}, {pi, -3.0}});
    Poly<double> q2 = reduce_monomial(ps, 2);
    REQUIRE(q2.degree() == 2);
    CHECK(std::fabs(q2.coeff(0) - 2.0 * pi) <= 1e-12);
    CHECK(q2.coeff(1) == 0.0);
    CHECK(std::fabs(q2.coeff(2) - 1.0) <= 1e-15);

    Poly<double> q4 = reduce_monomial(ps, 4);
    REQUIRE(q4.degree() == 4);
    CHECK(std::fabs(q4.coeff(0) - (4.0 * pi * pi + 18.0 * pi)) <= 1e-12);
    CHECK(std::fabs(q4.coeff(2) - 6.0 * pi) <= 1e-12);
    CHECK(std::fabs(q4.coeff(4) - 1.0) <= 1e-15);
    CHECK(q4.coeff(1) == 0.0);
    CHECK(q4.coeff(3) == 0.0);
}

TEST_CASE("reduce_poly on the quartic pi fixture, checked by the branch oracle") {
    const double pi = M_PI;
    PoleSet<double> ps({{pi, 3.0}, {pi, -3.0}});
    Poly<double> p{1, 0, 4, 0, 1};
    Reduction<double> red = reduce_poly(ps, p);
    REQUIRE(red.q.degree() == 4);
    CHECK(std::fabs(red.q.coeff(2) - (6.0 * pi + 4.0)) <= 1e-11);
    CHECK(std::fabs(red.q.coeff(0) - (4.0 * pi * pi + 26.0 * pi + 1.0)) <=
          1e-11);
    CHECK(std::fabs(red.q.coeff(4) - 1.0) <= 1e-15);

    MeroTransform<double> t(ps);
    for (int trial = 0; trial < 10; ++trial) {
        double u0 = rand_double(-6.0, 6.0);
        double direct = 0.0;
        for (int m = 0; m <= 4; ++m)
            direct += p.coeff(m) * branch_sum(t, m, u0);
        CHECK(std::fabs(red.q.eval(u0) - direct) <=
              1e-9 * (1.0 + std::fabs(direct)));
    }
}

TEST_CASE("identity and affine prefactors pass through") {
    PoleSet<double> one_pole({{1.0, 0.0}});
    CHECK(reduce_poly(one_pole, Poly<double>{1.0}).q == Poly<double>{1.0});
    for (int trial = 0; trial < 10; ++trial) {
        PoleSet<double> ps = rand_float_poles(rand_int(1, 5));
        CHECK(reduce_poly(ps, Poly<double>{5, 3}).q == Poly<double>{5, 3});
    }
}

TEST_CASE("reduction is linear and preserves degree and leading coefficient") {
    for (int trial = 0; trial < 15; ++trial) {
        PoleSet<Rat> ps = rand_rat_poles(rand_int(0, 8));
        Poly<Rat> p1 = rand_rat_poly(8), p2 = rand_rat_poly(8);
        Rat alpha = rand_rat_nonzero();
        Poly<Rat> combo = p1.scaled(alpha) + p2;
        if (combo.is_zero()) continue;
        auto r1 = reduce_poly(ps, p1), r2 = reduce_poly(ps, p2);
        auto rc = reduce_poly(ps, combo);
        CHECK(rc.q == r1.q.scaled(alpha) + r2.q);
        CHECK(rc.q.degree() == combo.degree());
        CHECK(rc.q.leading() == combo.leading());
    }
}

TEST_CASE("pole input order does not matter") {
    std::vector<PoleTerm<Rat>> terms = {{Rat(1, 2), Rat(3)},
                                        {Rat(2), Rat(-1)},
                                        {Rat(7, 3), Rat(5, 2)}};
    std::vector<PoleTerm<Rat>> shuffled = {terms[2], terms[0], terms[1]};
    PoleSet<Rat> a(terms), b(shuffled);
    Poly<Rat> p = rand_rat_poly(5);
    if (p.is_zero()) p = Poly<Rat>::identity();
    CHECK(reduce_poly(a, p).q == reduce_poly(b, p).q);
}

TEST_CASE("mirror-symmetric pole sets give parity-pure reductions") {
    for (int trial = 0; trial < 10; ++trial) {
        int half = rand_int(1, 3);
        std::vector<PoleTerm<Rat>> ts;
        for (int i = 0; i < half; ++i) {
            Rat a(rand_int(1, 9), rand_int(1, 4));
            Rat b(rand_int(1, 10), rand_int(1, 3));
            ts.push_back({a, b});
            ts.push_back({a, -b});
        }
        PoleSet<Rat> ps(ts);
        for (int m = 0; m <= 6; ++m) {
            Poly<Rat> qm = reduce_monomial(ps, static_cast<std::size_t>(m));
            for (int j = (m % 2 == 0) ? 1 : 0; j <= qm.degree(); j += 2)
                CHECK(qm.coeff(static_cast<std::size_t>(j)).is_zero());
        }
    }
}

TEST_CASE("branch oracle certifies q_m pointwise") {
    for (int n = 1; n <= 5; ++n) {
        PoleSet<double> ps = rand_float_poles(n);
        MeroTransform<double> t(ps);
        for (int m = 0; m <= 6; ++m) {
            Poly<double> qm = reduce_monomial(ps, static_cast<std::size_t>(m));
            for (int trial = 0; trial < 25; ++trial) {
                double u0 = rand_double(-10.0, 10.0);
                double oracle = branch_sum(t, m, u0);
                double predicted = (double)eval_long_double(qm, u0);
                CHECK(std::fabs(oracle - predicted) <= 1e-8);
            }
        }
    }
}

TEST_CASE("zero prefactor is rejected") {
    PoleSet<double> ps({{1.0, 0.0}});
    CHECK_THROWS_AS(reduce_poly(ps, Poly<double>()), std::invalid_argument);
}

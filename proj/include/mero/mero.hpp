#pragma once

// Umbrella header: symbolic reduction of integrals of p(x) F(u(x)) for
// u(x) = x - sum_k a_k/(x - b_k) with positive residues, plus the numeric
// machinery that certifies the resulting identities.

#include "mero/expr.hpp"
#include "mero/poles.hpp"
#include "mero/poly.hpp"
#include "mero/problem.hpp"
#include "mero/quad.hpp"
#include "mero/reduce.hpp"
#include "mero/scalar.hpp"
#include "mero/symm.hpp"
#include "mero/transform.hpp"
#include "mero/verify.hpp"

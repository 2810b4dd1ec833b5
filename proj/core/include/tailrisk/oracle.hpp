#pragma once

#include "tailrisk/distributions.hpp"
#include "tailrisk/model.hpp"
#include "tailrisk/quadrature.hpp"

#include <functional>
#include <span>

namespace tailrisk::oracle {

// Default accuracy of the oracle: purely relative, so that tails far below
// any fixed absolute floor keep their significant digits.
inline constexpr Tolerance kDefaultTolerance{0.0, 1e-8};

struct Exact {
  double value;
  double error;  // absolute bound: quadrature estimate plus truncated mass
};

// E f(V) for f with values in [0, 1], by quadrature over the survival level
// u = P(V > v) in logistic coordinates. Mass beyond the truncation point is
// at most `mass_floor` and is charged to the error.
Exact expect(const TailLaw& law, const std::function<double(double)>& f, Tolerance tol, double mass_floor = 1e-30);

// P(prod_i V_i > x) for up to three independent factors. Point masses are
// folded into the threshold; the heaviest remaining factor is integrated in
// closed form through its survival function.
Exact product_tail(std::span<const TailLaw> laws, double x, Tolerance tol = kDefaultTolerance);

// P(S_n > x) or P(M_n > x) for n <= 2 and independent insurance risks.
Exact model_tail(const ModelSpec& spec, Which which, double x, Tolerance tol = kDefaultTolerance);

}  // namespace tailrisk::oracle

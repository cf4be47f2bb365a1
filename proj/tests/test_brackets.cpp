#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dklb/brackets.hpp"
#include "dklb/error.hpp"

using namespace dklb;

namespace {

Rational q(long num, long den = 1) { return Rational(num, den); }

}  // namespace

TEST_CASE("canonical storage") {
  CHECK(Bracket::make(1, 3, 2) == Bracket{3, 1, 2});
  CHECK(Bracket::make(3, 1, 2).to_string() == "<3,1,2>");
  CHECK_THROWS_AS(Bracket::make(-1, 0, 0), ValidationError);
}

TEST_CASE("base cases") {
  for (int a = 0; a <= 4; ++a) {
    CAPTURE(a);
    BracketExpression e21;
    e21.add(q(-1, 2), 1, a + 1);
    CHECK(reduce({2, 1, a}) == e21);

    BracketExpression e20;
    e20.add(q(-1), 1, a);
    e20.add(q(1, 2), 0, a + 2);
    CHECK(reduce({2, 0, a}) == e20);
  }
  CHECK(reduce({2, 0, 0}).to_string() == "-1*<1,1,0> + 1/2*<0,0,2>");
}

TEST_CASE("reduction of <4,0,0>") {
  const BracketExpression e = reduce({4, 0, 0});
  CHECK(e.to_string() == "1*<2,2,0> - 2*<1,1,2> + 1/2*<0,0,4>");
  CHECK(format_reduction({4, 0, 0}, e) == "<4,0,0> = 1*<2,2,0> - 2*<1,1,2> + 1/2*<0,0,4>");
  // With rho = 1 only the a = 0 term survives: int u'''' u = int (u'')^2.
  CHECK(e.coefficient(2, 0) == 1);
}

TEST_CASE("reduce is idempotent on diagonal input") {
  for (int j = 0; j < 5; ++j) {
    const BracketExpression e = reduce({j, j, 3});
    REQUIRE(e.size() == 1);
    CHECK(e.coefficient(j, 3) == 1);
  }
}

TEST_CASE("closed form holds for every reduction") {
  for (int n = 0; n <= 12; ++n) {
    for (int m = 0; m <= n; ++m) {
      for (int a = 0; a <= 3; ++a) {
        const Bracket b{n, m, a};
        const StructureCheck c = check_proposition_form(b, reduce(b));
        CAPTURE(c.detail);
        CHECK(c.ok);
      }
    }
  }
}

TEST_CASE("coefficient recursion") {
  for (int k = 2; k <= 10; ++k) {
    const StructureCheck c = check_coefficient_recursion(k);
    CAPTURE(k);
    CAPTURE(c.detail);
    CHECK(c.ok);
  }
  // Coefficients depend on the gap only.
  CHECK(proposition_coefficients({7, 3, 1}, reduce({7, 3, 1})) ==
        proposition_coefficients({4, 0, 0}, reduce({4, 0, 0})));
}

TEST_CASE("even and odd expansions") {
  const BracketExpression e2 = evenodd_expand(2);
  CHECK(e2 == reduce({2, 0, 0}));

  const BracketExpression e3 = evenodd_expand(3);
  // sum_j c_j (-1)^{j+1} <j,j,1+2(1-j)>
  REQUIRE(e3.size() == 2);
  CHECK(e3.coefficient(0, 3) < 0);
  CHECK(e3.coefficient(1, 1) > 0);
  CHECK(e3.to_string() == "3/2*<1,1,1> - 1/2*<0,0,3>");

  for (int order = 1; order <= 9; ++order) {
    const BracketExpression e = evenodd_expand(order);
    for (const auto& t : e.terms()) CHECK(t.bracket.a % 2 == order % 2);
  }
  const BracketExpression e6 = evenodd_expand(6);
  for (const auto& t : e6.terms()) CHECK((t.coeff > 0) == (t.bracket.n % 2 == 0));
  CHECK_THROWS_AS(evenodd_expand(0), ValidationError);
}

TEST_CASE("analytic test functions") {
  const GaussianPoly g({1.0}, 1.0);
  // d^3/dx^3 e^{-x^2} = (12x - 8x^3) e^{-x^2}
  const GaussianPoly d3 = g.derivative(3);
  REQUIRE(d3.coeffs().size() == 4);
  CHECK(d3.coeffs()[1] == 12.0);
  CHECK(d3.coeffs()[3] == -8.0);
  CHECK(d3.is_odd());
  CHECK_THROWS_AS(g.derivative(GaussianPoly::kMaxOrder + 1), ValidationError);

  const GaussianPoly one({1.0}, 0.0);
  // <0,0,0> with u = e^{-x^2}, rho = 1 is int e^{-2x^2} = sqrt(pi/2)
  CHECK(eval_numeric(Bracket{0, 0, 0}, g, one) ==
        doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-10));
  // int e^{-2x^2} x^2 dx = sqrt(pi/2) / 4
  CHECK(eval_numeric(Bracket{0, 0, 0}, g, GaussianPoly({0, 0, 1.0}, 0.0)) ==
        doctest::Approx(std::sqrt(std::numbers::pi / 2.0) / 4.0).epsilon(1e-10));
}

TEST_CASE("parity makes odd integrands vanish") {
  const GaussianPoly u({0.0, 1.0, 0.0, -0.3}, 0.5);  // odd
  const GaussianPoly rho({2.0, 0.0, 1.0}, 0.1);      // even
  for (int n = 1; n <= 6; ++n) {
    for (int m = 0; m < n; ++m) {
      if ((n + m) % 2 == 1) CHECK(std::abs(eval_numeric(Bracket{n, m, 0}, u, rho)) <= 1e-10);
    }
  }
}

TEST_CASE("reductions hold numerically") {
  for (const TestPair& tp : standard_test_pairs()) {
    for (int n = 1; n <= 6; ++n) {
      for (int m = 0; m < n; ++m) {
        for (int a = 0; a <= 3; ++a) {
          const Bracket b{n, m, a};
          const double lhs = eval_numeric(b, tp.u, tp.rho);
          const double rhs = eval_numeric(reduce(b), tp.u, tp.rho);
          CAPTURE(b.to_string());
          CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
        }
      }
    }
  }
}

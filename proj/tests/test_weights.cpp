#include <gtest/gtest.h>

#include <numbers>

#include "bergman/weights.hpp"

using namespace bergman;

TEST(Weights, BuiltinValues) {
  const Point z{complex(0.3, 0.4)};
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::standard_alpha(1, 1.0), z), 2.0 * 0.75);
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::standard_alpha(1, 0.0), z), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::gaussian(1, 2.0), z), std::exp(-0.5));
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::gaussian(1, 1.0, weight_kind::GaussianMode::real_part), z), std::exp(-0.09));
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::exp_modulus(1), z), std::exp(0.5));
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::unit(1), z), 1.0);
  const Point z2{complex(0.3, 0.4), complex(0, 0.5)};
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::exp_modulus(2), z2), std::exp(std::sqrt(0.5)));
  EXPECT_DOUBLE_EQ(evaluate_weight(Weight::standard_alpha(2, 2.0), z2), 9.0 * 0.75 * 0.75 * 0.75 * 0.75);
}

TEST(Weights, AngularAndProduct) {
  const Weight a = Weight::angular(1, "4*pi^2 - th1^2");
  const double pi = std::numbers::pi;
  EXPECT_NEAR(evaluate_weight(a, Point{complex(0, 0.5)}), 4 * pi * pi - pi * pi / 4, 1e-12);
  const Weight p = Weight::product(1, "r1", "2 + cos(th1)");
  EXPECT_NEAR(evaluate_weight(p, Point{complex(-0.5, 0)}), 0.5 * 1.0, 1e-15);
  EXPECT_TRUE(a.is_angular());
  EXPECT_TRUE(p.is_product());
  EXPECT_THROW(Weight::angular(1, "r1 + th1"), invalid_argument_error);
  EXPECT_THROW(Weight::product(1, "th1", "1"), invalid_argument_error);
  EXPECT_THROW(Weight::product(1, "1", "x1"), invalid_argument_error);
}

TEST(Weights, DomainAndPositivity) {
  EXPECT_THROW(evaluate_weight(Weight::unit(1), Point{complex(1.0, 0)}), weight_domain_error);
  EXPECT_THROW(evaluate_weight(Weight::unit(2), Point{0.1}), invalid_argument_error);
  EXPECT_THROW(evaluate_weight(Weight::expression(1, "x1"), Point{complex(-0.5, 0)}), weight_domain_error);
  EXPECT_THROW(evaluate_weight(Weight::expression(1, "log(r1)"), Point{complex(0, 0)}), weight_domain_error);
  try {
    evaluate_weight(Weight::expression(1, "x1"), Point{complex(-0.5, 0.25)});
    FAIL();
  } catch (const weight_domain_error& e) {
    ASSERT_EQ(e.point().size(), 1u);
    EXPECT_EQ(e.point()[0], complex(-0.5, 0.25));
  }
  EXPECT_THROW(Weight::standard_alpha(1, -1.0), invalid_argument_error);
  EXPECT_THROW(Weight::gaussian(1, 0.0), invalid_argument_error);
}

TEST(Weights, DilationRatio) {
  const Point z{complex(0.2, 0.1)};
  EXPECT_NEAR(dilation_ratio(Weight::angular(1, "1 + th1"), z, 0.7, 0), 1.0, 1e-12);
  const double r = 0.8, s = std::norm(z[0]);
  EXPECT_NEAR(dilation_ratio(Weight::gaussian(1, 1.0), z, r, 0), std::exp(-s / (r * r) + s), 1e-14);
  EXPECT_NEAR(dilation_ratio(Weight::standard_alpha(1, 1.0), z, r, 3), r * r * r * (1 - s / (r * r)) / (1 - s), 1e-14);
  EXPECT_THROW(dilation_ratio(Weight::unit(1), z, 1.0, 0), invalid_argument_error);
  EXPECT_THROW(dilation_ratio(Weight::unit(1), Point{complex(0.5, 0)}, 0.5, 0), invalid_argument_error);
  const Point zb{complex(0.5, 0), complex(0.5, 0)};
  EXPECT_NO_THROW(dilation_ratio(Weight::unit(2), zb, 0.6, 0, Domain::polydisk));
  EXPECT_THROW(dilation_ratio(Weight::unit(2), zb, 0.6, 0, Domain::ball), invalid_argument_error);
}

TEST(Weights, FromName) {
  EXPECT_EQ(weight_from_name("gaussian", 1, 0, 2).describe(), "gaussian(beta=2)");
  EXPECT_EQ(weight_from_name("gaussian_real", 1).describe(), "gaussian_real(beta=1)");
  EXPECT_EQ(weight_from_name("standard_alpha", 2, 1.5).describe(), "standard_alpha(alpha=1.5)");
  EXPECT_EQ(weight_from_name("exp_modulus", 1).describe(), "exp_modulus");
  EXPECT_EQ(weight_from_name("angular:1+th1", 1).describe(), "angular:(1+th1)");
  EXPECT_EQ(weight_from_name("product:r1|2", 1).describe(), "product:r1|2");
  EXPECT_EQ(weight_from_name("expr:exp(-absz)", 1).describe(), "expr:exp((-absz))");
  EXPECT_THROW(weight_from_name("nope", 1), invalid_argument_error);
  EXPECT_THROW(weight_from_name("product:r1", 1), invalid_argument_error);
  EXPECT_THROW(weight_from_name("expr:1 +", 1), parse_error);
}

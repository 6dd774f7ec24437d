// Copyright 2026 The efsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
#include <gtest/gtest.h>

#include <cmath>

#include "efsim/error.hpp"
#include "efsim/least_squares.hpp"
#include "efsim/objective.hpp"
#include "efsim/oracle.hpp"
#include "efsim/running_stats.hpp"
#include "reference.hpp"

using namespace efsim;

namespace {

std::shared_ptr<const LeastSquares> small_least_squares() {
  RngStream data(7, 0, StreamPurpose::data);
  return make_least_squares(40, 4, data, 0.5);
}

}  // namespace

TEST(Oracle, DeterministicReturnsExactGradient) {
  const auto f = make_quadratic(6, 0.1, 1.0);
  const auto o = GradientOracle::deterministic(f);
  EXPECT_EQ(o.kind(), NoiseKind::none);
  EXPECT_EQ(o.declared_m(), 0.0);
  EXPECT_EQ(o.declared_sigma2(), 0.0);
  RngStream rng(1, 0, StreamPurpose::oracle);
  const Vec x = Vec::ones(6);
  EXPECT_EQ(o.sample(x, rng), f->gradient(x));
}

TEST(Oracle, AdditiveIsUnbiasedWithDeclaredSecondMoment) {
  const auto f = make_quadratic(5, 0.1, 1.0);
  const auto o = GradientOracle::additive(f, 1.0);
  RngStream rng(2, 0, StreamPurpose::oracle);
  const Vec x{1.0, -0.5, 2.0, 0.0, 1.0};
  const Vec grad = f->gradient(x);
  Vec mean(5);
  RunningStats noise;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec g = o.sample(x, rng);
    mean.axpy(1.0 / n, g);
    noise.push(distance_sq(g, grad));
  }
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(mean[j], grad[j], 0.02 * norm(grad) + 0.02);
  }
  EXPECT_GE(noise.mean(), 0.98);
  EXPECT_LE(noise.mean(), 1.02);
}

TEST(Oracle, ZeroVarianceAdditiveIsDeterministic) {
  const auto o = GradientOracle::additive(make_quadratic(3, 0.1, 1.0), 0.0);
  EXPECT_EQ(o.kind(), NoiseKind::none);
}

TEST(Oracle, FiniteSumDeclaresWeakConstants) {
  const auto f = small_least_squares();
  const auto o = GradientOracle::finite_sum(f);
  EXPECT_EQ(o.declared_m(), 6.0);
  EXPECT_EQ(o.assumption(), NoiseAssumption::weak);
  // Independent enumeration of (1/n) sum ||grad f_i(x*)||^2.
  const Vec& xs = *f->x_star();
  double var = 0.0;
  Vec gi(4);
  for (std::size_t i = 0; i < f->num_components(); ++i) {
    f->component_gradient(i, xs, gi);
    var += norm_sq(gi) / static_cast<double>(f->num_components());
  }
  EXPECT_NEAR(o.declared_sigma2(), 3.0 * var, 1e-12 * (1 + var));
  EXPECT_NEAR(o.declared_sigma2() / 3.0, var, 1e-12 * (1 + var));
}

TEST(Oracle, FiniteSumIsExactlyUnbiasedUnderEnumeration) {
  const auto f = small_least_squares();
  const Vec x{0.5, 1.0, -1.0, 2.0};
  Vec mean(4);
  Vec gi(4);
  for (std::size_t i = 0; i < f->num_components(); ++i) {
    f->component_gradient(i, x, gi);
    mean.axpy(1.0 / static_cast<double>(f->num_components()), gi);
  }
  EXPECT_LE(std::sqrt(distance_sq(mean, f->gradient(x))), 1e-12);
}

TEST(Oracle, FiniteSumSamplesAComponent) {
  const auto f = small_least_squares();
  const auto o = GradientOracle::finite_sum(f);
  RngStream rng(3, 0, StreamPurpose::oracle);
  const Vec x{0.5, 1.0, -1.0, 2.0};
  const Vec g = o.sample(x, rng);
  bool found = false;
  Vec gi(4);
  for (std::size_t i = 0; i < f->num_components() && !found; ++i) {
    f->component_gradient(i, x, gi);
    found = gi == g;
  }
  EXPECT_TRUE(found);
}

TEST(Oracle, StrongGrowthSecondMomentIsM) {
  const auto f = make_quadratic(4, 0.1, 1.0);
  const auto o = GradientOracle::strong_growth(f, 2.0);
  RngStream rng(4, 0, StreamPurpose::oracle);
  const Vec x = Vec::ones(4);
  const double gsq = norm_sq(f->gradient(x));
  RunningStats s;
  for (int i = 0; i < 100000; ++i) s.push(distance_sq(o.sample(x, rng), f->gradient(x)) / gsq);
  EXPECT_NEAR(s.mean(), 2.0, 3 * s.std_error());
}

TEST(Oracle, StrongGrowthIsNoiselessAtStationaryPoint) {
  const auto f = make_quadratic(4, 0.1, 1.0);
  const auto o = GradientOracle::strong_growth(f, 3.0);
  RngStream rng(5, 0, StreamPurpose::audit);
  const auto r = audit_noise(o, {Vec::zeros(4)}, 1000, rng);
  EXPECT_EQ(r.points[0].second_moment, 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(Oracle, InvalidParametersRejected) {
  const auto f = make_quadratic(3, 0.1, 1.0);
  EXPECT_THROW(GradientOracle::additive(f, -1.0), Error);
  EXPECT_THROW(GradientOracle::strong_growth(f, -1.0), Error);
}

TEST(NoiseAudit, DeterministicSlackIsFullBound) {
  const auto f = make_quadratic(4, 0.1, 1.0);
  const auto o = GradientOracle::deterministic(f);
  RngStream rng(6, 0, StreamPurpose::audit);
  const auto r = audit_noise(o, {Vec::ones(4), Vec{1, 2, 3, 4}}, 1000, rng);
  for (const auto& p : r.points) {
    EXPECT_EQ(p.second_moment, 0.0);
    EXPECT_EQ(p.slack_general, p.bound_general);
  }
}

TEST(NoiseAudit, FiniteSumAtOptimumIsExact) {
  const auto f = small_least_squares();
  const auto o = GradientOracle::finite_sum(f);
  RngStream rng(7, 0, StreamPurpose::audit);
  const auto r = audit_noise(o, {*f->x_star()}, 1000, rng);
  const auto& p = r.points[0];
  EXPECT_TRUE(p.exact);
  EXPECT_EQ(p.std_error, 0.0);
  // E||xi||^2 at x* is the component variance sigma^2 / 3; the bound is sigma^2.
  EXPECT_NEAR(p.second_moment, o.declared_sigma2() / 3.0, 1e-12);
  EXPECT_NEAR(p.bound_weak, o.declared_sigma2(), 1e-12);
}

TEST(NoiseAudit, ShippedOraclesNeverFlagged) {
  const auto q = make_quadratic(10, 0.1, 1.0);
  const std::vector<GradientOracle> oracles = {
      GradientOracle::deterministic(q), GradientOracle::additive(q, 1.0),
      GradientOracle::strong_growth(q, 2.0), GradientOracle::finite_sum(small_least_squares())};
  for (std::size_t k = 0; k < oracles.size(); ++k) {
    const auto& o = oracles[k];
    RngStream probe(8, static_cast<std::uint32_t>(k), StreamPurpose::probe);
    std::vector<Vec> points;
    for (int i = 0; i < 100; ++i) {
      Vec x = o.objective().reference_point();
      x.axpy(1.0, gaussian_vector(probe, x.size(), 3.0));
      points.push_back(x);
    }
    RngStream rng(9, static_cast<std::uint32_t>(k), StreamPurpose::audit);
    const auto r = audit_noise(o, points, 10000, rng);
    EXPECT_TRUE(r.passed()) << to_string(o.kind());
  }
}

TEST(NoiseAudit, EstimateSeparatesNoiseLevels) {
  const auto q = make_quadratic(5, 0.1, 1.0);
  const auto loud = GradientOracle::additive(q, 4.0);
  RngStream rng(10, 0, StreamPurpose::audit);
  const auto r = audit_noise(loud, {Vec::ones(5)}, 10000, rng);
  const auto& p = r.points[0];
  EXPECT_GT(p.second_moment - 3 * p.std_error, 1.0);
}

TEST(NoiseAudit, RequiresEnoughTrials) {
  const auto o = GradientOracle::additive(make_quadratic(3, 0.1, 1.0), 1.0);
  RngStream rng(11, 0, StreamPurpose::audit);
  EXPECT_THROW(audit_noise(o, {Vec::ones(3)}, 10, rng), Error);
}

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

#include "efsim/compressor.hpp"
#include "efsim/engine.hpp"
#include "efsim/error.hpp"
#include "efsim/objective.hpp"
#include "efsim/oracle.hpp"
#include "reference.hpp"

using namespace efsim;

namespace {

GradientOracle half_square() { return GradientOracle::deterministic(make_quadratic(1, 1.0, 1.0)); }

GradientOracle noisy_quadratic(std::size_t d = 20, double sigma2 = 1.0) {
  return GradientOracle::additive(make_quadratic(d, 0.1, 1.0), sigma2);
}

std::vector<AlgorithmSpec> all_kinds() {
  return {PlainSgd{},
          DelayedSgd{4, DelayModel::fixed},
          DelayedSgd{4, DelayModel::iid_bounded},
          CompressedSgd{Compressor::rand_drop(4.0)},
          CompressedSgd{Compressor::rand_coordinate(0.3)},
          CompressedSgd{Compressor::top_k(3, 20)},
          MiniBatchSgd{4},
          LocalSgd{4, 4}};
}

}  // namespace

TEST(Engine, InitialStateHasZeroError) {
  const Engine e(noisy_quadratic(), PlainSgd{}, StepsizeSchedule::constant(0.01));
  const Vec x0 = Vec::ones(20);
  const RunState s = e.initial_state(x0);
  EXPECT_EQ(s.e, Vec::zeros(20));
  EXPECT_EQ(s.x_tilde, x0);
  EXPECT_EQ(s.x, x0);
}

TEST(Engine, DelayedHandUnroll) {
  const Engine e(half_square(), DelayedSgd{2}, StepsizeSchedule::constant(0.1), false);
  RunState s = e.initial_state(Vec{1.0});
  RunStreams r = e.make_streams(1);
  const auto expected = ref::delayed_scalar_gd(1.0, 0.1, 2, 6);
  for (std::size_t t = 0; t <= 6; ++t) {
    EXPECT_NEAR(s.x[0], expected[t], 1e-15) << "t=" << t;
    if (t == 3) {
      EXPECT_NEAR(s.e[0], 0.2, 1e-15);
      EXPECT_NEAR(s.x_tilde[0], 0.7, 1e-15);
      EXPECT_NEAR(s.x_tilde[0], s.x[0] - s.e[0], 1e-15);
    }
    if (t < 6) e.step(s, r);
  }
  EXPECT_NEAR(expected[3], 0.9, 1e-15);
  EXPECT_NEAR(expected[6], 0.61, 1e-15);
}

TEST(Engine, DelayOneIsSgdWithOneFrozenStep) {
  const Engine d(half_square(), DelayedSgd{1}, StepsizeSchedule::constant(0.3), false);
  RunState s = d.initial_state(Vec{1.0});
  RunStreams r = d.make_streams(1);
  const auto expected = ref::delayed_scalar_gd(1.0, 0.3, 1, 20);
  for (std::size_t t = 0; t < 20; ++t) d.step(s, r);
  EXPECT_NEAR(s.x[0], expected[20], 1e-15);
}

TEST(Engine, PendingQueueEqualsTrackedError) {
  for (auto model : {DelayModel::fixed, DelayModel::iid_bounded}) {
    const Engine e(noisy_quadratic(), DelayedSgd{5, model}, StepsizeSchedule::constant(0.01));
    RunState s = e.initial_state(Vec::ones(20));
    RunStreams r = e.make_streams(3);
    for (int t = 0; t < 500; ++t) {
      e.step(s, r);
      EXPECT_LE(std::sqrt(distance_sq(pending_error(s), s.e)), 1e-12);
    }
  }
}

TEST(Engine, IidDelayNeverExceedsBound) {
  const Engine e(noisy_quadratic(), DelayedSgd{3, DelayModel::iid_bounded},
                 StepsizeSchedule::constant(0.01));
  RunState s = e.initial_state(Vec::ones(20));
  RunStreams r = e.make_streams(4);
  for (int t = 0; t < 300; ++t) {
    e.step(s, r);
    for (const auto& p : s.pending) EXPECT_LE(p.due, s.t + 3);
  }
}

TEST(Engine, IdentityCompressorMatchesPlainSgd) {
  const auto oracle = noisy_quadratic();
  const Engine plain(oracle, PlainSgd{}, StepsizeSchedule::constant(0.05));
  const Engine ec(oracle, CompressedSgd{}, StepsizeSchedule::constant(0.05));
  RunState a = plain.initial_state(Vec::ones(20));
  RunState b = ec.initial_state(Vec::ones(20));
  RunStreams ra = plain.make_streams(9);
  RunStreams rb = ec.make_streams(9);
  for (int t = 0; t < 1000; ++t) {
    plain.step(a, ra);
    ec.step(b, rb);
  }
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(b.e, Vec::zeros(20));
}

TEST(Engine, PlainSgdMatchesDirectImplementation) {
  const auto oracle = noisy_quadratic();
  const Engine e(oracle, PlainSgd{}, StepsizeSchedule::constant(0.05));
  RunState s = e.initial_state(Vec::ones(20));
  RunStreams r = e.make_streams(5);
  RngStream direct_rng(5, 0, StreamPurpose::oracle);
  const auto xs = ref::direct_sgd(oracle, Vec::ones(20), 0.05, 500, direct_rng);
  for (int t = 0; t < 500; ++t) e.step(s, r);
  EXPECT_EQ(s.x, xs.back());
}

TEST(Engine, MiniBatchMatchesDirectImplementation) {
  const auto oracle = noisy_quadratic();
  const std::size_t tau = 4;
  const Engine e(oracle, MiniBatchSgd{tau}, StepsizeSchedule::constant(0.01));
  RunState s = e.initial_state(Vec::ones(20));
  RunStreams r = e.make_streams(6);
  RngStream direct_rng(6, 0, StreamPurpose::oracle);
  const auto xs = ref::direct_minibatch(oracle, Vec::ones(20), 0.01, tau, 400, direct_rng);
  for (std::size_t t = 0; t < 400; ++t) {
    e.step(s, r);
    EXPECT_EQ(s.x, xs[t + 1]);
    if (s.t % tau == 0) EXPECT_EQ(s.e, Vec::zeros(20));
  }
}

TEST(Engine, LocalSingleWorkerIsPlainSgd) {
  const auto oracle = noisy_quadratic();
  const Engine plain(oracle, PlainSgd{}, StepsizeSchedule::constant(0.02));
  const Engine local(oracle, LocalSgd{1, 5}, StepsizeSchedule::constant(0.02));
  RunState a = plain.initial_state(Vec::ones(20));
  RunState b = local.initial_state(Vec::ones(20));
  RunStreams ra = plain.make_streams(7);
  RunStreams rb = local.make_streams(7);
  for (int t = 0; t < 1000; ++t) {
    plain.step(a, ra);
    local.step(b, rb);
    ASSERT_EQ(a.x, local.model(b)) << t;
  }
}

TEST(Engine, LocalDeterministicWorkersStayIdentical) {
  const Engine e(GradientOracle::deterministic(make_quadratic(5, 0.1, 1.0)), LocalSgd{4, 3},
                 StepsizeSchedule::constant(0.01));
  RunState s = e.initial_state(Vec::ones(5));
  RunStreams r = e.make_streams(8);
  for (int t = 0; t < 100; ++t) {
    e.step(s, r);
    for (const auto& w : s.workers) EXPECT_EQ(w, s.workers[0]);
    EXPECT_EQ(e.max_dispersion(s), 0.0);
  }
}

TEST(Engine, LocalDispersionResetsAtSync) {
  const Engine e(noisy_quadratic(), LocalSgd{4, 5}, StepsizeSchedule::constant(0.01));
  RunState s = e.initial_state(Vec::ones(20));
  RunStreams r = e.make_streams(9);
  bool saw_spread = false;
  for (int t = 0; t < 100; ++t) {
    e.step(s, r);
    if (s.t % 5 == 0) {
      EXPECT_LE(e.max_dispersion(s), 1e-12);
    } else {
      saw_spread = saw_spread || e.max_dispersion(s) > 1e-6;
    }
  }
  EXPECT_TRUE(saw_spread);
}

TEST(Engine, VirtualIterateIdentityForEveryKind) {
  for (const auto& spec : all_kinds()) {
    const Engine e(noisy_quadratic(), spec, StepsizeSchedule::constant(0.005));
    RunState s = e.initial_state(Vec::ones(20));
    RunStreams r = e.make_streams(10);
    for (int t = 0; t < 1000; ++t) {
      e.step(s, r);
      ASSERT_LE(consistency_residual(s), 1e-10 * (1 + norm(s.x))) << describe(spec) << " t=" << t;
    }
  }
}

TEST(Engine, CapEnforcement) {
  try {
    Engine(noisy_quadratic(), DelayedSgd{4}, StepsizeSchedule::constant(0.1, 0.025));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::configuration_rejected);
  }
  EXPECT_NO_THROW(Engine(noisy_quadratic(), DelayedSgd{4}, StepsizeSchedule::constant(0.1, 0.025), false));
}

TEST(Engine, InvalidSpecsRejected) {
  EXPECT_THROW(Engine(noisy_quadratic(), DelayedSgd{0}, StepsizeSchedule::constant(0.01)), Error);
  EXPECT_THROW(Engine(noisy_quadratic(), LocalSgd{0, 2}, StepsizeSchedule::constant(0.01)), Error);
  EXPECT_THROW(Engine(noisy_quadratic(), CompressedSgd{Compressor::top_k(3, 5)},
                      StepsizeSchedule::constant(0.01)),
               Error);
}

TEST(Engine, EffectiveTau) {
  EXPECT_EQ(effective_tau(PlainSgd{}), 1.0);
  EXPECT_EQ(effective_tau(DelayedSgd{7}), 7.0);
  EXPECT_EQ(effective_tau(CompressedSgd{Compressor::rand_drop(8.0)}), 16.0);
  EXPECT_EQ(effective_tau(MiniBatchSgd{3}), 3.0);
  EXPECT_EQ(effective_tau(LocalSgd{4, 8}), 32.0);
}

TEST(Run, ClosedFormContraction) {
  const Engine e(half_square(), PlainSgd{}, StepsizeSchedule::constant(0.5), false);
  RunOptions o;
  o.horizon = 10;
  const auto tr = run(e, Vec{1.0}, o);
  EXPECT_NEAR(tr.final_subopt, std::pow(0.5, 20) / 2.0, 1e-20);
  EXPECT_NEAR(tr.final_subopt, 4.77e-7, 1e-9);
}

TEST(Run, RecordsDelayedErrorHandValues) {
  const Engine e(half_square(), DelayedSgd{2}, StepsizeSchedule::constant(0.1), false);
  RunOptions o;
  o.horizon = 6;
  const auto tr = run(e, Vec{1.0}, o);
  ASSERT_EQ(tr.rows.size(), 7u);
  const auto x = ref::delayed_scalar_gd(1.0, 0.1, 2, 6);
  for (std::size_t t = 0; t <= 6; ++t) EXPECT_NEAR(tr.rows[t].subopt, 0.5 * x[t] * x[t], 1e-15);
  EXPECT_NEAR(tr.rows[3].err_norm_sq, 0.04, 1e-15);
}

TEST(Run, RecordingCadence) {
  const Engine e(noisy_quadratic(), PlainSgd{}, StepsizeSchedule::constant(0.01));
  RunOptions o;
  o.horizon = 95;
  o.record_every = 10;
  const auto tr = run(e, Vec::ones(20), o);
  ASSERT_EQ(tr.rows.size(), 11u);
  EXPECT_EQ(tr.rows.back().t, 95u);
  EXPECT_EQ(tr.rows[3].t, 30u);
}

TEST(Run, SameSeedIsReproducible) {
  const Engine e(noisy_quadratic(), DelayedSgd{3, DelayModel::iid_bounded}, StepsizeSchedule::constant(0.01));
  RunOptions o;
  o.horizon = 500;
  o.seed = 42;
  const auto a = run(e, Vec::ones(20), o);
  const auto b = run(e, Vec::ones(20), o);
  EXPECT_EQ(a.x_final, b.x_final);
  o.seed = 43;
  EXPECT_NE(run(e, Vec::ones(20), o).x_final, a.x_final);
}

TEST(Run, DivergenceIsReported) {
  const Engine e(half_square(), PlainSgd{}, StepsizeSchedule::constant(5.0), false);
  RunOptions o;
  o.horizon = 1000;
  try {
    run(e, Vec{1.0}, o);
    FAIL();
  } catch (const DivergenceError& d) {
    EXPECT_EQ(d.code(), ErrorCode::divergence);
    EXPECT_GT(d.iteration(), 0u);
    EXPECT_LT(d.iteration(), 100u);
  }
}

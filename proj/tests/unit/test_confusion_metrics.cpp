// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "metricopt/confusion.hpp"
#include "metricopt/errors.hpp"
#include "metricopt/metrics.hpp"
#include "oracles.hpp"

using namespace metricopt;
using doctest::Approx;

namespace {

LabeledBatch view(const std::vector<double>& p, const std::vector<std::uint8_t>& y) { return {p, y}; }

}  // namespace

TEST_SUITE("confusion") {
  TEST_CASE("batch validation") {
    const std::vector<double> p = {0.2, 0.4};
    const std::vector<std::uint8_t> y = {0, 1};
    const std::vector<std::uint8_t> short_y = {0};
    const std::vector<std::uint8_t> bad_y = {0, 2};
    const std::vector<double> bad_p = {0.2, 1.2};
    CHECK_NOTHROW(view(p, y));
    CHECK_THROWS_AS(view(p, short_y), InvalidArgument);
    CHECK_THROWS_AS(view(p, bad_y), InvalidArgument);
    CHECK_THROWS_AS(view(bad_p, y), InvalidArgument);
    CHECK_THROWS_AS(view({}, {}), InvalidArgument);
  }

  TEST_CASE("reference memberships") {
    const HeavisideParams hp(0.5, 0.1);
    CHECK(tp_soft(1.0, 1, hp) == 1.0);
    CHECK(tp_soft(0.0, 1, hp) == 0.0);
    CHECK(tp_soft(0.75, 1, hp) == Approx(0.9).epsilon(1e-12));
    CHECK(fn_soft(0.75, 1, hp) == Approx(0.1).epsilon(1e-12));
    CHECK(tp_soft(0.5, 1, hp) == 0.5);
  }

  TEST_CASE("memberships follow the printed tables including leakage") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
      const double tau = 0.05 + 0.9 * unit(rng);
      const double delta = 0.01 + 0.45 * unit(rng);
      const double p = unit(rng);
      const int y = i % 2;
      const HeavisideParams hp(tau, delta);
      const auto ref = oracle::membership(p, y, tau, delta);
      const auto m = soft_membership(p, y, hp);
      CHECK(m.tp == ref[0]);
      CHECK(m.fp == ref[1]);
      CHECK(m.fn == ref[2]);
      CHECK(m.tn == ref[3]);
      CHECK(tp_soft(p, y, hp) == m.tp);
      CHECK(fp_soft(p, y, hp) == m.fp);
      CHECK(fn_soft(p, y, hp) == m.fn);
      CHECK(tn_soft(p, y, hp) == m.tn);
      for (double v : ref) CHECK((v >= 0.0 && v <= 1.0));
    }
    // A negative scored below the threshold still carries some soft TP.
    CHECK(tp_soft(0.3, 0, HeavisideParams(0.5)) > 0.0);
  }

  TEST_CASE("soft memberships need not sum to one") {
    const HeavisideParams hp(0.5, 0.1);
    const auto m = soft_membership(0.45, 0, hp);
    CHECK(m.tp + m.fp + m.fn + m.tn != Approx(1.0));
  }

  TEST_CASE("membership gradients") {
    const HeavisideParams hp(0.5, 0.1);
    CHECK(soft_membership_grad(0.1, 1, hp).tp == Approx(0.4));
    CHECK(soft_membership_grad(0.9, 1, hp).fn == Approx(-0.4));
    std::mt19937_64 rng(3);
    std::vector<double> p;
    std::vector<std::uint8_t> y;
    oracle::random_batch(rng, 400, {0.5}, 0.1, 1e-3, p, y);
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto g = soft_membership_grad(p[i], y[i], hp);
      const auto up = oracle::membership(p[i] + h, y[i], 0.5, 0.1);
      const auto dn = oracle::membership(p[i] - h, y[i], 0.5, 0.1);
      const double fd[4] = {(up[0] - dn[0]) / (2 * h), (up[1] - dn[1]) / (2 * h), (up[2] - dn[2]) / (2 * h),
                            (up[3] - dn[3]) / (2 * h)};
      CHECK(oracle::close_rel(g.tp, fd[0], 1e-6));
      CHECK(oracle::close_rel(g.fp, fd[1], 1e-6));
      CHECK(oracle::close_rel(g.fn, fd[2], 1e-6));
      CHECK(oracle::close_rel(g.tn, fd[3], 1e-6));
      if (y[i] == 1) CHECK(g.tp >= hp.slopes().lower - 1e-12);
    }
  }

  TEST_CASE("aggregation") {
    const HeavisideParams hp(0.5, 0.1);
    const std::vector<double> p = {0.9, 0.2, 0.8, 0.1};
    const std::vector<std::uint8_t> y = {1, 0, 0, 1};
    const auto hard = aggregate_hard(view(p, y), 0.5);
    CHECK(hard == HardCounts{1, 1, 1, 1});
    CHECK(hard.total() == 4);

    const std::vector<double> repeated(7, 0.62);
    const std::vector<std::uint8_t> ones(7, 1);
    const auto one = aggregate_soft(view({0.62}, {1}), hp);
    const auto seven = aggregate_soft(view(repeated, ones), hp);
    CHECK(seven.tp == Approx(7 * one.tp));
    CHECK(seven.fn == Approx(7 * one.fn));

    const std::vector<double> low(5, 0.2);
    const std::vector<std::uint8_t> zeros(5, 0);
    CHECK(aggregate_hard(view(low, zeros), 0.5) == HardCounts{0, 0, 0, 5});

    const auto grads = aggregate_soft_grad(view(p, y), hp);
    REQUIRE(grads.size() == 4);
    CHECK(grads[0] == soft_membership_grad(0.9, 1, hp));
  }

  TEST_CASE("aggregation sums are independent of summation order") {
    std::mt19937_64 rng(5);
    std::vector<double> p;
    std::vector<std::uint8_t> y;
    oracle::random_batch(rng, 100000, {}, 0.1, 0.0, p, y);
    const HeavisideParams hp(0.3, 0.1);
    const auto forward = aggregate_soft(view(p, y), hp);
    std::vector<double> rp(p.rbegin(), p.rend());
    std::vector<std::uint8_t> ry(y.rbegin(), y.rend());
    const auto backward = aggregate_soft(view(rp, ry), hp);
    CHECK(std::abs(forward.tp - backward.tp) < 1e-9);
    CHECK(std::abs(forward.tn - backward.tn) < 1e-9);
  }

  TEST_CASE("saturated predictions reproduce hard counts") {
    std::mt19937_64 rng(9);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> p(30);
      std::vector<std::uint8_t> y(30);
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = coin(rng) ? 1.0 : 0.0;
        y[i] = coin(rng) ? 1 : 0;
      }
      const auto soft = aggregate_soft(view(p, y), HeavisideParams(0.3 + 0.05 * (trial % 8)));
      CHECK(soft == aggregate_hard(view(p, y), 0.5).as_real());
    }
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("ratios by hand") {
    const SoftCounts c{8, 2, 2, 0};
    CHECK(precision(c, 0.0).value == Approx(0.8));
    CHECK(recall(c, 0.0).value == Approx(0.8));
    CHECK(f_beta(c, 1.0, 0.0).value == Approx(0.8));
    CHECK(f_beta(c, 1.0, 0.0).name == "f1");
    CHECK(f_beta(c, 1000.0, 0.0).value == Approx(0.8).epsilon(1e-4));
    CHECK(accuracy(SoftCounts{1, 1, 1, 1}, 0.0).value == 0.5);
    CHECK(accuracy(SoftCounts{3, 0, 0, 4}, 0.0).value == 1.0);
  }

  TEST_CASE("undefined denominators") {
    const auto p = precision(SoftCounts{0, 0, 5, 1}, 0.0);
    CHECK_FALSE(p.defined);
    CHECK(p.value == 0.0);
    const auto r = recall(SoftCounts{0, 0, 5, 1}, 0.0);
    CHECK(r.defined);
    CHECK(r.value == 0.0);
    const auto f = f_beta(SoftCounts{0, 0, 0, 3}, 1.0);
    CHECK_FALSE(f.defined);
    CHECK(f.value == 0.0);
  }

  TEST_CASE("F1 equals the harmonic mean of precision and recall") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> count(0.1, 100.0);
    for (int i = 0; i < 1000; ++i) {
      const SoftCounts c{count(rng), count(rng), count(rng), count(rng)};
      const double pr = precision(c, 0.0).value;
      const double rc = recall(c, 0.0).value;
      CHECK(std::abs(f_beta(c, 1.0, 0.0).value - 2 * pr * rc / (pr + rc)) < 1e-12);
    }
  }

  TEST_CASE("all-negative predictor on imbalanced data") {
    std::vector<double> p(10000, 0.01);
    std::vector<std::uint8_t> y(10000, 0);
    std::fill(y.begin(), y.begin() + 232, 1);
    const auto table = evaluate_over_grid(view(p, y), default_tau_grid());
    CHECK(table.mean("f1") == 0.0);
    CHECK(table.mean("accuracy") == Approx(0.9768));
    CHECK(table.summary("precision").excluded == 9);
    CHECK_FALSE(table.summary("precision").defined());
  }

  TEST_CASE("hard AUROC") {
    CHECK(auroc_hard(view({0.9, 0.8, 0.7, 0.1}, {1, 0, 1, 0})) == Approx(0.75));
    CHECK(auroc_hard(view({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0})) == 1.0);
    CHECK(auroc_hard(view({0.5, 0.5}, {1, 0})) == 0.5);
    CHECK_THROWS_AS(auroc_hard(view({0.4, 0.6}, {1, 1})), UndefinedMetric);

    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> level(0, 9);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> p(40);
      std::vector<std::uint8_t> y(40);
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = level(rng) / 9.0;  // coarse values force ties
        y[i] = level(rng) < 4;
      }
      y[0] = 1;
      y[1] = 0;
      CHECK(std::abs(auroc_hard(view(p, y)) - oracle::pairwise_auroc(p, y)) < 1e-12);
    }

    std::vector<double> p(20000);
    std::vector<std::uint8_t> y(20000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = unit(rng);
      y[i] = unit(rng) < 0.5;
    }
    CHECK(auroc_hard(view(p, y)) == Approx(0.5).epsilon(0.03));
  }

  TEST_CASE("grid table shape") {
    const std::vector<double> p = {0.9, 0.2, 0.8, 0.1};
    const std::vector<std::uint8_t> y = {1, 0, 0, 1};
    const auto table = evaluate_over_grid(view(p, y), default_tau_grid());
    CHECK(table.per_tau.size() == 4 * 9);
    CHECK(table.means.size() == 4);
    const double single = evaluate_over_grid(view(p, y), std::vector<double>{0.5}).mean("f1");
    CHECK(single == f_beta(aggregate_hard(view(p, y), 0.5), 1.0, 0.0).value);
    CHECK_THROWS_AS(table.summary("mcc"), InvalidArgument);
    CHECK(table.auroc.defined);

    const auto one_class = evaluate_over_grid(view({0.3, 0.6}, {0, 0}), default_tau_grid());
    CHECK_FALSE(one_class.auroc.defined);
  }
}

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qalt/anneal.hpp"

using namespace qalt;

namespace {

DiagonalLandscape popcount_landscape(int n) {
  DiagonalLandscape l;
  l.n_bits = n;
  l.e.resize(std::int64_t{1} << n);
  for (std::int64_t x = 0; x < l.dim(); ++x)
    l.e[x] = static_cast<double>(__builtin_popcountll(
        static_cast<unsigned long long>(x)));
  l.label = "popcount";
  return l;
}

DiagonalLandscape ladder_landscape(int n, double spacing) {
  DiagonalLandscape l;
  l.n_bits = n;
  l.e.resize(std::int64_t{1} << n);
  for (std::int64_t x = 0; x < l.dim(); ++x)
    l.e[x] = spacing * static_cast<double>(x);
  l.label = "ladder";
  return l;
}

// Dense one-step Metropolis kernel at inverse temperature beta: each of the
// n single-flip neighbors is proposed with probability 1/n and accepted with
// probability min(1, e^{-beta dE}); leftover mass stays put.
Eigen::MatrixXd metropolis_kernel(const DiagonalLandscape& l, double beta) {
  const std::int64_t dim = l.dim();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    double stay = 1.0;
    for (int b = 0; b < l.n_bits; ++b) {
      const std::int64_t y = x ^ (std::int64_t{1} << b);
      const double de = l.e[y] - l.e[x];
      const double acc =
          (de > 0.0 ? std::exp(-beta * de) : 1.0) / static_cast<double>(l.n_bits);
      k(y, x) = acc;
      stay -= acc;
    }
    k(x, x) = stay;
  }
  return k;
}

}  // namespace

TEST_SUITE("anneal") {
  TEST_CASE("schedule hits both endpoints") {
    AnnealConfig cfg;
    cfg.steps = 11;
    cfg.beta_start = 0.5;
    cfg.beta_end = 32.0;
    for (AnnealSchedule s : {AnnealSchedule::linear, AnnealSchedule::geometric}) {
      cfg.schedule = s;
      REQUIRE(std::abs(anneal_beta(cfg, 0) - 0.5) < 1e-12);
      REQUIRE(std::abs(anneal_beta(cfg, 10) - 32.0) < 1e-12);
    }
  }

  TEST_CASE("linear schedule has constant differences") {
    AnnealConfig cfg;
    cfg.steps = 7;
    cfg.beta_start = 1.0;
    cfg.beta_end = 4.0;
    cfg.schedule = AnnealSchedule::linear;
    const double d = anneal_beta(cfg, 1) - anneal_beta(cfg, 0);
    for (std::int64_t t = 1; t < 6; ++t)
      REQUIRE(std::abs((anneal_beta(cfg, t + 1) - anneal_beta(cfg, t)) - d) <
              1e-12);
    REQUIRE(std::abs(d - 0.5) < 1e-12);
  }

  TEST_CASE("geometric schedule has constant ratios") {
    AnnealConfig cfg;
    cfg.steps = 9;
    cfg.beta_start = 0.25;
    cfg.beta_end = 64.0;
    cfg.schedule = AnnealSchedule::geometric;
    const double r = anneal_beta(cfg, 1) / anneal_beta(cfg, 0);
    REQUIRE(std::abs(r - std::pow(256.0, 1.0 / 8.0)) < 1e-12);
    for (std::int64_t t = 1; t < 8; ++t)
      REQUIRE(std::abs(anneal_beta(cfg, t + 1) / anneal_beta(cfg, t) - r) <
              1e-12);
  }

  TEST_CASE("single-step schedule jumps to the final temperature") {
    AnnealConfig cfg;
    cfg.steps = 1;
    cfg.beta_start = 0.5;
    cfg.beta_end = 8.0;
    REQUIRE(std::abs(anneal_beta(cfg, 0) - 8.0) < 1e-12);
  }

  TEST_CASE("bad schedules are rejected") {
    const DiagonalLandscape l = popcount_landscape(3);
    RngStream rng(1);
    AnnealConfig cfg;
    cfg.steps = 0;
    REQUIRE_THROWS_AS((void)anneal(l, cfg, rng), ValidationError);
    cfg.steps = 5;
    cfg.beta_start = 0.0;
    REQUIRE_THROWS_AS((void)anneal(l, cfg, rng), ValidationError);
    cfg.beta_start = 2.0;
    cfg.beta_end = 1.0;
    REQUIRE_THROWS_AS((void)anneal_ensemble(l, cfg), ValidationError);
  }

  TEST_CASE("walker trace shape and running minimum") {
    const DiagonalLandscape l = popcount_landscape(4);
    AnnealConfig cfg;
    cfg.steps = 60;
    RngStream rng(2);
    const auto trace = anneal(l, cfg, rng);
    REQUIRE(trace.size() == 61);
    REQUIRE(trace[0].step == 0);
    REQUIRE(trace[0].best == trace[0].current);
    double running = trace[0].current;
    for (std::size_t t = 1; t < trace.size(); ++t) {
      REQUIRE(trace[t].step == static_cast<std::int64_t>(t));
      running = std::min(running, trace[t].current);
      REQUIRE(trace[t].best == running);
      // single bit flip per step: energy moves by at most 1 on this landscape
      REQUIRE(std::abs(trace[t].current - trace[t - 1].current) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("walker is deterministic per seed") {
    const DiagonalLandscape l = popcount_landscape(4);
    AnnealConfig cfg;
    cfg.steps = 40;
    RngStream a(3), b(3);
    const auto ta = anneal(l, cfg, a);
    const auto tb = anneal(l, cfg, b);
    for (std::size_t t = 0; t < ta.size(); ++t)
      REQUIRE(ta[t].current == tb[t].current);
  }

  TEST_CASE("cold walker descends to the ground string") {
    const DiagonalLandscape l = popcount_landscape(4);
    AnnealConfig cfg;
    cfg.steps = 300;
    cfg.beta_start = 50.0;
    cfg.beta_end = 50.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream rng(seed);
      const auto trace = anneal(l, cfg, rng);
      REQUIRE(trace.back().best == 0.0);
      REQUIRE(trace.back().current == 0.0);
    }
  }

  TEST_CASE("fixed-temperature walker samples the gibbs distribution") {
    // Distinct energies make the final energy identify the string exactly.
    const int n = 4;
    const double spacing = 0.3;
    const double beta = 0.7;
    const DiagonalLandscape l = ladder_landscape(n, spacing);
    AnnealConfig cfg;
    cfg.steps = 400;
    cfg.beta_start = beta;
    cfg.beta_end = beta;
    const std::int64_t dim = l.dim();
    std::vector<double> counts(static_cast<std::size_t>(dim), 0.0);
    const int runs = 4000;
    for (int rep = 0; rep < runs; ++rep) {
      RngStream rng(static_cast<std::uint64_t>(rep) + 100);
      const auto trace = anneal(l, cfg, rng);
      const auto x = static_cast<std::size_t>(
          std::llround(trace.back().current / spacing));
      REQUIRE(x < counts.size());
      counts[x] += 1.0;
    }
    VecR pi(dim);
    for (std::int64_t x = 0; x < dim; ++x) pi[x] = std::exp(-beta * l.e[x]);
    pi /= pi.sum();
    double chi2 = 0.0;
    for (std::int64_t x = 0; x < dim; ++x) {
      const double expect = runs * pi[x];
      REQUIRE(expect > 5.0);
      const double diff = counts[static_cast<std::size_t>(x)] - expect;
      chi2 += diff * diff / expect;
    }
    REQUIRE(chi2 < oracles::chi2_crit_1e3(static_cast<int>(dim) - 1));
  }

  TEST_CASE("ensemble matches a dense kernel evolution") {
    AnnealConfig cfg;
    cfg.steps = 25;
    cfg.beta_start = 0.2;
    cfg.beta_end = 10.0;
    for (AnnealSchedule s : {AnnealSchedule::linear, AnnealSchedule::geometric}) {
      cfg.schedule = s;
      for (const auto& l :
           {popcount_landscape(4), ladder_landscape(3, 0.4),
            grover_landscape(4, 11)}) {
        const auto trace = anneal_ensemble(l, cfg);
        REQUIRE(trace.size() == 26);
        VecR p = VecR::Constant(l.dim(), 1.0 / static_cast<double>(l.dim()));
        REQUIRE(std::abs(trace[0].current - p.dot(l.e)) < 1e-12);
        double best = trace[0].current;
        for (std::int64_t t = 0; t < cfg.steps; ++t) {
          p = metropolis_kernel(l, anneal_beta(cfg, t)) * p;
          const double mean = p.dot(l.e);
          best = std::min(best, mean);
          REQUIRE(std::abs(trace[static_cast<std::size_t>(t) + 1].current -
                           mean) < 1e-12);
          REQUIRE(std::abs(trace[static_cast<std::size_t>(t) + 1].best - best) <
                  1e-12);
        }
        REQUIRE(std::abs(p.sum() - 1.0) < 1e-12);
      }
    }
  }

  TEST_CASE("cold ensemble concentrates on the grover ground state") {
    AnnealConfig cfg;
    cfg.steps = 400;
    cfg.beta_start = 0.5;
    cfg.beta_end = 60.0;
    const auto trace = anneal_ensemble(grover_landscape(4, 5), cfg);
    REQUIRE(trace.back().current < trace.front().current);
    for (std::size_t t = 1; t < trace.size(); ++t)
      REQUIRE(trace[t].best <= trace[t - 1].best + 1e-15);
  }
}

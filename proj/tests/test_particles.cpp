#include <doctest.h>

#include <map>
#include <random>

#include "manip/belief.hpp"
#include "manip/particles.hpp"

using namespace manip;

namespace {

ParticleSet<int> tagged(std::vector<double> weights) {
  ParticleSet<int> set;
  for (std::size_t i = 0; i < weights.size(); ++i)
    set.particles.push_back({static_cast<int>(i), weights[i]});
  return set;
}

}  // namespace

TEST_CASE("bayes_update") {
  SUBCASE("constant likelihood keeps weights") {
    auto set = tagged({0.25, 0.25, 0.25, 0.25});
    const auto post = bayes_update(set, [](int) { return 0.37; });
    for (const auto& p : post.particles) CHECK(p.weight == doctest::Approx(0.25));
    CHECK(post.generation == 1);
  }

  SUBCASE("one-hot likelihood concentrates everything") {
    auto set = tagged({0.25, 0.25, 0.25, 0.25});
    const auto post = bayes_update(set, [](int s) { return s == 2 ? 1.0 : 0.0; });
    CHECK(post.particles[2].weight == doctest::Approx(1.0));
    CHECK(effective_sample_size(post) == doctest::Approx(1.0));
  }

  SUBCASE("proportional reweighting") {
    auto set = tagged({0.25, 0.25, 0.25, 0.25});
    const auto post = bayes_update(set, [](int s) { return static_cast<double>(s + 1); });
    CHECK(post.particles[0].weight == doctest::Approx(0.1));
    CHECK(post.particles[1].weight == doctest::Approx(0.2));
    CHECK(post.particles[2].weight == doctest::Approx(0.3));
    CHECK(post.particles[3].weight == doctest::Approx(0.4));
  }

  SUBCASE("scale invariance of the posterior") {
    auto set = tagged({0.1, 0.4, 0.2, 0.3});
    const auto p1 = bayes_update(set, [](int s) { return std::exp(-0.5 * s); });
    const auto p2 = bayes_update(set, [](int s) { return 77.3 * std::exp(-0.5 * s); });
    for (std::size_t i = 0; i < p1.size(); ++i)
      CHECK(std::abs(p1.particles[i].weight - p2.particles[i].weight) < 1e-12);
    CHECK(std::abs(p1.total_weight() - 1.0) < 1e-12);
  }

  SUBCASE("all-zero posterior raises divergence") {
    auto set = tagged({0.5, 0.5});
    CHECK_THROWS_AS(bayes_update(set, [](int) { return 0.0; }), FilterDivergence);
  }

  SUBCASE("negative or non-finite likelihood is rejected") {
    auto set = tagged({0.5, 0.5});
    CHECK_THROWS_AS(bayes_update(set, [](int) { return -1.0; }), std::invalid_argument);
  }

  SUBCASE("serial and parallel agree bitwise") {
    std::vector<double> w(1000);
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : w) x = u(eng);
    auto set = tagged(w);
    auto lik = [](int s) { return std::exp(-1e-3 * s); };
    const auto a = bayes_update(set, lik, ExecMode::Serial);
    const auto b = bayes_update(set, lik, ExecMode::Parallel);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.particles[i].weight == b.particles[i].weight);
  }
}

TEST_CASE("effective_sample_size") {
  auto uniform100 = tagged(std::vector<double>(100, 0.01));
  CHECK(effective_sample_size(uniform100) == doctest::Approx(100.0));

  auto one = tagged({1.0, 0.0, 0.0});
  CHECK(effective_sample_size(one) == doctest::Approx(1.0));

  auto half = tagged({0.5, 0.5, 0.0, 0.0});
  CHECK(effective_sample_size(half) == doctest::Approx(2.0));

  auto unnorm = tagged({0.5, 0.1});
  CHECK_THROWS_AS(effective_sample_size(unnorm), std::invalid_argument);
}

TEST_CASE("systematic_resample") {
  SUBCASE("0.7/0.3 with ten outputs always gives 7 and 3 copies") {
    auto set = tagged({0.7, 0.3});
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto out = systematic_resample(set, RngStream(seed, 0), 10);
      std::map<int, int> counts;
      for (const auto& p : out.particles) counts[p.state]++;
      CHECK(counts[0] == 7);
      CHECK(counts[1] == 3);
      CHECK(out.particles[0].weight == doctest::Approx(0.1));
    }
  }

  SUBCASE("degenerate weight gives n copies") {
    auto set = tagged({0.0, 1.0, 0.0});
    const auto out = systematic_resample(set, RngStream(3, 0));
    for (const auto& p : out.particles) CHECK(p.state == 1);
  }

  SUBCASE("copy counts stay within one of n*w") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> w(37);
      double sum = 0.0;
      for (auto& x : w) {
        x = u(eng);
        sum += x;
      }
      for (auto& x : w) x /= sum;
      auto set = tagged(w);
      const auto out = systematic_resample(set, RngStream(trial, 1));
      std::map<int, int> counts;
      for (const auto& p : out.particles) counts[p.state]++;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double expect = static_cast<double>(w.size()) * w[i];
        CHECK(std::abs(counts[static_cast<int>(i)] - expect) < 1.0);
      }
    }
  }

  SUBCASE("deterministic under a fixed stream") {
    auto set = tagged({0.2, 0.5, 0.3});
    const auto a = systematic_resample(set, RngStream(9, 2), 100);
    const auto b = systematic_resample(set, RngStream(9, 2), 100);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.particles[i].state == b.particles[i].state);
  }

  SUBCASE("zero total weight raises divergence") {
    auto set = tagged({0.0, 0.0});
    CHECK_THROWS_AS(systematic_resample(set, RngStream(0, 0)), FilterDivergence);
  }
}

TEST_CASE("normalization bookkeeping") {
  auto set = tagged({2.0, 6.0});
  set.normalize();
  CHECK(set.particles[0].weight == doctest::Approx(0.25));
  CHECK(std::abs(set.total_weight() - 1.0) < 1e-12);
  CHECK(set.is_normalized());
}

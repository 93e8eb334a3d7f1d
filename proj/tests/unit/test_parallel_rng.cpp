#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <navcurate/parallel.hpp>
#include <navcurate/rng.hpp>

using namespace navcurate;

TEST_CASE("parallel_for visits every index once") {
  for (unsigned workers : {1u, 2u, 3u, 8u, 64u}) {
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_for(n, workers, [&](std::size_t i) { hits[i]++; });
      for (auto& h : hits) REQUIRE(h.load() == 1);
    }
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (unsigned workers : {1u, 4u}) {
    try {
      parallel_for(100, workers, [](std::size_t i) {
        if (i == 30 || i == 80) throw std::runtime_error(std::to_string(i));
      });
      FAIL("no exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "30");
    }
  }
}

TEST_CASE("worker default honours the environment") {
  ::setenv("NAVCURATE_WORKERS", "3", 1);
  CHECK(default_workers() == 3);
  ::setenv("NAVCURATE_WORKERS", "bogus", 1);
  CHECK(default_workers() >= 1);
  ::unsetenv("NAVCURATE_WORKERS");
  CHECK(default_workers() >= 1);
}

TEST_CASE("counter rng") {
  static_assert(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);

  auto a = CounterRng::keyed({1, 2, 3});
  auto b = CounterRng::keyed({1, 2, 3});
  auto c = CounterRng::keyed({1, 3, 2});
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  CHECK(a.counter() == 10);

  CounterRng r(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0);
    REQUIRE(u < 1);
    const auto k = r.uniform_int(-3, 3);
    REQUIRE(k >= -3);
    REQUIRE(k <= 3);
  }
  CHECK(r.uniform_int(5, 5) == 5);
}

#include <doctest.h>

#include <cmath>

#include "qfog/propagation.hpp"
#include "test_util.hpp"

using namespace qfog;
using qfog::test::Gen;
using qfog::test::rel_close;

TEST_CASE("fiber_transmission examples") {
  CHECK(fiber_transmission(OpticalPath{0, 10}, 0) == doctest::Approx(0.1));
  CHECK(fiber_transmission(OpticalPath{5, 0}, 2000) == doctest::Approx(0.1));
  CHECK(fiber_transmission(OpticalPath{0, 6.65}, 1000) ==
        doctest::Approx(0.216).epsilon(0.005));
  CHECK(fiber_transmission(OpticalPath{0, 0}, 5000) == 1.0);
  CHECK_THROWS_AS(fiber_transmission(OpticalPath{0, 1e5}, 1), std::domain_error);
  CHECK_THROWS_AS(fiber_transmission(OpticalPath{0, 0}, -1), std::invalid_argument);
}

TEST_CASE("propagate_populations examples") {
  const PhotonPopulations p{0.95, 0.05};
  const auto same = propagate_populations(p, 1.0);
  CHECK(same.noon_pairs == p.noon_pairs);
  CHECK(same.singles == p.singles);

  const auto out = propagate_populations(p, 0.1);
  CHECK(out.noon_pairs == doctest::Approx(0.0095));
  CHECK(out.singles == doctest::Approx(0.0905));
  CHECK(noon_ratio(out) == doctest::Approx(0.095).epsilon(1e-9));

  const auto projected = propagate_populations(p, 0.216);
  CHECK(std::abs(noon_ratio(projected) - 0.205) <= 0.005);

  CHECK_THROWS_AS(propagate_populations(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate_populations(p, 1.5), std::invalid_argument);
}

TEST_CASE("noon_ratio examples") {
  CHECK(noon_ratio({1, 0}) == 1.0);
  CHECK(noon_ratio({0.0095, 0.0905}) == doctest::Approx(0.095));
  CHECK(noon_ratio({1, 1}) == 0.5);
  CHECK_THROWS_AS(noon_ratio({0, 0}), std::domain_error);
  CHECK_THROWS_AS(PhotonPopulations(-1, 0), InvalidField);
}

TEST_CASE("singles_rate_from_ratio examples") {
  CHECK(singles_rate_from_ratio(4000, 0.095) == doctest::Approx(38100).epsilon(0.01));
  const double projected = singles_rate_from_ratio(10000, 0.205);
  CHECK(projected == doctest::Approx(38780.5).epsilon(1e-4));
  CHECK(projected >= 38e3);
  CHECK(projected <= 40e3);
  CHECK(singles_rate_from_ratio(1234.5, 0.5) == doctest::Approx(1234.5));
  CHECK_THROWS_AS(singles_rate_from_ratio(1000, 0), std::invalid_argument);
}

TEST_CASE("propagate_along_fiber") {
  const PhotonPopulations p{0.95, 0.05};

  SUBCASE("zero length leaves the initial populations at both ends") {
    const auto rows = propagate_along_fiber(p, OpticalPath{0.3, 0}, 0.0, 5);
    REQUIRE(rows.size() == 5);
    CHECK(rows.front().populations.noon_pairs == p.noon_pairs);
    CHECK(rows.back().populations.singles == p.singles);
  }

  SUBCASE("endpoint matches the closed form for 10 dB") {
    const OpticalPath path{2.5, 0};
    const auto rows = propagate_along_fiber(p, path, 4000, 101);
    const auto direct = propagate_populations(p, 0.1);
    CHECK(rows.back().length_m == 4000);
    CHECK(rel_close(rows.back().populations.noon_pairs, direct.noon_pairs, 1e-12));
    CHECK(rel_close(rows.back().populations.singles, direct.singles, 1e-12));
    CHECK(rows[50].length_m == doctest::Approx(2000));
  }

  SUBCASE("lumped losses appear in the endpoint row only") {
    const OpticalPath path{1.0, 3.0};
    const auto rows = propagate_along_fiber(p, path, 2000, 3);
    const auto direct = propagate_populations(p, fiber_transmission(path, 2000));
    CHECK(rel_close(rows.back().populations.noon_pairs, direct.noon_pairs, 1e-12));
    CHECK(rel_close(rows[1].populations.noon_pairs,
                    propagate_populations(p, std::pow(10.0, -0.1)).noon_pairs, 1e-12));
  }

  SUBCASE("long-fiber ratio falls like the single-photon transmission") {
    // log-log slope of R against T at 60 dB total
    const OpticalPath path{0.2, 0};
    const double l1 = 300e3 * 0.99;
    const double l2 = 300e3;
    const double t1 = fiber_transmission(path, l1);
    const double t2 = fiber_transmission(path, l2);
    const double r1 = noon_ratio(propagate_along_fiber(p, path, l1, 2).back().populations);
    const double r2 = noon_ratio(propagate_along_fiber(p, path, l2, 2).back().populations);
    const double slope = std::log(r2 / r1) / std::log(t2 / t1);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.01));
    CHECK(r2 == doctest::Approx(0.95 * t2).epsilon(0.01));
  }

  CHECK_THROWS_AS(propagate_along_fiber(p, OpticalPath{0, 0}, 10, 1), std::invalid_argument);
}

TEST_CASE("propagation properties over random inputs") {
  Gen gen(0xF1BE);
  for (int i = 0; i < 5000; ++i) {
    const PhotonPopulations p{gen.log_uniform(1e-3, 1e9), gen.log_uniform(1e-3, 1e9)};
    const double t1 = gen.uniform(1e-4, 1.0);
    const double t2 = gen.uniform(1e-4, 1.0);

    const auto twice = propagate_populations(propagate_populations(p, t1), t2);
    const auto once = propagate_populations(p, t1 * t2);
    CHECK(rel_close(twice.noon_pairs, once.noon_pairs, 1e-12));
    CHECK(rel_close(twice.singles, once.singles, 1e-12));

    const double lo = std::min(t1, t2);
    const double hi = std::max(t1, t2);
    CHECK(noon_ratio(propagate_populations(p, lo)) <=
          noon_ratio(propagate_populations(p, hi)) * (1 + 1e-12));

    const int n = gen.integer(2, 6);
    const auto out = propagate_populations(p, t1);
    CHECK(out.singles + n * out.noon_pairs <=
          (p.singles + n * p.noon_pairs) * (1 + 1e-12));
  }
}

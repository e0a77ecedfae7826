#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qfog/sagnac.hpp"
#include "qfog/spurious.hpp"
#include "test_util.hpp"

using namespace qfog;
using qfog::test::Gen;

namespace {

constexpr double kPairs = 7.2e6;
const SpuriousCount kCount{101.3, 1800.0};

double shot_for(double pairs, int n) { return shot_noise(n, NoonPairs{pairs}); }

BiasZoneReport scan(double pairs, int n, const SpuriousCount& c,
                    ZoneScanOptions opt = {}) {
  return bias_zone_scan(pairs, n, c, shot_for(pairs, n), opt);
}

// Offset from a cusp where |dphi_P| equals thr. With delta = N dphi and
// theta = N x, cos(theta + delta) - cos(theta) = -2 sin(theta + delta/2) sin(delta/2).
double crossing_offset_oracle(double a, int n, double thr, bool at_maximum) {
  const double half = 0.5 * n * thr;
  const double s = a / (2 * std::sin(half));
  return (std::asin(s) + (at_maximum ? half : -half)) / n;
}

// First phase above a maximum at which a + cos(N phi) <= 1 holds again.
double undefined_edge_oracle(double a, int n) {
  double lo = 0, hi = kPi / n;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (a + std::cos(n * mid) > 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

void check_interval_list(const std::vector<PhaseInterval>& v, double lo, double hi) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v[i].lo <= v[i].hi);
    CHECK(v[i].lo >= lo);
    CHECK(v[i].hi <= hi);
    if (i > 0) CHECK(v[i - 1].hi <= v[i].lo);
  }
}

bool same(const std::vector<PhaseInterval>& a, const std::vector<PhaseInterval>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("zero spurious count leaves the whole range safe") {
  const auto r = scan(kPairs, 2, SpuriousCount{0.0, 1800.0});
  CHECK(r.undefined_intervals.empty());
  CHECK(r.above_shot_noise_intervals.empty());
  CHECK(r.crossings.empty());
  REQUIRE(r.safe_windows.size() == 1);
  CHECK(r.safe_windows[0].lo == 0.0);
  CHECK(r.safe_windows[0].hi == kPi);
  CHECK(r.cusp_peak_rad == 0.0);
}

TEST_CASE("argument validation") {
  const double shot = shot_for(kPairs, 2);
  ZoneScanOptions coarse;
  coarse.points_per_pi = 999;
  CHECK_THROWS_AS(bias_zone_scan(kPairs, 2, kCount, shot, coarse), std::invalid_argument);
  ZoneScanOptions backwards;
  backwards.range_lo = 1.0;
  backwards.range_hi = 0.5;
  CHECK_THROWS_AS(bias_zone_scan(kPairs, 2, kCount, shot, backwards), std::invalid_argument);
  CHECK_THROWS_AS(bias_zone_scan(kPairs, 0, kCount, shot), std::invalid_argument);
  CHECK_THROWS_AS(bias_zone_scan(kPairs, 2, kCount, 0.0), std::invalid_argument);
}

TEST_CASE("cusp and optimal-bias bookkeeping") {
  const auto r = scan(kPairs, 2, kCount);
  REQUIRE(r.cusp_locations.size() == 3);
  CHECK(r.cusp_locations[1] == doctest::Approx(kPi / 2));
  REQUIRE(r.optimal_bias_points.size() == 2);
  CHECK(r.optimal_bias_points[0] == doctest::Approx(kPi / 4));
  CHECK(r.optimal_bias_points[1] == doctest::Approx(3 * kPi / 4));
  CHECK(r.threshold_rad == doctest::Approx(1.8634e-4).epsilon(1e-3));
  CHECK(threshold_value(ThresholdKind::tenth_shot_noise, 2.0) == 0.2);
}

TEST_CASE("crossings for the field-deployment numbers") {
  const auto r = scan(kPairs, 2, kCount);
  REQUIRE(!r.crossings.empty());
  const double a = 2 * kCount.delta_pcc / kPairs;

  for (const auto& c : r.crossings) {
    CHECK(c.residual_rad < 1e-9);
    const auto s = phase_shift_spurious(kPairs, c.phase_rad, 2, kCount);
    REQUIRE(s.defined);
    CHECK(std::abs(std::abs(s.value_rad) - r.threshold_rad) < 1e-9);
    CHECK(std::abs(c.offset_rad) ==
          doctest::Approx(crossing_offset_oracle(a, 2, r.threshold_rad, c.at_maximum))
              .epsilon(1e-6));
  }

  const auto max_off = r.max_cusp_crossing_offset();
  const auto min_off = r.min_cusp_crossing_offset();
  REQUIRE(max_off.has_value());
  REQUIRE(min_off.has_value());
  CHECK(*max_off == doctest::Approx(37.88e-3).epsilon(1e-3));
  CHECK(*min_off == doctest::Approx(37.70e-3).epsilon(1e-3));
  CHECK(*max_off - *min_off == doctest::Approx(r.threshold_rad).epsilon(1e-3));
}

TEST_CASE("crossings are symmetric about their cusp and equal per cusp kind") {
  const auto r = scan(kPairs, 2, kCount);
  for (const auto& c : r.crossings) {
    const bool interior = c.cusp_rad > 0.1 && c.cusp_rad < kPi - 0.1;
    if (!interior) continue;
    const auto mirror = std::find_if(r.crossings.begin(), r.crossings.end(), [&](const auto& o) {
      return o.cusp_rad == c.cusp_rad && std::abs(o.offset_rad + c.offset_rad) < 1e-6;
    });
    CHECK(mirror != r.crossings.end());
  }
  for (const auto& c : r.crossings) {
    for (const auto& o : r.crossings) {
      if (o.at_maximum == c.at_maximum) {
        CHECK(std::abs(std::abs(o.offset_rad) - std::abs(c.offset_rad)) < 1e-6);
      }
    }
  }
}

TEST_CASE("undefined intervals sit around maxima with the cusp half-width") {
  Gen gen(0x2B0);
  for (int i = 0; i < 50; ++i) {
    const int n = gen.integer(2, 5);
    const double m = gen.log_uniform(1e4, 1e8);
    const double dp = gen.log_uniform(1e-6, 1e-3) * m;
    const SpuriousCount c{dp, 100.0};
    const auto r = scan(m, n, c);
    const double edge = undefined_edge_oracle(2 * dp / m, n);
    CHECK(r.undefined_half_width_rad == doctest::Approx(edge).epsilon(1e-9));
    CHECK(r.undefined_half_width_rad == doctest::Approx(r.cusp_peak_rad).epsilon(0.01));
    for (const auto& iv : r.undefined_intervals) {
      const double centre = std::round(0.5 * (iv.lo + iv.hi) / (2 * kPi / n)) * (2 * kPi / n);
      CHECK(iv.lo == doctest::Approx(std::max(0.0, centre - edge)).epsilon(1e-9));
      CHECK(iv.hi == doctest::Approx(std::min(kPi, centre + edge)).epsilon(1e-9));
    }
    // every undefined interval is inside some unsafe interval
    for (const auto& iv : r.undefined_intervals) {
      const bool covered = std::any_of(
          r.above_shot_noise_intervals.begin(), r.above_shot_noise_intervals.end(),
          [&](const auto& u) { return u.lo <= iv.lo + 1e-12 && u.hi >= iv.hi - 1e-12; });
      CHECK(covered);
    }
  }
}

TEST_CASE("interval lists are sorted, disjoint, in range and complementary") {
  Gen gen(0x5C4);
  for (int i = 0; i < 30; ++i) {
    const int n = gen.integer(2, 6);
    const double m = gen.log_uniform(1e4, 1e9);
    const SpuriousCount c{gen.log_uniform(1e-2, 1e3), 100.0};
    ZoneScanOptions opt;
    opt.range_lo = gen.uniform(-3, 0);
    opt.range_hi = opt.range_lo + gen.uniform(0.5, 5);
    opt.threshold = gen.integer(0, 1) ? ThresholdKind::shot_noise : ThresholdKind::tenth_shot_noise;
    const auto r = scan(m, n, c, opt);
    check_interval_list(r.undefined_intervals, opt.range_lo, opt.range_hi);
    check_interval_list(r.above_shot_noise_intervals, opt.range_lo, opt.range_hi);
    check_interval_list(r.safe_windows, opt.range_lo, opt.range_hi);

    double covered = 0;
    for (const auto& iv : r.above_shot_noise_intervals) covered += iv.width();
    for (const auto& iv : r.safe_windows) covered += iv.width();
    CHECK(covered == doctest::Approx(opt.range_hi - opt.range_lo).epsilon(1e-9));

    // spot-check classification away from the edges
    for (int j = 0; j < 200; ++j) {
      const double phi = gen.uniform(opt.range_lo, opt.range_hi);
      const auto s = phase_shift_spurious(m, phi, n, c);
      const bool is_unsafe = !s.defined || std::abs(s.value_rad) >= r.threshold_rad;
      auto near_edge = [&](const std::vector<PhaseInterval>& v) {
        return std::any_of(v.begin(), v.end(), [&](const auto& iv) {
          return std::abs(iv.lo - phi) < 1e-9 || std::abs(iv.hi - phi) < 1e-9;
        });
      };
      if (near_edge(r.safe_windows)) continue;
      const bool in_safe = std::any_of(r.safe_windows.begin(), r.safe_windows.end(),
                                       [&](const auto& iv) { return iv.contains(phi); });
      CHECK(in_safe != is_unsafe);
    }
  }
}

TEST_CASE("optimal bias points fall in safe windows for the deployment numbers") {
  const auto r = scan(kPairs, 2, kCount);
  for (double p : r.optimal_bias_points) {
    const bool inside = std::any_of(r.safe_windows.begin(), r.safe_windows.end(),
                                    [&](const auto& iv) { return iv.contains(p); });
    CHECK(inside);
  }
}

TEST_CASE("tenth threshold widens every unsafe zone") {
  const auto full = scan(kPairs, 2, kCount);
  ZoneScanOptions opt;
  opt.threshold = ThresholdKind::tenth_shot_noise;
  const auto tenth = scan(kPairs, 2, kCount, opt);
  double full_w = 0, tenth_w = 0;
  for (const auto& iv : full.above_shot_noise_intervals) full_w += iv.width();
  for (const auto& iv : tenth.above_shot_noise_intervals) tenth_w += iv.width();
  CHECK(tenth_w > full_w);
  for (const auto& iv : full.above_shot_noise_intervals) {
    const bool covered = std::any_of(
        tenth.above_shot_noise_intervals.begin(), tenth.above_shot_noise_intervals.end(),
        [&](const auto& u) { return u.lo <= iv.lo + 1e-12 && u.hi >= iv.hi - 1e-12; });
    CHECK(covered);
  }
}

TEST_CASE("huge spurious count makes the whole range undefined") {
  const double m = 1000;
  const SpuriousCount c{1500, 1.0};  // a = 3
  const auto r = scan(m, 2, c);
  CHECK(r.undefined_half_width_rad == doctest::Approx(kPi / 2));
  REQUIRE(r.above_shot_noise_intervals.size() == 1);
  CHECK(r.above_shot_noise_intervals[0].lo == 0.0);
  CHECK(r.above_shot_noise_intervals[0].hi == kPi);
  CHECK(r.safe_windows.empty());
}

TEST_CASE("translation by 2 pi / N maps the zones onto themselves") {
  for (int n : {2, 3, 4}) {
    const double shift = 2 * kPi / n;
    ZoneScanOptions base;
    ZoneScanOptions moved;
    moved.range_lo = shift;
    moved.range_hi = kPi + shift;
    const auto r0 = scan(kPairs, n, kCount, base);
    const auto r1 = scan(kPairs, n, kCount, moved);
    REQUIRE(r0.above_shot_noise_intervals.size() == r1.above_shot_noise_intervals.size());
    for (std::size_t i = 0; i < r0.above_shot_noise_intervals.size(); ++i) {
      CHECK(r1.above_shot_noise_intervals[i].lo - shift ==
            doctest::Approx(r0.above_shot_noise_intervals[i].lo).epsilon(1e-9));
      CHECK(r1.above_shot_noise_intervals[i].hi - shift ==
            doctest::Approx(r0.above_shot_noise_intervals[i].hi).epsilon(1e-9));
    }
    REQUIRE(r0.crossings.size() == r1.crossings.size());
    for (std::size_t i = 0; i < r0.crossings.size(); ++i) {
      CHECK(r1.crossings[i].offset_rad == doctest::Approx(r0.crossings[i].offset_rad).epsilon(1e-6));
      CHECK(r1.crossings[i].at_maximum == r0.crossings[i].at_maximum);
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  ZoneScanOptions one;
  ZoneScanOptions many;
  many.workers = 4;
  const auto a = scan(kPairs, 3, kCount, one);
  const auto b = scan(kPairs, 3, kCount, many);
  CHECK(same(a.undefined_intervals, b.undefined_intervals));
  CHECK(same(a.above_shot_noise_intervals, b.above_shot_noise_intervals));
  CHECK(same(a.safe_windows, b.safe_windows));
  REQUIRE(a.crossings.size() == b.crossings.size());
  for (std::size_t i = 0; i < a.crossings.size(); ++i) {
    CHECK(a.crossings[i].phase_rad == b.crossings[i].phase_rad);
  }
}

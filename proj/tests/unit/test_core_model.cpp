#include <doctest.h>

#include <limits>

#include "qfog/core_model.hpp"

using namespace qfog;

namespace {

template <class F>
std::string failing_field(F&& make) {
  try {
    make();
  } catch (const InvalidField& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("GyroGeometry rejects each bad field by name") {
  CHECK_NOTHROW(GyroGeometry(1000, 0.4, 1550e-9));
  CHECK(failing_field([] { GyroGeometry(0, 0.4, 1550e-9); }) ==
        "GyroGeometry.fiber_length_m");
  CHECK(failing_field([] { GyroGeometry(1000, -1, 1550e-9); }) ==
        "GyroGeometry.coil_radius_m");
  CHECK(failing_field([] { GyroGeometry(1000, 0.4, 50e-9); }) ==
        "GyroGeometry.wavelength_m");
  CHECK(failing_field([] { GyroGeometry(1000, 0.4, 20e-6); }) ==
        "GyroGeometry.wavelength_m");
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(failing_field([&] { GyroGeometry(inf, 0.4, 1550e-9); }) ==
        "GyroGeometry.fiber_length_m");
}

TEST_CASE("SourceSpec invariants") {
  CHECK_NOTHROW(SourceSpec(2, 4000, 0.95));
  CHECK_NOTHROW(SourceSpec(6, 0, 1.0, 1000));
  CHECK(failing_field([] { SourceSpec(1, 4000, 0.95); }) == "SourceSpec.noon_order");
  CHECK(failing_field([] { SourceSpec(2, -1, 0.95); }) == "SourceSpec.pair_rate_hz");
  CHECK(failing_field([] { SourceSpec(2, 1, 0.0); }) ==
        "SourceSpec.initial_noon_fraction");
  CHECK(failing_field([] { SourceSpec(2, 1, 1.01); }) ==
        "SourceSpec.initial_noon_fraction");
  CHECK(failing_field([] { SourceSpec(2, 1, 0.5, -3); }) == "SourceSpec.dark_rate_hz");
}

TEST_CASE("OpticalPath and DetectionSpec invariants") {
  CHECK(failing_field([] { OpticalPath(-0.1, 0); }) ==
        "OpticalPath.fiber_loss_db_per_km");
  CHECK(failing_field([] { OpticalPath(0.2, -1); }) == "OpticalPath.lumped_loss_db");
  CHECK(OpticalPath(0.5, 3).total_loss_db(2000) == doctest::Approx(4.0));

  CHECK(failing_field([] { DetectionSpec(0, 1); }) == "DetectionSpec.jitter_s");
  CHECK(failing_field([] { DetectionSpec(1e-10, 0); }) ==
        "DetectionSpec.measurement_time_s");
  CHECK(failing_field([] { DetectionSpec(2, 1); }) == "DetectionSpec.jitter_s");
  CHECK(window_mode_from_string("sliding") == WindowMode::sliding);
  CHECK(to_string(WindowMode::binned) == "binned");
  CHECK_THROWS_AS(window_mode_from_string("overlapping"), InvalidField);
}

TEST_CASE("PhasePoint sums its parts and rejects non-finite values") {
  const PhasePoint p{0.25, 0.5};
  CHECK(p.total() == doctest::Approx(0.75));
  CHECK(failing_field([] { PhasePoint(std::nan(""), 0); }) ==
        "PhasePoint.sagnac_phase_rad");
  CHECK(failing_field([] {
          PhasePoint(0, std::numeric_limits<double>::infinity());
        }) == "PhasePoint.bias_phase_rad");
}

TEST_CASE("reduce_phase maps into [0, 2pi/N)") {
  CHECK(reduce_phase(0.0, 2) == 0.0);
  CHECK(reduce_phase(kPi + 0.1, 2) == doctest::Approx(0.1));
  CHECK(reduce_phase(-0.1, 2) == doctest::Approx(kPi - 0.1));
  CHECK(reduce_phase(7.0, 1) == doctest::Approx(7.0 - 2 * kPi));
  for (double x : {-100.0, -3.0, 0.5, 42.0}) {
    for (int n : {2, 3, 6}) {
      const double r = reduce_phase(x, n);
      CHECK(r >= 0.0);
      CHECK(r < 2 * kPi / n);
    }
  }
}

TEST_CASE("speed of light is the exact SI value") {
  CHECK(PhysConstants::c_m_per_s == 299792458.0);
}

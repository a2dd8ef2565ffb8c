#include <doctest.h>

#include <random>

#include "bedscan/kinematics.hpp"
#include "test_util.hpp"

using namespace bedscan;

TEST_SUITE("kinematics.corexy") {
  TEST_CASE("worked examples") {
    CHECK(corexy::to_motor(Vec2d(0, 0)) == Vec2d(0, 0));
    CHECK(corexy::to_motor(Vec2d(10, 0)) == Vec2d(10, 10));
    CHECK(corexy::to_motor(Vec2d(5, 5)) == Vec2d(10, 0));
    CHECK(corexy::to_cartesian(Vec2d(0, 0)) == Vec2d(0, 0));
    CHECK(corexy::to_cartesian(Vec2d(10, 10)) == Vec2d(10, 0));
  }

  TEST_CASE("round trip within 1e-12 over 1e4 random vectors") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Vec2d v(u(rng), u(rng));
      const Vec2d back = corexy::to_cartesian(corexy::to_motor(v));
      worst = std::max(worst, (back - v).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("transform is linear and preserves the origin") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 100; ++i) {
      const Vec2d a(u(rng), u(rng));
      const Vec2d b(u(rng), u(rng));
      const double s = u(rng) / 10.0;
      CHECK((corexy::to_motor(Vec2d(a + b)) -
             (corexy::to_motor(a) + corexy::to_motor(b)))
                .norm() <= 1e-12);
      CHECK((corexy::to_motor(Vec2d(s * a)) - s * corexy::to_motor(a)).norm() <=
            1e-9);
    }
  }
}

TEST_SUITE("kinematics.steps") {
  TEST_CASE("zero maps to zero") {
    CHECK(z_to_steps(0.0, MachineConfig::defaults()) == 0);
  }

  TEST_CASE("one revolution of the default leadscrew") {
    // 8 mm pitch, 200 full steps, 16 microsteps.
    CHECK(z_to_steps(8.0, MachineConfig::defaults()) == 3200);
  }

  TEST_CASE("out of range z names its axis") {
    CHECK_THROWS_WITH_AS(z_to_steps(300.0, MachineConfig::defaults()),
                         doctest::Contains("Z"), LimitError);
    CHECK_THROWS_AS(z_to_steps(-0.01, MachineConfig::defaults()), LimitError);
  }

  TEST_CASE("quantization error stays within half a step") {
    const MachineConfig cfg = MachineConfig::defaults();
    const double mm_per_step =
        cfg.z_pitch / (static_cast<double>(cfg.steps_per_rev) * cfg.microsteps);
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, cfg.build_volume.z());
    for (int i = 0; i < 2000; ++i) {
      const double z = u(rng);
      const double recon = static_cast<double>(z_to_steps(z, cfg)) * mm_per_step;
      CHECK(std::abs(z - recon) <= 0.5 * mm_per_step + 1e-12);
    }
  }
}

TEST_SUITE("kinematics.limits") {
  TEST_CASE("interior point passes through unchanged") {
    const Vec3d p(150, 150, 100);
    CHECK(clamp_move(p, MachineConfig::defaults()) == p);
  }

  TEST_CASE("x overtravel names X") {
    CHECK_THROWS_WITH_AS(
        clamp_move(Vec3d(301, 0, 0), MachineConfig::defaults()),
        doctest::Contains("X"), LimitError);
  }

  TEST_CASE("negative z names Z") {
    CHECK_THROWS_WITH_AS(
        clamp_move(Vec3d(0, 0, -1), MachineConfig::defaults()),
        doctest::Contains("Z"), LimitError);
  }

  TEST_CASE("every violated axis is named") {
    try {
      clamp_move(Vec3d(400, -5, 300), MachineConfig::defaults());
      FAIL("expected LimitError");
    } catch (const LimitError& e) {
      const std::string what = e.what();
      CHECK(what.find('X') != std::string::npos);
      CHECK(what.find('Y') != std::string::npos);
      CHECK(what.find('Z') != std::string::npos);
    }
  }
}

TEST_SUITE("kinematics.config") {
  TEST_CASE("defaults carry the platform constants") {
    const MachineConfig cfg = MachineConfig::defaults();
    CHECK(cfg.build_volume == Vec3d(300, 300, 265));
    CHECK(cfg.bed_size == Vec2d(330, 330));
    CHECK(cfg.heated_region == Vec2d(300, 300));
    CHECK(cfg.z_pitch == 8.0);
    CHECK(cfg.bearing_od == 120.0);
    CHECK(cfg.bed_center() == Vec2d(150, 150));
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("heated region must fit the bed") {
    MachineConfig cfg = MachineConfig::defaults();
    cfg.heated_region = Vec2d(340, 300);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("look_at orients a right-handed frame at the eye") {
    const RigidTransform t = look_at({30, 30, 330}, {150, 150, 90});
    const Mat3d r = t.linear();
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    CHECK((r * r.transpose() - Mat3d::Identity()).norm() < 1e-12);
    CHECK(t.translation() == Vec3d(30, 30, 330));
    // Optical axis through the target.
    const Vec3d fwd = r.col(2);
    const Vec3d to_target = (Vec3d(150, 150, 90) - Vec3d(30, 30, 330)).normalized();
    CHECK((fwd - to_target).norm() < 1e-12);
  }
}

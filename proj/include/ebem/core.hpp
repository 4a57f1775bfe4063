#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Stage an error belongs to; the CLI maps these to exit codes.
enum class ErrorStage { Config = 2, Geometry = 3, Assembly = 4, Solver = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorStage stage, const std::string& what)
      : std::runtime_error(what), stage_(stage) {}
  ErrorStage stage() const { return stage_; }
  const char* stage_name() const {
    switch (stage_) {
      case ErrorStage::Config: return "config";
      case ErrorStage::Geometry: return "geometry";
      case ErrorStage::Assembly: return "assembly";
      case ErrorStage::Solver: return "solver";
    }
    return "unknown";
  }

 private:
  ErrorStage stage_;
};

struct Aabb {
  Vec3 lo{Vec3::Constant(std::numeric_limits<double>::infinity())};
  Vec3 hi{Vec3::Constant(-std::numeric_limits<double>::infinity())};
  void absorb(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void absorb(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  double diag() const { return (hi - lo).norm(); }
};

}  // namespace ebem

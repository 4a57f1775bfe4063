#pragma once

#include "ebem/core.hpp"

namespace ebem {

// Rigid placement: x_world = R * x_local + t.
struct Frame {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  Vec3 to_world(const Vec3& p) const { return R * p + t; }
  Vec3 to_local(const Vec3& p) const { return R.transpose() * (p - t); }
  Vec3 dir_to_world(const Vec3& d) const { return R * d; }
  Vec3 dir_to_local(const Vec3& d) const { return R.transpose() * d; }
};

enum class PatchKind {
  SphereOctant,        // radius r0; the (+,+,+) octant of a sphere at the origin
  CylinderSegment,     // radius r0, z in [0, h], azimuth in [a0, a1]
  ConeFrustumSegment,  // radius r0 at z=0, r1 at z=h, azimuth in [a0, a1]
  AnnulusSector,       // z=0 plane, radius in [r0, r1], azimuth in [a0, a1]
  BilinearQuad,        // four corner points, bilinear interpolation
};

const char* patch_kind_name(PatchKind k);

struct ProjectResult {
  double u = 0, v = 0;
  Vec3 point = Vec3::Zero();  // world-space closest point on the patch
  double distance = 0;
  int iterations = 0;
  bool converged = false;
};

// One analytically parametrized surface piece over (u,v) in [0,1]^2.
struct Patch {
  PatchKind kind = PatchKind::BilinearQuad;
  std::string name;
  int group = -1;      // index into the model's region groups
  bool flip = false;   // reverse the natural normal
  bool sheet = false;  // open boundary allowed (no NoPartner on the rim)

  double r0 = 1, r1 = 1;  // radii (kind-specific meaning)
  double h = 1;           // axial height
  double a0 = 0, a1 = kPi / 2;  // azimuth range
  std::array<Vec3, 4> corners{};  // BilinearQuad only

  Frame frame;

  Vec3 at(double u, double v) const;                       // world position
  void derivatives(double u, double v, Vec3& pu, Vec3& pv) const;  // world
  Vec3 normal(double u, double v) const;  // unit normal, flip applied

  // Closest-point projection of a world point onto the patch, clamped to the
  // parameter box. Coordinate descent with closed-form 1-D steps.
  ProjectResult project(const Vec3& q, double tol, int max_iter = 20) const;

  Aabb bbox() const;             // sampled bounding box
  double diameter_hint() const;  // bbox diagonal

  void check() const;  // throws Error(Geometry) on invalid parameters

 private:
  Vec3 local_at(double u, double v) const;
  void local_derivatives(double u, double v, Vec3& pu, Vec3& pv) const;
};

// Rotation (det +1) mapping the (+,+,+) octant onto the octant with the given
// sign triple; used to assemble full spheres from one octant patch.
Mat3 octant_rotation(int sx, int sy, int sz);

}  // namespace ebem

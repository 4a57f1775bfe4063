#pragma once

#include "ebem/geometry.hpp"

namespace ebem {

enum class ElemShape { Tri, Quad };

struct MeshVertex {
  Vec3 pos;
  Vec2 uv;  // patch parameters of the generating grid point
};

// One element. The reference domain is the unit triangle (0,0),(1,0),(0,1)
// or the unit square; local coords map into patch parameters and from there
// onto the exact surface, so curved patches stay curved at the element level.
struct Element {
  ElemShape shape = ElemShape::Quad;
  std::array<int, 4> v{-1, -1, -1, -1};
  // Patch parameters backing the local->param map. Quads: bilinear on uv[0..3].
  // Plain tris: affine on uv[0..2]. Apex tris (collapsed structured cell):
  // uv[0..3] is the parameter rectangle (uv[2],uv[3] span the collapsed side,
  // whose 3D image is the single apex vertex v[2]).
  std::array<Vec2, 4> uv{};
  bool apex = false;

  double area = 0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal_c = Vec3::Zero();  // patch normal at the reference center
  double diameter = 0;           // max pairwise 3D corner distance

  int corner_count() const { return shape == ElemShape::Tri ? 3 : 4; }
  static Vec2 ref_corner(ElemShape s, int k);

  Vec2 uv_at(const Vec2& xhat) const;
  Eigen::Matrix2d uv_jacobian(const Vec2& xhat) const;
  // Inverse of uv_at for this element's parameter footprint. Returns false
  // when uv lies outside the footprint by more than snap (reference units);
  // on success xhat is clamped onto the reference domain.
  bool ref_from_uv(const Vec2& uv, Vec2& xhat, double snap) const;
};

struct SurfaceMesh {
  int patch_index = -1;
  std::vector<MeshVertex> vertices;
  std::vector<Element> elements;
  // Vertex chains along the four parameter edges u=0, u=1, v=0, v=1, ordered
  // along the edge; a collapsed (degenerate) edge yields an empty list.
  std::array<std::vector<int>, 4> edge_vertices;
  std::vector<int> boundary_vertices;              // sorted unique
  std::vector<std::vector<int>> vertex_elements;   // vertex -> incident elements
  Aabb bounds;

  // Exact surface position of element-local coordinates.
  Vec3 point(const Patch& patch, int elem, const Vec2& xhat) const;
  // 3D tangent columns d(pos)/d(xhat); their cross product is the area density.
  Eigen::Matrix<double, 3, 2> tangents(const Patch& patch, int elem,
                                       const Vec2& xhat) const;
};

struct MeshSpec {
  int nu = 4, nv = 4;
  ElemShape shape = ElemShape::Quad;
};

struct QualityReport {
  double min_angle_deg = 180;
  double max_aspect = 1;
  double max_warp_deg = 0;  // among quads that remained quads
  double min_area = 0;
  double total_area = 0;
  int warped_split_count = 0;  // quads converted to triangle pairs
};

struct MeshLimits {
  double warp_split_deg = 30;  // quads warped beyond this become two triangles
  double min_angle_deg = 5;    // enforced later, before assembly
};

SurfaceMesh build_structured_mesh(const Patch& patch, const MeshSpec& spec,
                                  int patch_index,
                                  const MeshLimits& limits = {});

QualityReport mesh_quality(const SurfaceMesh& mesh, const Patch& patch);

}  // namespace ebem

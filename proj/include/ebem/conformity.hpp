#pragma once

#include "ebem/mesh.hpp"

#include <map>

namespace ebem {

struct Tolerances {
  double gap_rel = 1e-8;   // vertex-to-surface acceptance, relative to model diameter
  double cpp_rel = 1e-12;  // projection parameter convergence, relative to diameter
  double ref_snap = 1e-6;  // element-local snap distance to edges/corners
  int cpp_max_iter = 20;
};

// A boundary vertex of one mesh resting on an element of another mesh.
struct HangingNode {
  int foreign_mesh = -1, foreign_vertex = -1;
  int host_mesh = -1, host_element = -1;
  Vec2 local = Vec2::Zero();  // host element reference coordinates
  double distance = 0;
  // A vertex landing on an element edge or corner is recorded once per
  // containing element; the lowest element index is the primary record.
  bool primary = true;
};

struct LinkIssue {
  enum Kind { NoPartner, Ambiguous } kind;
  int mesh = -1, vertex = -1;
  std::string detail;
};

struct InterfaceLinks {
  std::vector<HangingNode> nodes;  // sorted by (foreign mesh, vertex, host mesh)
  std::vector<LinkIssue> issues;

  // vertex identity: global ids shared by geometrically coincident boundary
  // vertices across meshes (other vertices keep a unique id)
  std::vector<long long> vertex_group;  // per global vertex index
  std::vector<int> mesh_vertex0;        // global index offset per mesh

  long long group_of(int mesh, int vertex) const {
    return vertex_group[mesh_vertex0[mesh] + vertex];
  }
  // (host mesh, host element) -> node indices landing on it
  std::multimap<std::pair<int, int>, int> by_host;
  // (foreign mesh, foreign vertex) -> node indices
  std::multimap<std::pair<int, int>, int> by_foreign;
};

InterfaceLinks link_interfaces(const std::vector<Patch>& patches,
                               const std::vector<SurfaceMesh>& meshes,
                               double model_diameter, const Tolerances& tol);

// ---- pair classification ----------------------------------------------

// A sub-triangle of an element in its parent reference coordinates, corners
// carrying the identity of the interface contact point they sit on (-1: none).
struct SubTri {
  std::array<Vec2, 3> ref;
  std::array<long long, 3> ident{-1, -1, -1};
};

struct PairContact {
  bool touching = false;
  std::vector<SubTri> a_subs, b_subs;
  int a_splits = 0, b_splits = 0;  // interior subdivision points used
};

// Decide how two distinct elements touch and produce the matching
// subdivisions. Quads are fanned from the centroid when subdivided and split
// along an identity-respecting diagonal otherwise; triangles split toward
// the vertex opposite the contact edge. Throws Error(Assembly) with
// "UnresolvedOverlap" when contacts are inconsistent with a shared edge or
// vertex (overlapping panels).
PairContact classify_pair(const std::vector<SurfaceMesh>& meshes,
                          const InterfaceLinks& links, int mesh_a, int elem_a,
                          int mesh_b, int elem_b, double ref_snap = 1e-6);

}  // namespace ebem

#pragma once

#include "ebem/core.hpp"

namespace ebem {

enum class RefDomain { Tri, Quad };

struct QPoint {
  double x, y, w;
};

struct GaussRule {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre on [0,1]; n in [1,30].
const GaussRule& gauss_legendre(int n);

// n*n points on the reference square, or Duffy-collapsed onto the unit
// triangle {x,y >= 0, x+y <= 1}. Weights sum to the reference measure.
std::vector<QPoint> tensor_rule(RefDomain domain, int n);

enum class PairCase { Regular, CommonVertex, CommonEdge, Identical };

const char* pair_case_name(PairCase c);

// A quadrature point pair on two reference domains.
struct PairPoint {
  Vec2 a, b;
  double w;
};

// Singular rules for a pair of unit reference triangles in canonical
// position: Identical (same triangle), CommonEdge (shared edge = first edge,
// vertex 0 of one panel paired with vertex 0 of the other), CommonVertex
// (shared vertex = vertex 0 of both). n is the Gauss order per coordinate;
// n in [1,12]. Cached per (case, n).
const std::vector<PairPoint>& singular_rule_tri(PairCase c, int n);

// A triangle pair given by corner coordinates inside each panel's reference
// domain, shared entities occupying the leading corners as required by `c`.
struct TriPairRef {
  std::array<Vec2, 3> a, b;
  PairCase c = PairCase::Regular;  // Regular pieces use a tensor product
};

// Compose canonical rules over a list of sub-triangle pairs; returned
// coordinates live in the original panels' reference domains.
std::vector<PairPoint> compose_rule(const std::vector<TriPairRef>& pieces, int n);

// Rule for a full panel pair of the given shapes; quads are decomposed into
// reference triangles preserving the shared entity (shared edge = first edge
// of each panel; shared vertex = first vertex).
std::vector<PairPoint> singular_rule(PairCase c, RefDomain sa, RefDomain sb, int n);

}  // namespace ebem

#include "ebem/quadrature.hpp"

#include <map>
#include <mutex>

namespace ebem {

const char* pair_case_name(PairCase c) {
  switch (c) {
    case PairCase::Regular: return "regular";
    case PairCase::CommonVertex: return "common_vertex";
    case PairCase::CommonEdge: return "common_edge";
    case PairCase::Identical: return "identical";
  }
  return "?";
}

namespace {

GaussRule make_gauss(int n) {
  // Newton iteration on Legendre polynomials over [-1,1], then shift to [0,1].
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = 0.5 * (1 + x);
    r.weights[n - 1 - i] = 1.0 / ((1 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 30)
    throw Error(ErrorStage::Config, "Gauss order must be in [1,30], got " + std::to_string(n));
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

std::vector<QPoint> tensor_rule(RefDomain domain, int n) {
  const GaussRule& g = gauss_legendre(n);
  std::vector<QPoint> pts;
  pts.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = g.nodes[i], t = g.nodes[j], w = g.weights[i] * g.weights[j];
      if (domain == RefDomain::Quad) {
        pts.push_back({s, t, w});
      } else {
        // Duffy collapse onto the unit triangle; the Jacobian factor s
        // resolves point singularities at the first vertex (origin)
        pts.push_back({s * (1 - t), s * t, w * s});
      }
    }
  return pts;
}

namespace {

// The four-coordinate singular transforms; points are produced in simplex
// coordinates (0 <= x2 <= x1 <= 1) and shifted into the standard unit
// triangle via x1 -= x2.
void gen_singular(PairCase c, int n, std::vector<PairPoint>& out) {
  const GaussRule& g = gauss_legendre(n);
  auto emit = [&](double a1, double a2, double b1, double b2, double w) {
    out.push_back({Vec2(a1 - a2, a2), Vec2(b1 - b2, b2), w});
  };
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          double xi = g.nodes[i0], e1 = g.nodes[i1], e2 = g.nodes[i2], e3 = g.nodes[i3];
          double w4 = g.weights[i0] * g.weights[i1] * g.weights[i2] * g.weights[i3];
          double xi3 = xi * xi * xi;
          switch (c) {
            case PairCase::Identical: {
              double w = w4 * xi3 * e1 * e1 * e2;
              emit(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), w);
              emit(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), w);
              emit(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), w);
              emit(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), w);
              emit(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), w);
              emit(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), w);
              break;
            }
            case PairCase::CommonEdge: {
              // each region is emitted together with its mirror at half
              // weight so that swapping the panels permutes the point list
              // exactly (value invariance to rounding)
              auto emit_sym = [&](double a1, double a2, double b1, double b2, double w) {
                emit(a1, a2, b1, b2, w / 2);
                emit(b1, b2, a1, a2, w / 2);
              };
              double w = w4 * xi3 * e1 * e1 * e2;
              emit_sym(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2),
                       w4 * xi3 * e1 * e1);
              emit_sym(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), w);
              emit_sym(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, w);
              emit_sym(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, w);
              emit_sym(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, w);
              break;
            }
            case PairCase::CommonVertex: {
              double w = w4 * xi3 * e2;
              emit(xi, xi * e1, xi * e2, xi * e2 * e3, w);
              emit(xi * e2, xi * e2 * e3, xi, xi * e1, w);
              break;
            }
            case PairCase::Regular: {
              // Duffy on both panels; useful as a fallback only
              double w = w4 * xi * e2;
              emit(xi, xi * e1, e2, e2 * e3, w);
              break;
            }
          }
        }
}

}  // namespace

const std::vector<PairPoint>& singular_rule_tri(PairCase c, int n) {
  if (n < 1 || n > 12)
    throw Error(ErrorStage::Config,
                "singular quadrature order must be in [1,12], got " + std::to_string(n));
  static std::map<std::pair<int, int>, std::vector<PairPoint>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(int(c), n);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<PairPoint> pts;
    gen_singular(c, n, pts);
    it = cache.emplace(key, std::move(pts)).first;
  }
  return it->second;
}

std::vector<PairPoint> compose_rule(const std::vector<TriPairRef>& pieces, int n) {
  std::vector<PairPoint> out;
  auto det2 = [](const std::array<Vec2, 3>& t) {
    Vec2 u = t[1] - t[0], v = t[2] - t[0];
    return std::abs(u.x() * v.y() - u.y() * v.x());
  };
  auto map_tri = [](const std::array<Vec2, 3>& t, const Vec2& x) -> Vec2 {
    return t[0] + x.x() * (t[1] - t[0]) + x.y() * (t[2] - t[0]);
  };
  for (const auto& piece : pieces) {
    double ja = det2(piece.a), jb = det2(piece.b);
    if (piece.c == PairCase::Regular) {
      auto ta = tensor_rule(RefDomain::Tri, n);
      auto tb = tensor_rule(RefDomain::Tri, n);
      for (const auto& pa : ta)
        for (const auto& pb : tb)
          out.push_back({map_tri(piece.a, Vec2(pa.x, pa.y)),
                         map_tri(piece.b, Vec2(pb.x, pb.y)), pa.w * pb.w * ja * jb});
      continue;
    }
    for (const auto& pp : singular_rule_tri(piece.c, n))
      out.push_back({map_tri(piece.a, pp.a), map_tri(piece.b, pp.b), pp.w * ja * jb});
  }
  return out;
}

namespace {

// Reference square corners.
const Vec2 kQ[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
// Reference triangle corners.
const Vec2 kT[3] = {{0, 0}, {1, 0}, {0, 1}};

}  // namespace

std::vector<PairPoint> singular_rule(PairCase c, RefDomain sa, RefDomain sb, int n) {
  if (c == PairCase::Regular)
    throw Error(ErrorStage::Assembly, "singular_rule called with the regular case");
  if (c == PairCase::Identical && sa != sb)
    throw Error(ErrorStage::Assembly, "identical pair with mismatched shapes");

  // Sub-triangles with the panel's shared slots listed per corner:
  // slot 0 / slot 1 are the canonical shared vertices, -1 means unshared.
  struct Sub {
    std::array<Vec2, 3> p;
    std::array<int, 3> slot;
  };
  auto tri_whole = [&](PairCase cc) -> std::vector<Sub> {
    if (cc == PairCase::CommonEdge) return {{{kT[0], kT[1], kT[2]}, {0, 1, -1}}};
    return {{{kT[0], kT[1], kT[2]}, {0, -1, -1}}};
  };
  auto quad_split = [&](PairCase cc) -> std::vector<Sub> {
    if (cc == PairCase::CommonEdge)
      // diagonal c1-c3 keeps the shared bottom edge intact in the first piece
      return {{{kQ[0], kQ[1], kQ[3]}, {0, 1, -1}}, {{kQ[1], kQ[2], kQ[3]}, {1, -1, -1}}};
    // diagonal c0-c2 through the shared corner
    return {{{kQ[0], kQ[1], kQ[2]}, {0, -1, -1}}, {{kQ[0], kQ[2], kQ[3]}, {0, -1, -1}}};
  };

  if (c == PairCase::Identical) {
    if (sa == RefDomain::Tri) {
      return compose_rule({{{kT[0], kT[1], kT[2]}, {kT[0], kT[1], kT[2]}, PairCase::Identical}}, n);
    }
    // split the square along c0-c2; the two halves share that edge
    std::array<Vec2, 3> t1 = {kQ[0], kQ[1], kQ[2]};
    std::array<Vec2, 3> t2 = {kQ[0], kQ[2], kQ[3]};
    // reorder around the shared edge (c0,c2) for the cross terms
    std::array<Vec2, 3> t1e = {kQ[0], kQ[2], kQ[1]};
    std::array<Vec2, 3> t2e = {kQ[0], kQ[2], kQ[3]};
    return compose_rule({{t1, t1, PairCase::Identical},
                         {t2, t2, PairCase::Identical},
                         {t1e, t2e, PairCase::CommonEdge},
                         {t2e, t1e, PairCase::CommonEdge}},
                        n);
  }

  std::vector<Sub> A = (sa == RefDomain::Tri) ? tri_whole(c) : quad_split(c);
  std::vector<Sub> B = (sb == RefDomain::Tri) ? tri_whole(c) : quad_split(c);

  std::vector<TriPairRef> pieces;
  for (const auto& a : A)
    for (const auto& b : B) {
      // shared slots present in both pieces
      std::vector<int> shared;
      for (int s = 0; s < 2; ++s) {
        bool ina = a.slot[0] == s || a.slot[1] == s || a.slot[2] == s;
        bool inb = b.slot[0] == s || b.slot[1] == s || b.slot[2] == s;
        if (ina && inb) shared.push_back(s);
      }
      TriPairRef piece;
      auto order_by = [&](const Sub& sub, std::array<Vec2, 3>& out) {
        std::array<int, 3> idx = {0, 1, 2};
        // shared slots first, in slot order; unshared corners keep cyclic order
        std::array<int, 3> rank;
        for (int k = 0; k < 3; ++k) {
          int sl = sub.slot[k];
          bool used = false;
          for (size_t q = 0; q < shared.size(); ++q)
            if (sl == shared[q]) {
              rank[k] = (int)q;
              used = true;
            }
          if (!used) rank[k] = 3 + k;
        }
        std::sort(idx.begin(), idx.end(), [&](int x, int y) { return rank[x] < rank[y]; });
        for (int k = 0; k < 3; ++k) out[k] = sub.p[idx[k]];
      };
      if (shared.size() == 2) piece.c = PairCase::CommonEdge;
      else if (shared.size() == 1) piece.c = PairCase::CommonVertex;
      else piece.c = PairCase::Regular;
      order_by(a, piece.a);
      order_by(b, piece.b);
      pieces.push_back(piece);
    }
  return compose_rule(pieces, n);
}

}  // namespace ebem

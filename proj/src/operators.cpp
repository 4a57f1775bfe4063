#include "ebem/operators.hpp"

#include <algorithm>
#include <cmath>

namespace ebem {

int shape_count(ElemShape shape, SpaceOrder space) {
  if (space == SpaceOrder::P0) return 1;
  return shape == ElemShape::Tri ? 3 : 4;
}

void shape_values(ElemShape shape, SpaceOrder space, const Vec2& ref, double out[4]) {
  if (space == SpaceOrder::P0) {
    out[0] = 1;
    return;
  }
  double x = ref.x(), y = ref.y();
  if (shape == ElemShape::Tri) {
    out[0] = 1 - x - y;
    out[1] = x;
    out[2] = y;
    return;
  }
  out[0] = (1 - x) * (1 - y);
  out[1] = x * (1 - y);
  out[2] = x * y;
  out[3] = (1 - x) * y;
}

DofLayout make_dof_layout(const Model& model, SpaceOrder space) {
  DofLayout lay;
  lay.space = space;
  lay.mesh_elem0.push_back(0);
  for (const auto& mesh : model.meshes)
    lay.mesh_elem0.push_back(lay.mesh_elem0.back() + (int)mesh.elements.size());

  lay.elem_dof0.push_back(0);
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e) {
      int nd = shape_count(model.meshes[m].elements[e].shape, space);
      for (int k = 0; k < nd; ++k) {
        lay.dof_mesh.push_back(m);
        lay.dof_elem.push_back(lay.global_elem(m, e));
        lay.dof_local.push_back(k);
      }
      lay.elem_dof0.push_back(lay.elem_dof0.back() + nd);
    }
  lay.n_sigma = lay.elem_dof0.back();

  lay.constraint_of_group.assign(model.groups.size(), -1);
  int next = lay.n_sigma;
  for (int g = 0; g < (int)model.groups.size(); ++g)
    if (model.groups[g].tag == RegionTag::FloatingElectrode)
      lay.constraint_of_group[g] = next++;
  lay.n_total = next;
  return lay;
}

namespace {

constexpr double kFourPi = 4 * kPi;

inline RefDomain domain_of(ElemShape s) {
  return s == ElemShape::Tri ? RefDomain::Tri : RefDomain::Quad;
}

struct SurfPoint {
  Vec3 x, n;
  double w;  // quadrature weight including the surface density
  double phi[4];
};

// One surface quadrature point of an element at reference coordinates `ref`;
// `wref` is the reference-measure weight (including any sub-piece map factor).
inline SurfPoint surf_point(const Model& model, int mi, int ei, const Vec2& ref,
                            double wref, SpaceOrder space) {
  const SurfaceMesh& mesh = model.meshes[mi];
  const Element& el = mesh.elements[ei];
  const Patch& patch = model.patches[mesh.patch_index];
  Vec2 uv = el.uv_at(ref);
  Vec3 pu, pv;
  patch.derivatives(uv.x(), uv.y(), pu, pv);
  Vec3 cr = pu.cross(pv);
  double ncr = cr.norm();
  SurfPoint p;
  p.x = patch.at(uv.x(), uv.y());
  p.n = cr * ((patch.flip ? -1.0 : 1.0) / ncr);
  p.w = wref * std::abs(el.uv_jacobian(ref).determinant()) * ncr;
  shape_values(el.shape, space, ref, p.phi);
  return p;
}

struct ElemCache {
  int mesh = -1, elem = -1;
  int nd = 1;
  std::vector<SurfPoint> reg, far;
  Vec3 center = Vec3::Zero();  // bounding sphere over corner samples
  double radius = 0;
  double diam = 0;
  std::vector<long long> idents;  // sorted interface-contact identities
  double mass[16] = {0};          // nd x nd, row-major
  double iphi[4] = {0};
};

inline bool on_ref_boundary(ElemShape shape, const Vec2& r) {
  const double eps = 1e-9;
  if (r.x() < eps || r.y() < eps) return true;
  if (shape == ElemShape::Tri) return r.x() + r.y() > 1 - eps;
  return r.x() > 1 - eps || r.y() > 1 - eps;
}

std::vector<SurfPoint> element_rule(const Model& model, int mi, int ei, int order,
                                    SpaceOrder space) {
  const Element& el = model.meshes[mi].elements[ei];
  std::vector<SurfPoint> pts;
  auto rule = tensor_rule(domain_of(el.shape), order);
  pts.reserve(rule.size());
  for (const auto& q : rule)
    pts.push_back(surf_point(model, mi, ei, Vec2(q.x, q.y), q.w, space));
  return pts;
}

ElemCache build_cache(const Model& model, const InterfaceLinks& links, int mi, int ei,
                      const AssemblyOptions& opt) {
  const SurfaceMesh& mesh = model.meshes[mi];
  const Element& el = mesh.elements[ei];
  ElemCache c;
  c.mesh = mi;
  c.elem = ei;
  c.nd = shape_count(el.shape, opt.space);
  c.reg = element_rule(model, mi, ei, opt.order_regular, opt.space);
  c.far = element_rule(model, mi, ei, opt.order_far, opt.space);

  for (const auto& p : c.reg)
    for (int a = 0; a < c.nd; ++a) {
      c.iphi[a] += p.w * p.phi[a];
      for (int b = 0; b < c.nd; ++b) c.mass[a * c.nd + b] += p.w * p.phi[a] * p.phi[b];
    }

  c.center = el.centroid;
  for (int k = 0; k < el.corner_count(); ++k)
    c.radius = std::max(c.radius, (mesh.vertices[el.v[k]].pos - c.center).norm());
  c.diam = el.diameter;
  c.radius += 0.1 * c.diam;  // curvature bulge margin

  for (int k = 0; k < el.corner_count(); ++k)
    c.idents.push_back(links.group_of(mi, el.v[k]));
  auto range = links.by_host.equal_range({mi, ei});
  for (auto it = range.first; it != range.second; ++it) {
    const HangingNode& nd = links.nodes[it->second];
    if (on_ref_boundary(el.shape, nd.local))
      c.idents.push_back(links.group_of(nd.foreign_mesh, nd.foreign_vertex));
  }
  std::sort(c.idents.begin(), c.idents.end());
  c.idents.erase(std::unique(c.idents.begin(), c.idents.end()), c.idents.end());
  return c;
}

inline bool idents_intersect(const std::vector<long long>& a,
                             const std::vector<long long>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else return true;
  }
  return false;
}

// Pair contribution accumulator. V is symmetric and shared by both row
// classes; the normal-derivative kernel is row-specific (Ka: rows of panel a,
// Kb: rows of panel b, each over the same point pairs).
struct PairBlocks {
  int na = 1, nb = 1;
  bool wantV = false, wantKa = false, wantKb = false;
  double V[16] = {0}, Ka[16] = {0}, Kb[16] = {0};

  inline void add(const SurfPoint& pa, const SurfPoint& pb, double wpair) {
    Vec3 r = pa.x - pb.x;
    double r2 = r.squaredNorm();
    double rin = 1.0 / std::sqrt(r2);
    double wab = pa.w * pb.w * wpair / kFourPi;
    if (wantV) {
      double kv = wab * rin;
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) V[i * nb + j] += kv * pa.phi[i] * pb.phi[j];
    }
    if (wantKa | wantKb) {
      double r3 = wab * rin * rin * rin;
      if (wantKa) {
        double ka = -pa.n.dot(r) * r3;
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < nb; ++j) Ka[i * nb + j] += ka * pa.phi[i] * pb.phi[j];
      }
      if (wantKb) {
        double kb = pb.n.dot(r) * r3;
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < na; ++j) Kb[i * na + j] += kb * pb.phi[i] * pa.phi[j];
      }
    }
  }
};

// A rectangular or triangular portion of an element's reference domain with a
// bounding sphere of its curved image, used for distance grading and
// recursive near-field subdivision.
struct RefPiece {
  int mesh = -1, elem = -1;
  bool rect = true;
  Vec2 lo = Vec2::Zero(), hi = Vec2::Ones();  // rect bounds
  std::array<Vec2, 3> tri{};                  // tri corners
  Vec3 center = Vec3::Zero();
  double radius = 0, diam = 0;
};

RefPiece finish_piece(const Model& model, RefPiece p) {
  const SurfaceMesh& mesh = model.meshes[p.mesh];
  const Patch& patch = model.patches[mesh.patch_index];
  Vec3 s[5];
  int ns = 0;
  if (p.rect) {
    s[ns++] = mesh.point(patch, p.elem, p.lo);
    s[ns++] = mesh.point(patch, p.elem, Vec2(p.hi.x(), p.lo.y()));
    s[ns++] = mesh.point(patch, p.elem, p.hi);
    s[ns++] = mesh.point(patch, p.elem, Vec2(p.lo.x(), p.hi.y()));
    s[ns++] = mesh.point(patch, p.elem, 0.5 * (p.lo + p.hi));
  } else {
    for (int k = 0; k < 3; ++k) s[ns++] = mesh.point(patch, p.elem, p.tri[k]);
    s[ns++] = mesh.point(patch, p.elem, (p.tri[0] + p.tri[1] + p.tri[2]) / 3.0);
  }
  p.center = Vec3::Zero();
  for (int i = 0; i < ns; ++i) p.center += s[i];
  p.center /= ns;
  for (int i = 0; i < ns; ++i)
    for (int j = i + 1; j < ns; ++j) p.diam = std::max(p.diam, (s[i] - s[j]).norm());
  for (int i = 0; i < ns; ++i) p.radius = std::max(p.radius, (s[i] - p.center).norm());
  p.radius += 0.1 * p.diam;
  return p;
}

RefPiece whole_piece(const Model& model, int mi, int ei) {
  const Element& el = model.meshes[mi].elements[ei];
  RefPiece p;
  p.mesh = mi;
  p.elem = ei;
  if (el.shape == ElemShape::Quad) {
    p.rect = true;
  } else {
    p.rect = false;
    p.tri = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  }
  return finish_piece(model, p);
}

void split_piece(const Model& model, const RefPiece& p, RefPiece out[4]) {
  if (p.rect) {
    Vec2 mid = 0.5 * (p.lo + p.hi);
    for (int k = 0; k < 4; ++k) {
      out[k] = p;
      out[k].radius = out[k].diam = 0;
    }
    out[0].hi = mid;
    out[1].lo = Vec2(mid.x(), p.lo.y());
    out[1].hi = Vec2(p.hi.x(), mid.y());
    out[2].lo = mid;
    out[3].lo = Vec2(p.lo.x(), mid.y());
    out[3].hi = Vec2(mid.x(), p.hi.y());
  } else {
    Vec2 m01 = 0.5 * (p.tri[0] + p.tri[1]);
    Vec2 m12 = 0.5 * (p.tri[1] + p.tri[2]);
    Vec2 m20 = 0.5 * (p.tri[2] + p.tri[0]);
    std::array<std::array<Vec2, 3>, 4> kids = {{{p.tri[0], m01, m20},
                                                {m01, p.tri[1], m12},
                                                {m20, m12, p.tri[2]},
                                                {m01, m12, m20}}};
    for (int k = 0; k < 4; ++k) {
      out[k] = p;
      out[k].radius = out[k].diam = 0;
      out[k].tri = kids[k];
    }
  }
  for (int k = 0; k < 4; ++k) out[k] = finish_piece(model, out[k]);
}

inline double sphere_gap(const Vec3& ca, double ra, const Vec3& cb, double rb) {
  return std::max(0.0, (ca - cb).norm() - ra - rb);
}

std::vector<SurfPoint> piece_rule(const Model& model, const RefPiece& p, int order,
                                  SpaceOrder space) {
  std::vector<SurfPoint> pts;
  if (p.rect) {
    auto rule = tensor_rule(RefDomain::Quad, order);
    Vec2 ext = p.hi - p.lo;
    double scale = ext.x() * ext.y();
    pts.reserve(rule.size());
    for (const auto& q : rule)
      pts.push_back(surf_point(model, p.mesh, p.elem,
                               p.lo + Vec2(q.x * ext.x(), q.y * ext.y()),
                               q.w * scale, space));
  } else {
    auto rule = tensor_rule(RefDomain::Tri, order);
    Vec2 e1 = p.tri[1] - p.tri[0], e2 = p.tri[2] - p.tri[0];
    double scale = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    pts.reserve(rule.size());
    for (const auto& q : rule)
      pts.push_back(surf_point(model, p.mesh, p.elem,
                               p.tri[0] + q.x * e1 + q.y * e2, q.w * scale, space));
  }
  return pts;
}

class PairEngine {
 public:
  PairEngine(const Model& model, const InterfaceLinks& links,
             const AssemblyOptions& opt)
      : model_(model), links_(links), opt_(opt) {}

  const Model& model_;
  const InterfaceLinks& links_;
  const AssemblyOptions& opt_;

  // Gauss order for a disjoint pair, or -1 when subdivision is required.
  int graded_order(double gap, double maxd) const {
    if (gap >= opt_.far_ratio * maxd) return opt_.order_far;
    if (gap >= 2 * maxd) return opt_.order_regular;
    if (gap >= maxd) return opt_.order_regular + 1;
    if (gap >= opt_.near_ratio * maxd) return opt_.order_regular + 2;
    return -1;
  }

  void leaf(const RefPiece& a, const RefPiece& b, int order, PairBlocks& acc) const {
    auto pa = piece_rule(model_, a, order, opt_.space);
    auto pb = piece_rule(model_, b, order, opt_.space);
    for (const auto& qa : pa)
      for (const auto& qb : pb) acc.add(qa, qb, 1.0);
  }

  void near_recurse(const RefPiece& a, const RefPiece& b, int depth,
                    PairBlocks& acc) const {
    double gap = sphere_gap(a.center, a.radius, b.center, b.radius);
    double maxd = std::max(a.diam, b.diam);
    int order = graded_order(gap, maxd);
    if (order < 0 && depth >= opt_.near_depth) order = opt_.order_regular + 2;
    if (order >= 0) {
      leaf(a, b, order, acc);
      return;
    }
    RefPiece kids[4];
    if (std::abs(a.diam - b.diam) <= 1e-9 * (a.diam + b.diam)) {
      // split both sides so the rule cannot depend on panel order
      RefPiece kb[4];
      split_piece(model_, a, kids);
      split_piece(model_, b, kb);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) near_recurse(kids[i], kb[j], depth + 2, acc);
    } else if (a.diam > b.diam) {
      split_piece(model_, a, kids);
      for (int k = 0; k < 4; ++k) near_recurse(kids[k], b, depth + 1, acc);
    } else {
      split_piece(model_, b, kids);
      for (int k = 0; k < 4; ++k) near_recurse(a, kids[k], depth + 1, acc);
    }
  }

  void eval_rules(const std::vector<SurfPoint>& pa, const std::vector<SurfPoint>& pb,
                  PairBlocks& acc) const {
    for (const auto& qa : pa)
      for (const auto& qb : pb) acc.add(qa, qb, 1.0);
  }

  void eval_pair_points(const std::vector<PairPoint>& pts, int mi, int ei, int mj,
                        int ej, PairBlocks& acc) const {
    for (const auto& pp : pts) {
      SurfPoint qa = surf_point(model_, mi, ei, pp.a, 1.0, opt_.space);
      SurfPoint qb = surf_point(model_, mj, ej, pp.b, 1.0, opt_.space);
      acc.add(qa, qb, pp.w);
    }
  }

  void identical(const ElemCache& ca, PairBlocks& acc) const {
    const Element& el = model_.meshes[ca.mesh].elements[ca.elem];
    RefDomain dom = domain_of(el.shape);
    auto pts = singular_rule(PairCase::Identical, dom, dom, opt_.order_singular);
    eval_pair_points(pts, ca.mesh, ca.elem, ca.mesh, ca.elem, acc);
  }

  // Touching pair: matched sub-triangles with shared identities go through
  // the composed singular rules; identity-free sub-pairs are separated and
  // integrate through the graded near-field path.
  void touching(const ElemCache& ca, const ElemCache& cb, const PairContact& pc,
                PairBlocks& acc) const {
    std::vector<TriPairRef> pieces;
    for (const auto& sa : pc.a_subs)
      for (const auto& sb : pc.b_subs) {
        struct Match {
          long long key;
          int ia, ib;
        };
        Match match[3];
        int nm = 0;
        for (int i = 0; i < 3; ++i) {
          if (sa.ident[i] < 0) continue;
          for (int j = 0; j < 3; ++j)
            if (sb.ident[j] == sa.ident[i]) {
              match[nm++] = {sa.ident[i], i, j};
              break;
            }
        }
        if (nm >= 3)
          throw Error(ErrorStage::Assembly,
                      "UnresolvedOverlap: coincident sub-panels between elements");
        if (nm == 0) {
          RefPiece a;
          a.mesh = ca.mesh;
          a.elem = ca.elem;
          a.rect = false;
          a.tri = sa.ref;
          RefPiece b;
          b.mesh = cb.mesh;
          b.elem = cb.elem;
          b.rect = false;
          b.tri = sb.ref;
          near_recurse(finish_piece(model_, a), finish_piece(model_, b), 0, acc);
          continue;
        }
        if (nm == 2 && match[0].key > match[1].key) std::swap(match[0], match[1]);
        TriPairRef tp;
        tp.c = nm == 2 ? PairCase::CommonEdge : PairCase::CommonVertex;
        bool used_a[3] = {false, false, false}, used_b[3] = {false, false, false};
        for (int k = 0; k < nm; ++k) {
          tp.a[k] = sa.ref[match[k].ia];
          tp.b[k] = sb.ref[match[k].ib];
          used_a[match[k].ia] = used_b[match[k].ib] = true;
        }
        int wa = nm, wb = nm;
        for (int i = 0; i < 3; ++i) {
          if (!used_a[i]) tp.a[wa++] = sa.ref[i];
          if (!used_b[i]) tp.b[wb++] = sb.ref[i];
        }
        pieces.push_back(tp);
      }
    if (!pieces.empty())
      eval_pair_points(compose_rule(pieces, opt_.order_singular), ca.mesh, ca.elem,
                       cb.mesh, cb.elem, acc);
  }

  void disjoint(const ElemCache& ca, const ElemCache& cb, PairBlocks& acc) const {
    double gap = sphere_gap(ca.center, ca.radius, cb.center, cb.radius);
    double maxd = std::max(ca.diam, cb.diam);
    if (gap >= opt_.far_ratio * maxd) {
      eval_rules(ca.far, cb.far, acc);
    } else if (gap >= 2 * maxd) {
      eval_rules(ca.reg, cb.reg, acc);
    } else {
      near_recurse(whole_piece(model_, ca.mesh, ca.elem),
                   whole_piece(model_, cb.mesh, cb.elem), 0, acc);
    }
  }
};

}  // namespace

LinearSystem assemble_system(const Model& model, const InterfaceLinks& links,
                             const AssemblyOptions& opt) {
  const int nmesh = (int)model.meshes.size();
  DofLayout lay = make_dof_layout(model, opt.space);
  LinearSystem sys{Eigen::MatrixXd::Zero(lay.n_total, lay.n_total),
                   Eigen::VectorXd::Zero(lay.n_total), lay};

  std::vector<char> is_diel(nmesh);
  std::vector<double> lam(nmesh, 0);
  for (int m = 0; m < nmesh; ++m) {
    const RegionGroup& g = model.mesh_group(m);
    is_diel[m] = g.tag == RegionTag::Dielectric;
    if (is_diel[m]) lam[m] = dielectric_lambda(g.eps_plus, g.eps_minus);
  }

  const int total = model.total_elements();
  std::vector<ElemCache> cache;
  cache.reserve(total);
  for (int m = 0; m < nmesh; ++m)
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e)
      cache.push_back(build_cache(model, links, m, e, opt));

  PairEngine engine(model, links, opt);

  for (int ga = 0; ga < total; ++ga) {
    const ElemCache& ca = cache[ga];
    int ra = lay.elem_dof0[ga];
    for (int gb = ga; gb < total; ++gb) {
      const ElemCache& cb = cache[gb];
      int rb = lay.elem_dof0[gb];

      PairBlocks acc;
      acc.na = ca.nd;
      acc.nb = cb.nd;
      acc.wantV = !is_diel[ca.mesh] || (ga != gb && !is_diel[cb.mesh]);
      acc.wantKa = is_diel[ca.mesh];
      acc.wantKb = ga != gb && is_diel[cb.mesh];

      if (ga == gb) {
        engine.identical(ca, acc);
      } else if (idents_intersect(ca.idents, cb.idents)) {
        PairContact pc = classify_pair(model.meshes, links, ca.mesh, ca.elem, cb.mesh,
                                       cb.elem, model.tol.ref_snap);
        if (pc.touching)
          engine.touching(ca, cb, pc, acc);
        else
          engine.disjoint(ca, cb, acc);
      } else {
        engine.disjoint(ca, cb, acc);
      }

      if (!is_diel[ca.mesh])
        for (int i = 0; i < ca.nd; ++i)
          for (int j = 0; j < cb.nd; ++j) sys.A(ra + i, rb + j) += acc.V[i * cb.nd + j];
      if (ga != gb && !is_diel[cb.mesh])
        for (int i = 0; i < ca.nd; ++i)
          for (int j = 0; j < cb.nd; ++j) sys.A(rb + j, ra + i) += acc.V[i * cb.nd + j];
      if (is_diel[ca.mesh])
        for (int i = 0; i < ca.nd; ++i)
          for (int j = 0; j < cb.nd; ++j) sys.A(ra + i, rb + j) += acc.Ka[i * cb.nd + j];
      if (ga != gb && is_diel[cb.mesh])
        for (int i = 0; i < cb.nd; ++i)
          for (int j = 0; j < ca.nd; ++j) sys.A(rb + i, ra + j) += acc.Kb[i * ca.nd + j];
    }
  }

  // flux-continuity mass term, voltage data, and floating-group coupling
  for (int ga = 0; ga < total; ++ga) {
    const ElemCache& ca = cache[ga];
    const RegionGroup& g = model.mesh_group(ca.mesh);
    int ra = lay.elem_dof0[ga];
    if (is_diel[ca.mesh]) {
      for (int i = 0; i < ca.nd; ++i)
        for (int j = 0; j < ca.nd; ++j)
          sys.A(ra + i, ra + j) += lam[ca.mesh] * ca.mass[i * ca.nd + j];
    } else if (g.tag == RegionTag::Electrode) {
      for (int i = 0; i < ca.nd; ++i) sys.b(ra + i) = g.voltage * ca.iphi[i];
    } else {
      int row = lay.constraint_of_group[model.patches[model.meshes[ca.mesh].patch_index].group];
      for (int i = 0; i < ca.nd; ++i) {
        sys.A(ra + i, row) -= ca.iphi[i];
        sys.A(row, ra + i) += ca.iphi[i];
      }
    }
  }
  return sys;
}

}  // namespace ebem

#include "ebem/post.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ebem {

double sigma_at(const Model& model, const DofLayout& lay,
                const Eigen::VectorXd& sigma, int mesh, int elem, const Vec2& ref) {
  const Element& el = model.meshes[mesh].elements[elem];
  int ge = lay.global_elem(mesh, elem);
  double phi[4];
  shape_values(el.shape, lay.space, ref, phi);
  double v = 0;
  for (int k = 0; k < lay.ndof(ge); ++k) v += phi[k] * sigma(lay.elem_dof0[ge] + k);
  return v;
}

namespace {

constexpr double kFourPi = 4 * kPi;

struct EvalPiece {
  bool rect = true;
  Vec2 lo = Vec2::Zero(), hi = Vec2::Ones();
  std::array<Vec2, 3> tri{};
  Vec3 center = Vec3::Zero();
  double radius = 0, diam = 0;
};

EvalPiece finish(const Model& model, int mi, int ei, EvalPiece p) {
  const SurfaceMesh& mesh = model.meshes[mi];
  const Patch& patch = model.patches[mesh.patch_index];
  Vec3 s[5];
  int ns = 0;
  if (p.rect) {
    s[ns++] = mesh.point(patch, ei, p.lo);
    s[ns++] = mesh.point(patch, ei, Vec2(p.hi.x(), p.lo.y()));
    s[ns++] = mesh.point(patch, ei, p.hi);
    s[ns++] = mesh.point(patch, ei, Vec2(p.lo.x(), p.hi.y()));
    s[ns++] = mesh.point(patch, ei, 0.5 * (p.lo + p.hi));
  } else {
    for (int k = 0; k < 3; ++k) s[ns++] = mesh.point(patch, ei, p.tri[k]);
    s[ns++] = mesh.point(patch, ei, (p.tri[0] + p.tri[1] + p.tri[2]) / 3.0);
  }
  for (int i = 0; i < ns; ++i) p.center += s[i];
  p.center /= ns;
  for (int i = 0; i < ns; ++i)
    for (int j = i + 1; j < ns; ++j) p.diam = std::max(p.diam, (s[i] - s[j]).norm());
  for (int i = 0; i < ns; ++i) p.radius = std::max(p.radius, (s[i] - p.center).norm());
  p.radius += 0.1 * p.diam;
  return p;
}

struct Accum {
  double u = 0;
  Vec3 g = Vec3::Zero();  // gradient of the potential
};

void leaf_eval(const Model& model, const DofLayout& lay, const Eigen::VectorXd& sigma,
               int mi, int ei, const EvalPiece& p, const Vec3& x, int order,
               bool want_grad, Accum& acc) {
  const SurfaceMesh& mesh = model.meshes[mi];
  const Element& el = mesh.elements[ei];
  const Patch& patch = model.patches[mesh.patch_index];
  int ge = lay.global_elem(mi, ei);
  int nd = lay.ndof(ge);

  auto rule = tensor_rule(p.rect ? RefDomain::Quad : RefDomain::Tri, order);
  for (const auto& q : rule) {
    Vec2 ref;
    double scale;
    if (p.rect) {
      Vec2 ext = p.hi - p.lo;
      ref = p.lo + Vec2(q.x * ext.x(), q.y * ext.y());
      scale = ext.x() * ext.y();
    } else {
      Vec2 e1 = p.tri[1] - p.tri[0], e2 = p.tri[2] - p.tri[0];
      ref = p.tri[0] + q.x * e1 + q.y * e2;
      scale = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    }
    Vec2 uv = el.uv_at(ref);
    Vec3 pu, pv;
    patch.derivatives(uv.x(), uv.y(), pu, pv);
    double dens = pu.cross(pv).norm() *
                  std::abs(el.uv_jacobian(ref).determinant());
    double phi[4];
    shape_values(el.shape, lay.space, ref, phi);
    double sg = 0;
    for (int k = 0; k < nd; ++k) sg += phi[k] * sigma(lay.elem_dof0[ge] + k);

    Vec3 y = patch.at(uv.x(), uv.y());
    Vec3 r = x - y;
    double rn = r.norm();
    double wq = q.w * scale * dens * sg / kFourPi;
    acc.u += wq / rn;
    if (want_grad) acc.g -= r * (wq / (rn * rn * rn));
  }
}

void eval_recurse(const Model& model, const DofLayout& lay,
                  const Eigen::VectorXd& sigma, int mi, int ei, const EvalPiece& p,
                  const Vec3& x, const EvalOptions& opt, int depth, bool want_grad,
                  Accum& acc) {
  double gap = std::max(0.0, (x - p.center).norm() - p.radius);
  if (gap >= opt.near * p.diam || depth >= opt.max_depth) {
    leaf_eval(model, lay, sigma, mi, ei, p, x, opt.order, want_grad, acc);
    return;
  }
  EvalPiece kids[4];
  if (p.rect) {
    Vec2 mid = 0.5 * (p.lo + p.hi);
    for (int k = 0; k < 4; ++k) kids[k] = EvalPiece{};
    kids[0].lo = p.lo;
    kids[0].hi = mid;
    kids[1].lo = Vec2(mid.x(), p.lo.y());
    kids[1].hi = Vec2(p.hi.x(), mid.y());
    kids[2].lo = mid;
    kids[2].hi = p.hi;
    kids[3].lo = Vec2(p.lo.x(), mid.y());
    kids[3].hi = Vec2(mid.x(), p.hi.y());
  } else {
    Vec2 m01 = 0.5 * (p.tri[0] + p.tri[1]);
    Vec2 m12 = 0.5 * (p.tri[1] + p.tri[2]);
    Vec2 m20 = 0.5 * (p.tri[2] + p.tri[0]);
    std::array<std::array<Vec2, 3>, 4> t = {{{p.tri[0], m01, m20},
                                             {m01, p.tri[1], m12},
                                             {m20, m12, p.tri[2]},
                                             {m01, m12, m20}}};
    for (int k = 0; k < 4; ++k) {
      kids[k] = EvalPiece{};
      kids[k].rect = false;
      kids[k].tri = t[k];
    }
  }
  for (int k = 0; k < 4; ++k)
    eval_recurse(model, lay, sigma, mi, ei, finish(model, mi, ei, kids[k]), x, opt,
                 depth + 1, want_grad, acc);
}

Accum eval_all(const Model& model, const DofLayout& lay, const Eigen::VectorXd& sigma,
               const Vec3& x, const EvalOptions& opt, bool want_grad) {
  Accum acc;
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e) {
      const Element& el = model.meshes[m].elements[e];
      EvalPiece p;
      if (el.shape == ElemShape::Tri) {
        p.rect = false;
        p.tri = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
      }
      eval_recurse(model, lay, sigma, m, e, finish(model, m, e, p), x, opt, 0,
                   want_grad, acc);
    }
  return acc;
}

}  // namespace

double eval_potential(const Model& model, const DofLayout& lay,
                      const Eigen::VectorXd& sigma, const Vec3& x,
                      const EvalOptions& opt) {
  return eval_all(model, lay, sigma, x, opt, false).u;
}

Vec3 eval_field(const Model& model, const DofLayout& lay,
                const Eigen::VectorXd& sigma, const Vec3& x, const EvalOptions& opt) {
  return -eval_all(model, lay, sigma, x, opt, true).g;
}

namespace {

// integral of each dof's shape function over its element
double dof_integral(const Model& model, const DofLayout& lay, int ge, int k) {
  int mi = lay.dof_mesh[lay.elem_dof0[ge]];
  int ei = ge - lay.mesh_elem0[mi];
  const Element& el = model.meshes[mi].elements[ei];
  if (lay.space == SpaceOrder::P0) return el.area;
  const Patch& patch = model.patches[model.meshes[mi].patch_index];
  double v = 0;
  for (const auto& q : tensor_rule(el.shape == ElemShape::Tri ? RefDomain::Tri
                                                              : RefDomain::Quad,
                                   6)) {
    Vec2 ref(q.x, q.y);
    Vec2 uv = el.uv_at(ref);
    Vec3 pu, pv;
    patch.derivatives(uv.x(), uv.y(), pu, pv);
    double phi[4];
    shape_values(el.shape, lay.space, ref, phi);
    v += q.w * phi[k] * pu.cross(pv).norm() *
         std::abs(el.uv_jacobian(ref).determinant());
  }
  return v;
}

}  // namespace

double group_sigma_integral(const Model& model, const DofLayout& lay,
                            const Eigen::VectorXd& sigma, int group) {
  double q = 0;
  for (int m = 0; m < (int)model.meshes.size(); ++m) {
    if (model.patches[m].group != group) continue;
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e) {
      int ge = lay.global_elem(m, e);
      for (int k = 0; k < lay.ndof(ge); ++k)
        q += sigma(lay.elem_dof0[ge] + k) * dof_integral(model, lay, ge, k);
    }
  }
  return q;
}

double group_free_charge(const Model& model, const DofLayout& lay,
                         const Eigen::VectorXd& sigma, int group) {
  return model.groups[group].eps_ambient *
         group_sigma_integral(model, lay, sigma, group);
}

double group_area(const Model& model, int group) {
  double a = 0;
  for (int m = 0; m < (int)model.meshes.size(); ++m) {
    if (model.patches[m].group != group) continue;
    for (const auto& el : model.meshes[m].elements) a += el.area;
  }
  return a;
}

double group_potential(const Model& model, const Solution& sol, int group) {
  const RegionGroup& g = model.groups[group];
  if (g.tag == RegionTag::Electrode) return g.voltage;
  if (g.tag == RegionTag::FloatingElectrode) {
    int row = sol.layout.constraint_of_group[group];
    return sol.alpha[row - sol.layout.n_sigma];
  }
  throw Error(ErrorStage::Config,
              "group '" + g.id + "' is a dielectric and has no conductor potential");
}

double pair_capacitance(const Model& model, const Solution& sol, int pos, int neg) {
  double dv = group_potential(model, sol, pos) - group_potential(model, sol, neg);
  if (std::abs(dv) < 1e-300)
    throw Error(ErrorStage::Config, "capacitance pair at equal potential");
  return group_free_charge(model, sol.layout, sol.sigma, pos) / dv;
}

void write_vtk(const std::string& path, const Model& model, const DofLayout& lay,
               const Eigen::VectorXd& sigma) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorStage::Config, "cannot write '" + path + "'");
  char buf[256];

  int npts = 0, nelem = 0, conn = 0;
  for (const auto& mesh : model.meshes) {
    npts += (int)mesh.vertices.size();
    nelem += (int)mesh.elements.size();
    for (const auto& el : mesh.elements) conn += 1 + el.corner_count();
  }

  out << "# vtk DataFile Version 3.0\nsurface charge density\nASCII\n"
         "DATASET POLYDATA\n";
  out << "POINTS " << npts << " double\n";
  for (const auto& mesh : model.meshes)
    for (const auto& v : mesh.vertices) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.pos.x(), v.pos.y(),
                    v.pos.z());
      out << buf;
    }
  out << "POLYGONS " << nelem << " " << conn << "\n";
  int off = 0;
  for (const auto& mesh : model.meshes) {
    for (const auto& el : mesh.elements) {
      out << el.corner_count();
      for (int k = 0; k < el.corner_count(); ++k) out << " " << off + el.v[k];
      out << "\n";
    }
    off += (int)mesh.vertices.size();
  }

  out << "CELL_DATA " << nelem << "\n";
  out << "SCALARS sigma double 1\nLOOKUP_TABLE default\n";
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e) {
      const Element& el = model.meshes[m].elements[e];
      Vec2 c = el.shape == ElemShape::Tri ? Vec2(1.0 / 3, 1.0 / 3) : Vec2(0.5, 0.5);
      std::snprintf(buf, sizeof buf, "%.17g\n", sigma_at(model, lay, sigma, m, e, c));
      out << buf;
    }
  out << "SCALARS region_group int 1\nLOOKUP_TABLE default\n";
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (size_t e = 0; e < model.meshes[m].elements.size(); ++e)
      out << model.patches[m].group << "\n";
  out << "SCALARS mesh_index int 1\nLOOKUP_TABLE default\n";
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (size_t e = 0; e < model.meshes[m].elements.size(); ++e) out << m << "\n";
}

void write_element_csv(const std::string& path, const Model& model,
                       const DofLayout& lay, const Eigen::VectorXd& sigma) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorStage::Config, "cannot write '" + path + "'");
  out << "mesh,element,group,cx,cy,cz,area,sigma\n";
  char buf[320];
  for (int m = 0; m < (int)model.meshes.size(); ++m)
    for (int e = 0; e < (int)model.meshes[m].elements.size(); ++e) {
      const Element& el = model.meshes[m].elements[e];
      Vec2 c = el.shape == ElemShape::Tri ? Vec2(1.0 / 3, 1.0 / 3) : Vec2(0.5, 0.5);
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", m, e,
                    model.patches[m].group, el.centroid.x(), el.centroid.y(),
                    el.centroid.z(), el.area, sigma_at(model, lay, sigma, m, e, c));
      out << buf;
    }
}

void write_hanging_csv(const std::string& path, const InterfaceLinks& links) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorStage::Config, "cannot write '" + path + "'");
  out << "foreign_mesh,foreign_vertex,host_mesh,host_element,r,s,distance\n";
  char buf[256];
  for (const auto& nd : links.nodes) {
    if (!nd.primary) continue;
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.17g,%.17g,%.17g\n", nd.foreign_mesh,
                  nd.foreign_vertex, nd.host_mesh, nd.host_element, nd.local.x(),
                  nd.local.y(), nd.distance);
    out << buf;
  }
}

nlohmann::json make_report(const Model& model, const InterfaceLinks& links,
                           const Solution& sol, const AssemblyOptions& opt) {
  nlohmann::json rep;
  rep["schema"] = 1;
  rep["space"] = opt.space == SpaceOrder::P0 ? "p0" : "p1d";
  rep["quadrature"] = {{"order_regular", opt.order_regular},
                       {"order_singular", opt.order_singular},
                       {"order_far", opt.order_far}};
  rep["dofs"] = {{"sigma", sol.layout.n_sigma}, {"total", sol.layout.n_total}};
  rep["solve"] = {{"n", sol.report.n},
                  {"residual", sol.report.residual_rel},
                  {"rcond", sol.report.rcond},
                  {"ill_conditioned", sol.report.ill_conditioned}};

  int primaries = 0;
  for (const auto& nd : links.nodes) primaries += nd.primary ? 1 : 0;
  int elements = 0;
  for (const auto& mesh : model.meshes) elements += (int)mesh.elements.size();
  rep["model"] = {{"meshes", (int)model.meshes.size()},
                  {"elements", elements},
                  {"hanging_nodes", primaries},
                  {"link_issues", (int)links.issues.size()},
                  {"diameter", model.diameter}};

  auto& groups = rep["groups"];
  groups = nlohmann::json::array();
  for (int g = 0; g < (int)model.groups.size(); ++g) {
    const RegionGroup& rg = model.groups[g];
    nlohmann::json jg;
    jg["id"] = rg.id;
    jg["tag"] = region_tag_name(rg.tag);
    jg["area"] = group_area(model, g);
    jg["sigma_integral"] = group_sigma_integral(model, sol.layout, sol.sigma, g);
    if (rg.tag != RegionTag::Dielectric) {
      jg["free_charge"] = group_free_charge(model, sol.layout, sol.sigma, g);
      jg["potential"] = group_potential(model, sol, g);
    } else {
      jg["eps"] = {rg.eps_plus, rg.eps_minus};
    }
    groups.push_back(jg);
  }
  return rep;
}

}  // namespace ebem

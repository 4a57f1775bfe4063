#include "ebem/conformity.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace ebem {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // canonical root: smallest global index
    parent[b] = a;
  }
};

double aabb_distance(const Aabb& b, const Vec3& p) {
  double d2 = 0;
  for (int k = 0; k < 3; ++k) {
    double d = std::max({b.lo[k] - p[k], p[k] - b.hi[k], 0.0});
    d2 += d * d;
  }
  return std::sqrt(d2);
}

// detect whether two patches coincide on a 2D neighborhood of a linked vertex
// (duplicated surface) rather than merely sharing a boundary curve: probe a
// few points strictly inside the foreign patch near the vertex
bool surfaces_overlap_near(const Patch& foreign, const Vec2& uv_foreign,
                           const Patch& host, double tol_gap, double tol_cpp,
                           int max_iter) {
  const double delta = 0.05;
  std::vector<Vec2> probes;
  for (int su = -1; su <= 1; su += 2)
    for (int sv = -1; sv <= 1; sv += 2) {
      Vec2 p(std::clamp(uv_foreign.x() + su * delta, delta, 1 - delta),
             std::clamp(uv_foreign.y() + sv * delta, delta, 1 - delta));
      bool dup = false;
      for (const auto& q : probes)
        if ((q - p).norm() < 1e-12) dup = true;
      if (!dup) probes.push_back(p);
    }
  for (const auto& pr : probes) {
    Vec3 x = foreign.at(pr.x(), pr.y());
    auto res = host.project(x, tol_cpp, max_iter);
    if (res.distance > 10 * tol_gap) return false;
  }
  return true;
}

struct EdgePoint {
  int edge = -1;       // -1: at a corner
  int corner = -1;
  double t = 0;        // position along the (ccw) edge
  bool interior = false;
};

// classify a reference point of an element as corner / edge point / interior
EdgePoint locate_on_element(ElemShape shape, const Vec2& r, double snap) {
  EdgePoint ep;
  int n = (shape == ElemShape::Tri) ? 3 : 4;
  for (int k = 0; k < n; ++k)
    if ((r - Element::ref_corner(shape, k)).lpNorm<Eigen::Infinity>() <= snap) {
      ep.corner = k;
      return ep;
    }
  double x = r.x(), y = r.y();
  if (shape == ElemShape::Tri) {
    if (y <= snap) { ep.edge = 0; ep.t = x; return ep; }
    if (x + y >= 1 - snap) { ep.edge = 1; ep.t = y; return ep; }
    if (x <= snap) { ep.edge = 2; ep.t = 1 - y; return ep; }
  } else {
    if (y <= snap) { ep.edge = 0; ep.t = x; return ep; }
    if (x >= 1 - snap) { ep.edge = 1; ep.t = y; return ep; }
    if (y >= 1 - snap) { ep.edge = 2; ep.t = 1 - x; return ep; }
    if (x <= snap) { ep.edge = 3; ep.t = 1 - y; return ep; }
  }
  ep.interior = true;
  return ep;
}

}  // namespace

InterfaceLinks link_interfaces(const std::vector<Patch>& patches,
                               const std::vector<SurfaceMesh>& meshes,
                               double model_diameter, const Tolerances& tol) {
  const double tol_gap = tol.gap_rel * model_diameter;
  const double tol_cpp = tol.cpp_rel * model_diameter;
  const int nm = (int)meshes.size();

  InterfaceLinks links;
  links.mesh_vertex0.resize(nm + 1, 0);
  for (int m = 0; m < nm; ++m)
    links.mesh_vertex0[m + 1] = links.mesh_vertex0[m] + (int)meshes[m].vertices.size();
  const int ntot = links.mesh_vertex0[nm];
  links.mesh_vertex0.pop_back();

  // merge geometrically coincident boundary vertices across meshes
  Dsu dsu(ntot);
  {
    const double cell = std::max(tol_gap, 1e-300);
    std::map<std::array<long long, 3>, std::vector<std::pair<int, int>>> hash;
    for (int m = 0; m < nm; ++m)
      for (int v : meshes[m].boundary_vertices) {
        const Vec3& p = meshes[m].vertices[v].pos;
        std::array<long long, 3> key;
        for (int k = 0; k < 3; ++k) key[k] = (long long)std::floor(p[k] / cell);
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              auto it = hash.find({key[0] + dx, key[1] + dy, key[2] + dz});
              if (it == hash.end()) continue;
              for (auto [m2, v2] : it->second)
                if (m2 != m && (meshes[m2].vertices[v2].pos - p).norm() <= tol_gap)
                  dsu.unite(links.mesh_vertex0[m] + v, links.mesh_vertex0[m2] + v2);
            }
        hash[key].push_back({m, v});
      }
  }
  links.vertex_group.resize(ntot);
  for (int g = 0; g < ntot; ++g) links.vertex_group[g] = dsu.find(g);

  std::vector<Aabb> patch_box(nm);
  std::vector<double> patch_diam(nm);
  for (int m = 0; m < nm; ++m) {
    patch_box[m] = patches[meshes[m].patch_index].bbox();
    patch_diam[m] = patch_box[m].diag();
  }

  std::set<std::pair<int, int>> probed;  // (foreign mesh, host mesh) pairs
  for (int fm = 0; fm < nm; ++fm) {
    const Patch& fpatch = patches[meshes[fm].patch_index];
    for (int fv : meshes[fm].boundary_vertices) {
      const Vec3& p = meshes[fm].vertices[fv].pos;
      const Vec2& fuv = meshes[fm].vertices[fv].uv;
      int hosts = 0;
      for (int hm = 0; hm < nm; ++hm) {
        if (hm == fm) continue;
        const Patch& hpatch = patches[meshes[hm].patch_index];
        if (aabb_distance(patch_box[hm], p) > 0.05 * patch_diam[hm] + 4 * tol_gap)
          continue;
        auto pr = hpatch.project(p, tol_cpp, tol.cpp_max_iter);
        if (pr.distance > tol_gap) continue;

        // every containing element gets a record: a landing on a shared
        // element edge is a contact of all elements meeting there; the
        // lowest element index is the primary one
        Vec2 quv(pr.u, pr.v);
        bool first = true;
        for (int ei = 0; ei < (int)meshes[hm].elements.size(); ++ei) {
          Vec2 ref;
          if (!meshes[hm].elements[ei].ref_from_uv(quv, ref, tol.ref_snap))
            continue;
          ElemShape sh = meshes[hm].elements[ei].shape;
          EdgePoint ep = locate_on_element(sh, ref, tol.ref_snap);
          if (ep.corner >= 0) {
            ref = Element::ref_corner(sh, ep.corner);
          } else if (ep.edge >= 0) {
            int n = (sh == ElemShape::Tri) ? 3 : 4;
            Vec2 a = Element::ref_corner(sh, ep.edge);
            Vec2 b = Element::ref_corner(sh, (ep.edge + 1) % n);
            ref = a + ep.t * (b - a);
          }
          HangingNode node;
          node.foreign_mesh = fm;
          node.foreign_vertex = fv;
          node.host_mesh = hm;
          node.host_element = ei;
          node.local = ref;
          node.distance = (meshes[hm].point(hpatch, ei, ref) - p).norm();
          node.primary = first;
          links.nodes.push_back(node);
          if (first) ++hosts;
          first = false;
          if (ep.interior) break;  // interior landing: unique container
        }

        if (probed.insert({fm, hm}).second &&
            surfaces_overlap_near(fpatch, fuv, hpatch, tol_gap, tol_cpp,
                                  tol.cpp_max_iter)) {
          LinkIssue issue;
          issue.kind = LinkIssue::Ambiguous;
          issue.mesh = fm;
          issue.vertex = fv;
          issue.detail = "patch '" + fpatch.name + "' overlaps patch '" +
                         hpatch.name + "' on a two-dimensional region";
          links.issues.push_back(issue);
        }
      }
      if (hosts == 0 && !fpatch.sheet) {
        LinkIssue issue;
        issue.kind = LinkIssue::NoPartner;
        issue.mesh = fm;
        issue.vertex = fv;
        issue.detail = "boundary vertex of patch '" + fpatch.name +
                       "' rests on no other patch";
        links.issues.push_back(issue);
      }
    }
  }

  for (int i = 0; i < (int)links.nodes.size(); ++i) {
    const auto& n = links.nodes[i];
    links.by_host.insert({{n.host_mesh, n.host_element}, i});
    links.by_foreign.insert({{n.foreign_mesh, n.foreign_vertex}, i});
  }
  return links;
}

namespace {

struct SideContact {
  int corner = -1;   // local corner index when the contact sits at a corner
  int edge = -1;     // otherwise: edge index and parameter along it
  double t = 0;
};

struct Contact {
  long long key;
  SideContact a, b;
};

// assemble the sub-triangle list of one element given its contacts
std::vector<SubTri> build_side(ElemShape shape,
                               const std::vector<Contact>& contacts, bool a_side,
                               int* splits_out, const char* who) {
  const int n = (shape == ElemShape::Tri) ? 3 : 4;
  std::array<long long, 4> corner_key{-1, -1, -1, -1};
  struct Split { int edge; double t; long long key; };
  std::vector<Split> splits;
  for (const auto& c : contacts) {
    const SideContact& sc = a_side ? c.a : c.b;
    if (sc.corner >= 0)
      corner_key[sc.corner] = c.key;
    else
      splits.push_back({sc.edge, sc.t, c.key});
  }

  auto overlap_error = [&](const std::string& why) {
    throw Error(ErrorStage::Assembly,
                std::string("UnresolvedOverlap: ") + who + ": " + why);
  };

  std::vector<SubTri> out;
  if (splits.empty()) {
    std::vector<int> marked;
    for (int k = 0; k < n; ++k)
      if (corner_key[k] >= 0) marked.push_back(k);
    if ((int)marked.size() > 2)
      overlap_error("more than two shared corners between distinct elements");
    if (shape == ElemShape::Tri) {
      SubTri s;
      for (int k = 0; k < 3; ++k) {
        s.ref[k] = Element::ref_corner(shape, k);
        s.ident[k] = corner_key[k];
      }
      out.push_back(s);
      return out;
    }
    // quad: split along a diagonal that keeps the contact entities intact
    int d = 0;  // diagonal through corners d and d+2
    if (marked.size() == 2) {
      int gap = (marked[1] - marked[0]);
      if (gap == 2) overlap_error("contacts at opposite corners of a quad");
      // shared edge (k, k+1): cut along the other diagonal
      int k = (gap == 1) ? marked[0] : marked[1];
      d = (k + 1) % 4;
    } else if (marked.size() == 1) {
      d = marked[0];  // diagonal through the shared corner
    }
    for (int half = 0; half < 2; ++half) {
      SubTri s;
      int ids[3] = {d, (d + 1 + half) % 4, (d + 2 + half) % 4};
      if (half == 1) { ids[1] = (d + 2) % 4; ids[2] = (d + 3) % 4; }
      for (int k = 0; k < 3; ++k) {
        s.ref[k] = Element::ref_corner(shape, ids[k]);
        s.ident[k] = corner_key[ids[k]];
      }
      out.push_back(s);
    }
    return out;
  }

  // interior subdivision points: all contacts must live on one edge
  int e = splits[0].edge;
  for (const auto& s : splits)
    if (s.edge != e) overlap_error("contact points on two different edges");
  for (int k = 0; k < n; ++k)
    if (corner_key[k] >= 0 && k != e && k != (e + 1) % n)
      overlap_error("corner contact away from the subdivided edge");
  std::sort(splits.begin(), splits.end(),
            [](const Split& x, const Split& y) { return x.t < y.t; });
  if (splits_out) *splits_out = (int)splits.size();

  if (shape == ElemShape::Tri) {
    // split toward the vertex opposite the contact edge
    Vec2 a = Element::ref_corner(shape, e);
    Vec2 b = Element::ref_corner(shape, (e + 1) % 3);
    int opp = (e + 2) % 3;
    Vec2 c = Element::ref_corner(shape, opp);
    Vec2 prev = a;
    long long prev_key = corner_key[e];
    for (int i = 0; i <= (int)splits.size(); ++i) {
      Vec2 next;
      long long next_key;
      if (i < (int)splits.size()) {
        next = a + splits[i].t * (b - a);
        next_key = splits[i].key;
      } else {
        next = b;
        next_key = corner_key[(e + 1) % 3];
      }
      SubTri s;
      s.ref = {prev, next, c};
      s.ident = {prev_key, next_key, corner_key[opp]};
      out.push_back(s);
      prev = next;
      prev_key = next_key;
    }
    return out;
  }

  // quad: fan from the centroid over the perimeter with splits inserted
  struct Node { Vec2 r; long long key; };
  std::vector<Node> per;
  for (int k = 0; k < 4; ++k) {
    per.push_back({Element::ref_corner(shape, k), corner_key[k]});
    if (k == e) {
      Vec2 a = Element::ref_corner(shape, k);
      Vec2 b = Element::ref_corner(shape, (k + 1) % 4);
      for (const auto& s : splits) per.push_back({a + s.t * (b - a), s.key});
    }
  }
  Vec2 center(0.5, 0.5);
  for (int i = 0; i < (int)per.size(); ++i) {
    const Node& p0 = per[i];
    const Node& p1 = per[(i + 1) % per.size()];
    SubTri s;
    s.ref = {center, p0.r, p1.r};
    s.ident = {-1, p0.key, p1.key};
    out.push_back(s);
  }
  return out;
}

}  // namespace

PairContact classify_pair(const std::vector<SurfaceMesh>& meshes,
                          const InterfaceLinks& links, int mesh_a, int elem_a,
                          int mesh_b, int elem_b, double ref_snap) {
  const Element& ea = meshes[mesh_a].elements[elem_a];
  const Element& eb = meshes[mesh_b].elements[elem_b];

  std::map<long long, Contact> contacts;
  auto touch = [&](long long key) -> Contact& {
    auto it = contacts.find(key);
    if (it == contacts.end()) {
      Contact c;
      c.key = key;
      it = contacts.insert({key, c}).first;
    }
    return it->second;
  };

  // corner-to-corner matches through merged vertex identities
  for (int ka = 0; ka < ea.corner_count(); ++ka)
    for (int kb = 0; kb < eb.corner_count(); ++kb) {
      long long ga = links.group_of(mesh_a, ea.v[ka]);
      long long gb = links.group_of(mesh_b, eb.v[kb]);
      if (ga == gb) {
        Contact& c = touch(ga);
        c.a.corner = ka;
        c.b.corner = kb;
      }
    }

  // hanging vertices of one element resting on the other
  auto absorb_hanging = [&](int host_mesh, int host_elem, int guest_mesh,
                            const Element& guest, bool host_is_a) {
    auto range = links.by_host.equal_range({host_mesh, host_elem});
    for (auto it = range.first; it != range.second; ++it) {
      const HangingNode& nd = links.nodes[it->second];
      if (nd.foreign_mesh != guest_mesh) continue;
      int kb = -1;
      for (int k = 0; k < guest.corner_count(); ++k)
        if (guest.v[k] == nd.foreign_vertex) kb = k;
      if (kb < 0) continue;
      long long key = links.group_of(guest_mesh, nd.foreign_vertex);
      EdgePoint ep = locate_on_element(
          meshes[host_mesh].elements[host_elem].shape, nd.local, ref_snap);
      if (ep.interior) continue;  // overlapping sheets: flagged at link time
      Contact& c = touch(key);
      SideContact& host_side = host_is_a ? c.a : c.b;
      SideContact& guest_side = host_is_a ? c.b : c.a;
      if (host_side.corner < 0 && ep.corner >= 0) {
        host_side.corner = ep.corner;
        host_side.edge = -1;
      } else if (host_side.corner < 0 && host_side.edge < 0) {
        host_side.edge = ep.edge;
        host_side.t = ep.t;
      }
      if (guest_side.corner < 0) guest_side.corner = kb;
    }
  };
  absorb_hanging(mesh_a, elem_a, mesh_b, eb, true);
  absorb_hanging(mesh_b, elem_b, mesh_a, ea, false);

  PairContact pc;
  if (contacts.empty()) return pc;
  pc.touching = true;

  std::vector<Contact> list;
  for (auto& [key, c] : contacts) {
    if ((c.a.corner < 0 && c.a.edge < 0) || (c.b.corner < 0 && c.b.edge < 0))
      continue;  // one-sided landing (vertex shared with a third mesh)
    list.push_back(c);
  }
  if (list.empty()) {
    pc.touching = false;
    return pc;
  }

  char who[96];
  std::snprintf(who, sizeof who, "elements (%d,%d) and (%d,%d)", mesh_a, elem_a,
                mesh_b, elem_b);
  pc.a_subs = build_side(ea.shape, list, true, &pc.a_splits, who);
  pc.b_subs = build_side(eb.shape, list, false, &pc.b_splits, who);
  return pc;
}

}  // namespace ebem

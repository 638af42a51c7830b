#include "hyperflow/triangulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace hyperflow {

namespace {

using nlohmann::json;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

// Corners of face f (slots != f) in ascending slot order.
std::array<int, 3> face_corners(int f) {
  std::array<int, 3> c{};
  int n = 0;
  for (int s = 0; s < 4; ++s)
    if (s != f) c[n++] = s;
  return c;
}

// Edge slot for the unordered corner pair, in the fixed order
// (01, 02, 03, 12, 13, 23) shared with the kernel's kTetEdges.
int edge_slot(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0) return b - 1;  // 01->0, 02->1, 03->2
  if (a == 1) return b + 1;  // 12->3, 13->4
  return 5;                  // 23->5
}

std::string face_name(int tet, int face) {
  std::ostringstream os;
  os << "(tet " << tet << ", face " << face << ")";
  return os.str();
}

}  // namespace

Triangulation Triangulation::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("malformed document: top level must be an object");
  if (!doc.contains("mode") || !doc["mode"].is_string())
    throw ParseError("malformed document: missing or non-string \"mode\"");
  const std::string mode = doc["mode"].get<std::string>();
  if (mode != "simple" && mode != "explicit")
    throw ParseError("malformed document: mode must be \"simple\" or \"explicit\"");
  if (!doc.contains("tets") || !doc["tets"].is_array() || doc["tets"].empty())
    throw ParseError("malformed document: \"tets\" must be a nonempty array");

  std::vector<std::array<std::int64_t, 4>> tets;
  for (const auto& jt : doc["tets"]) {
    if (!jt.is_array() || jt.size() != 4)
      throw ParseError("malformed document: each tet must list exactly 4 corner ids");
    std::array<std::int64_t, 4> corners{};
    for (int c = 0; c < 4; ++c) {
      if (!jt[c].is_number_integer() || jt[c].get<std::int64_t>() < 0)
        throw ParseError("malformed document: corner ids must be nonnegative integers");
      corners[c] = jt[c].get<std::int64_t>();
    }
    tets.push_back(corners);
  }

  std::vector<FaceGluing> gluings;
  const int num_tets = static_cast<int>(tets.size());
  if (mode == "explicit") {
    if (!doc.contains("gluings") || !doc["gluings"].is_array())
      throw ParseError("malformed document: explicit mode requires a \"gluings\" array");
    for (const auto& jg : doc["gluings"]) {
      auto read_side = [&](const char* key, int& tet, int& face) {
        if (!jg.contains(key) || !jg[key].is_array() || jg[key].size() != 2 ||
            !jg[key][0].is_number_integer() || !jg[key][1].is_number_integer())
          throw ParseError("malformed document: gluing sides must be [tet, face] integer pairs");
        tet = jg[key][0].get<int>();
        face = jg[key][1].get<int>();
        if (tet < 0 || tet >= num_tets || face < 0 || face > 3)
          throw ParseError("malformed document: gluing side out of range");
      };
      FaceGluing g;
      read_side("a", g.tet_a, g.face_a);
      read_side("b", g.tet_b, g.face_b);
      if (!jg.contains("map") || !jg["map"].is_array() || jg["map"].size() != 3)
        throw ParseError("malformed document: gluing \"map\" must list 3 corner indices");
      for (int k = 0; k < 3; ++k) g.map[k] = jg["map"][k].get<int>();
      std::array<int, 3> sorted = g.map;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != std::array<int, 3>{0, 1, 2})
        throw ParseError("malformed document: gluing \"map\" must be a permutation of 0,1,2");
      gluings.push_back(g);
    }
  } else {
    // Simple mode: gluings inferred by matching unordered corner triples.
    if (doc.contains("gluings"))
      throw ParseError("malformed document: \"gluings\" must be omitted in simple mode");
    for (int t = 0; t < num_tets; ++t) {
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          if (tets[t][a] == tets[t][b])
            throw ValidationError("simple mode requires the 4 corners of each tetrahedron to be distinct vertex classes (tet " + std::to_string(t) + ")");
    }
    std::map<std::array<std::int64_t, 3>, std::vector<std::pair<int, int>>> by_triple;
    for (int t = 0; t < num_tets; ++t) {
      for (int f = 0; f < 4; ++f) {
        auto fc = face_corners(f);
        std::array<std::int64_t, 3> triple{tets[t][fc[0]], tets[t][fc[1]], tets[t][fc[2]]};
        std::sort(triple.begin(), triple.end());
        by_triple[triple].push_back({t, f});
      }
    }
    for (const auto& [triple, occ] : by_triple) {
      if (occ.size() != 2) {
        std::ostringstream os;
        os << "simple mode: corner triple {" << triple[0] << "," << triple[1] << ","
           << triple[2] << "} occurs " << occ.size() << " times (need exactly 2)";
        throw ValidationError(os.str());
      }
      auto [ta, fa] = occ[0];
      auto [tb, fb] = occ[1];
      FaceGluing g;
      g.tet_a = ta;
      g.face_a = fa;
      g.tet_b = tb;
      g.face_b = fb;
      auto ca = face_corners(fa);
      auto cb = face_corners(fb);
      for (int k = 0; k < 3; ++k) {
        int pos = -1;
        for (int m = 0; m < 3; ++m)
          if (tets[tb][cb[m]] == tets[ta][ca[k]]) pos = m;
        g.map[k] = pos;  // well-defined: classes on a face are distinct
      }
      gluings.push_back(g);
    }
  }
  return build(std::move(tets), std::move(gluings));
}

Triangulation Triangulation::build(std::vector<std::array<std::int64_t, 4>> raw_tets,
                                   std::vector<FaceGluing> gluings) {
  if (raw_tets.empty()) throw ValidationError("triangulation has no tetrahedra");
  Triangulation T;
  // Dense re-indexing of (possibly sparse) vertex-class ids.
  std::vector<std::int64_t> ids;
  for (const auto& tet : raw_tets)
    for (auto id : tet) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  T.original_ids_ = ids;
  T.num_vertices_ = static_cast<int>(ids.size());
  auto dense = [&](std::int64_t id) {
    return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (int t = 0; t < static_cast<int>(raw_tets.size()); ++t) {
    TetSpec spec;
    spec.id = t;
    for (int c = 0; c < 4; ++c) spec.corners[c] = dense(raw_tets[t][c]);
    T.tets_.push_back(spec);
  }
  T.gluings_ = std::move(gluings);
  T.derive_and_validate();
  return T;
}

void Triangulation::derive_and_validate() {
  const int nt = num_tets();

  // --- every face glued exactly once, correspondences respect classes ---
  std::vector<int> glued(static_cast<std::size_t>(nt) * 4, 0);
  for (const auto& g : gluings_) {
    if (g.tet_a < 0 || g.tet_a >= nt || g.tet_b < 0 || g.tet_b >= nt ||
        g.face_a < 0 || g.face_a > 3 || g.face_b < 0 || g.face_b > 3)
      throw ValidationError("gluing references a face out of range");
    if (g.tet_a == g.tet_b && g.face_a == g.face_b)
      throw ValidationError("face " + face_name(g.tet_a, g.face_a) + " glued to itself");
    std::array<int, 3> sorted = g.map;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 3>{0, 1, 2})
      throw ValidationError("gluing map is not a permutation of the 3 face corners");
    for (int side = 0; side < 2; ++side) {
      int t = side == 0 ? g.tet_a : g.tet_b;
      int f = side == 0 ? g.face_a : g.face_b;
      int& flag = glued[static_cast<std::size_t>(t) * 4 + f];
      if (flag) throw ValidationError("face " + face_name(t, f) + " glued more than once");
      flag = 1;
    }
    auto ca = face_corners(g.face_a);
    auto cb = face_corners(g.face_b);
    for (int k = 0; k < 3; ++k) {
      if (tets_[g.tet_a].corners[ca[k]] != tets_[g.tet_b].corners[cb[g.map[k]]]) {
        throw ValidationError("vertex-class mismatch across gluing of " +
                              face_name(g.tet_a, g.face_a) + " and " +
                              face_name(g.tet_b, g.face_b));
      }
    }
  }
  for (int t = 0; t < nt; ++t)
    for (int f = 0; f < 4; ++f)
      if (!glued[static_cast<std::size_t>(t) * 4 + f])
        throw ValidationError("unglued face " + face_name(t, f));

  // --- edge classes: union-find over (tet, edge slot), closed under the
  // face-gluing correspondences; directed ends tracked alongside to detect
  // an edge identified with itself reversed ---
  UnionFind edges(nt * 6);
  UnionFind ends(nt * 12);  // ordered corner pairs: (tet, a, b), a != b
  auto end_id = [&](int t, int a, int b) {
    int k = a * 3 + (b > a ? b - 1 : b);  // 12 ordered pairs per tet
    return t * 12 + k;
  };
  // link sides: (tet, corner c, face f != c) -> id
  UnionFind sides(nt * 16);
  auto side_id = [&](int t, int c, int f) { return t * 16 + c * 4 + f; };

  for (const auto& g : gluings_) {
    auto ca = face_corners(g.face_a);
    auto cb = face_corners(g.face_b);
    std::array<int, 4> corr{-1, -1, -1, -1};
    for (int k = 0; k < 3; ++k) corr[ca[k]] = cb[g.map[k]];
    for (int x = 0; x < 3; ++x) {
      int sa = ca[x], sb = corr[sa];
      sides.unite(side_id(g.tet_a, sa, g.face_a), side_id(g.tet_b, sb, g.face_b));
      for (int y = x + 1; y < 3; ++y) {
        int ua = ca[y], ub = corr[ua];
        edges.unite(g.tet_a * 6 + edge_slot(sa, ua), g.tet_b * 6 + edge_slot(sb, ub));
        ends.unite(end_id(g.tet_a, sa, ua), end_id(g.tet_b, sb, ub));
        ends.unite(end_id(g.tet_a, ua, sa), end_id(g.tet_b, ub, sb));
      }
    }
  }

  // materialize edge classes in first-appearance order
  edge_class_of_.assign(static_cast<std::size_t>(nt) * 6, -1);
  std::map<int, int> root_to_class;
  for (int t = 0; t < nt; ++t) {
    for (int s = 0; s < 6; ++s) {
      int root = edges.find(t * 6 + s);
      auto [it, inserted] = root_to_class.try_emplace(root, static_cast<int>(edge_classes_.size()));
      if (inserted) edge_classes_.push_back(EdgeClass{});
      EdgeClass& cls = edge_classes_[it->second];
      edge_class_of_[static_cast<std::size_t>(t) * 6 + s] = it->second;
      cls.members.push_back({t, s});
    }
  }
  static constexpr int slot_pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (auto& cls : edge_classes_) {
    auto [t, s] = cls.members.front();
    int u = tets_[t].corners[slot_pairs[s][0]];
    int v = tets_[t].corners[slot_pairs[s][1]];
    cls.u = std::min(u, v);
    cls.v = std::max(u, v);
    // directed closure must split each class in two; one orbit means some
    // gluing chain maps the edge onto itself reversed
    int a = slot_pairs[s][0], b = slot_pairs[s][1];
    if (ends.find(end_id(t, a, b)) == ends.find(end_id(t, b, a)))
      throw ValidationError("edge class between vertex classes " + std::to_string(cls.u) +
                            " and " + std::to_string(cls.v) +
                            " is identified with itself reversed");
  }

  // --- incident edge ends per vertex (loops twice) ---
  ends_at_.assign(num_vertices_, {});
  for (int c = 0; c < num_edge_classes(); ++c) {
    ends_at_[edge_classes_[c].u].push_back(c);
    ends_at_[edge_classes_[c].v].push_back(c);
  }

  // --- vertex links ---
  links_.assign(num_vertices_, LinkSummary{});
  std::vector<std::vector<std::pair<int, int>>> corners_at(num_vertices_);
  for (int t = 0; t < nt; ++t)
    for (int c = 0; c < 4; ++c) corners_at[tets_[t].corners[c]].push_back({t, c});

  for (int i = 0; i < num_vertices_; ++i) {
    LinkSummary& L = links_[i];
    L.faces = static_cast<int>(corners_at[i].size());
    L.degree = L.faces;
    if (L.faces == 0)
      throw ValidationError("vertex class " + std::to_string(i) + " has no incident tetrahedra");
    // link edges: distinct side classes among sides at this vertex
    std::map<int, std::vector<std::pair<int, int>>> side_classes;  // root -> (tet, corner)
    for (auto [t, c] : corners_at[i]) {
      for (int f = 0; f < 4; ++f) {
        if (f == c) continue;
        side_classes[sides.find(side_id(t, c, f))].push_back({t, c});
      }
    }
    L.edges = static_cast<int>(side_classes.size());
    if (3 * L.faces != 2 * L.edges)
      throw ValidationError("link of vertex class " + std::to_string(i) +
                            " is not a closed surface (a link edge is not shared by exactly two link triangles)");
    L.vertices = static_cast<int>(ends_at_[i].size());
    L.euler_char = L.vertices - L.edges + L.faces;
    // connectivity of the link through shared sides
    std::map<std::pair<int, int>, int> corner_index;
    for (int k = 0; k < L.faces; ++k) corner_index[corners_at[i][k]] = k;
    UnionFind comp(L.faces);
    for (const auto& [root, members] : side_classes)
      for (std::size_t m = 1; m < members.size(); ++m)
        comp.unite(corner_index[members[0]], corner_index[members[m]]);
    int roots = 0;
    for (int k = 0; k < L.faces; ++k)
      if (comp.find(k) == k) ++roots;
    if (roots != 1)
      throw ValidationError("link of vertex class " + std::to_string(i) +
                            " is disconnected (" + std::to_string(roots) + " components)");
    if (L.euler_char % 2 != 0 || L.euler_char > 2)
      throw ValidationError("link of vertex class " + std::to_string(i) +
                            " has Euler characteristic " + std::to_string(L.euler_char) +
                            " (must be an even integer <= 2)");
  }
}

LinkSummary Triangulation::vertex_link(int vertex_class) const {
  if (vertex_class < 0 || vertex_class >= num_vertices_)
    throw DomainError("unknown vertex class " + std::to_string(vertex_class));
  return links_[vertex_class];
}

int Triangulation::degree(int vertex_class) const { return vertex_link(vertex_class).degree; }

int Triangulation::euler_char(int vertex_class) const {
  return vertex_link(vertex_class).euler_char;
}

const std::vector<int>& Triangulation::edge_ends_at(int vertex_class) const {
  if (vertex_class < 0 || vertex_class >= num_vertices_)
    throw DomainError("unknown vertex class " + std::to_string(vertex_class));
  return ends_at_[vertex_class];
}

}  // namespace hyperflow

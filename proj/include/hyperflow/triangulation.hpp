#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperflow/errors.hpp"

namespace hyperflow {

// One tetrahedron: four corner slots carrying vertex-class ids (dense,
// 0..N-1 after parsing; input files may use sparse ids).
struct TetSpec {
  int id = 0;
  std::array<int, 4> corners{};
};

// Identification of two tetrahedron faces. Face f is the face opposite
// corner slot f; its corners are the remaining slots in ascending order.
// map[k] says which ascending corner of face b the k-th ascending corner of
// face a is matched with.
struct FaceGluing {
  int tet_a = 0, face_a = 0;
  int tet_b = 0, face_b = 0;
  std::array<int, 3> map{0, 1, 2};
};

// Equivalence class of tetrahedron edges under the gluing closure.
struct EdgeClass {
  int u = 0, v = 0;  // endpoint vertex classes, u <= v
  std::vector<std::pair<int, int>> members;  // (tet, edge slot 0..5)
};

struct LinkSummary {
  int faces = 0;       // link triangles = tetrahedron corners in the class
  int edges = 0;       // link edge classes
  int vertices = 0;    // edge-class ends at the vertex (a loop counts twice)
  int euler_char = 0;  // V - E + F
  int degree = 0;      // same count as faces
};

// A validated ideal triangulation with all derived indices. Immutable after
// construction; all queries are const and thread-safe.
class Triangulation {
 public:
  // Parses the JSON document format (simple or explicit mode), validates,
  // and derives all indices. Throws ParseError / ValidationError.
  static Triangulation parse(std::string_view text);

  // Builds from already-structured gluing data (corner ids may be sparse;
  // they are re-indexed densely). Runs the same validation as parse().
  static Triangulation build(std::vector<std::array<std::int64_t, 4>> tets,
                             std::vector<FaceGluing> gluings);

  int num_vertices() const { return num_vertices_; }
  int num_tets() const { return static_cast<int>(tets_.size()); }
  int num_edge_classes() const { return static_cast<int>(edge_classes_.size()); }

  const std::vector<TetSpec>& tets() const { return tets_; }
  const std::vector<FaceGluing>& gluings() const { return gluings_; }
  const std::vector<EdgeClass>& edge_classes() const { return edge_classes_; }

  // Dense class id -> id used in the input document.
  const std::vector<std::int64_t>& original_vertex_ids() const {
    return original_ids_;
  }

  // Edge class containing edge slot 0..5 of a tetrahedron.
  int edge_class_of(int tet, int slot) const {
    return edge_class_of_[static_cast<std::size_t>(tet) * 6 + slot];
  }

  LinkSummary vertex_link(int vertex_class) const;
  int degree(int vertex_class) const;
  int euler_char(int vertex_class) const;

  // Edge-class ids incident to a vertex class, loops listed twice.
  const std::vector<int>& edge_ends_at(int vertex_class) const;

 private:
  Triangulation() = default;
  void derive_and_validate();

  std::vector<TetSpec> tets_;
  std::vector<FaceGluing> gluings_;
  std::vector<std::int64_t> original_ids_;
  int num_vertices_ = 0;

  std::vector<EdgeClass> edge_classes_;
  std::vector<int> edge_class_of_;           // (tet*6 + slot) -> class id
  std::vector<LinkSummary> links_;           // per vertex class
  std::vector<std::vector<int>> ends_at_;    // per vertex class
};

}  // namespace hyperflow

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/point.hpp"

namespace orlicz {

/// Area-bearing planar set built from balls, rectangles and half-planes with
/// union, intersection and complement. Membership is decided by a signed
/// distance bound: negative inside, zero on the boundary, positive outside.
/// For the primitives the value is the exact signed distance; min/max
/// combinations keep the zero set exact.
class Shape {
 public:
  static Shape ball(Point center, double radius);
  static Shape rect(Box box);
  // {x : normal · x < offset}
  static Shape half_plane(Point normal, double offset);

  static Shape unite(std::vector<Shape> parts);
  static Shape intersect(std::vector<Shape> parts);
  Shape complement() const;

  double sdf(Point p) const;
  // Bounding box when the set is bounded by its primitives; nullopt otherwise.
  std::optional<Box> bounds() const;
  std::string spec() const;

 private:
  struct Node;
  explicit Shape(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Slit {
  Point a;
  Point b;
};

/// Bounded open set Ω = area ∖ (slits ∪ punctures), with a bounding box that
/// contains its closure and an optional marked boundary point x₀.
class Domain {
 public:
  Domain(Shape area, std::optional<Box> bounding_box = std::nullopt);

  Domain& remove_slit(Point a, Point b);
  Domain& remove_point(Point p);
  Domain& mark(Point x0);

  const Shape& area() const { return area_; }
  const Box& bounding_box() const { return box_; }
  const std::vector<Slit>& slits() const { return slits_; }
  const std::vector<Point>& punctures() const { return punctures_; }
  const std::optional<Point>& marked_point() const { return marked_; }

  // Exact-geometry membership of the open set Ω.
  bool contains(Point p) const;
  double area_sdf(Point p) const { return area_.sdf(p); }
  // Upper bound on diam(Ω): the diagonal of the bounding box.
  double diameter_bound() const { return box_.diagonal(); }
  std::string spec() const;

 private:
  Shape area_;
  Box box_;
  std::vector<Slit> slits_;
  std::vector<Point> punctures_;
  std::optional<Point> marked_;
};

enum class NodeClass : std::uint8_t { interior, dirichlet_boundary, excluded, slit, puncture };

const char* to_string(NodeClass c);

// Two triangles per grid cell, split along the lower-left to upper-right
// diagonal. Vertices are listed counter-clockwise.
struct Triangle {
  std::array<int, 3> v;
  bool upper;
};

using Field = std::vector<double>;
using NodeSet = std::vector<int>;

/// Uniform structured triangulation of a bounding box. Nodes are stored
/// row-major (index = j·nx + i); every grid node is present, with excluded
/// nodes carrying no triangle.
class Mesh {
 public:
  Mesh(Point origin, double h, int nx, int ny, std::vector<NodeClass> classes);

  int node_count() const { return nx_ * ny_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  Point origin() const { return origin_; }
  int index(int i, int j) const { return j * nx_ + i; }
  Point node(int n) const { return {origin_.x + (n % nx_) * h_, origin_.y + (n / nx_) * h_}; }

  NodeClass node_class(int n) const { return classes_[static_cast<std::size_t>(n)]; }
  const std::vector<NodeClass>& node_classes() const { return classes_; }
  bool is_active(int n) const { return node_class(n) != NodeClass::excluded; }
  bool is_constrained(int n) const {
    const auto c = node_class(n);
    return c != NodeClass::interior && c != NodeClass::excluded;
  }

  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::span<const int> triangles_of(int n) const {
    return {tri_index_.data() + tri_offset_[static_cast<std::size_t>(n)],
            tri_index_.data() + tri_offset_[static_cast<std::size_t>(n) + 1]};
  }
  Point centroid(int t) const { return centroids_[static_cast<std::size_t>(t)]; }
  double triangle_area() const { return 0.5 * h_ * h_; }
  // Gradients of the three hat functions on a triangle, in vertex order.
  std::array<Point, 3> hat_gradients(const Triangle& tri) const;
  Point gradient(const Triangle& tri, std::span<const double> u) const;

  // Grid node closest to p (clamped to the grid).
  int nearest_node(Point p) const;
  // Node located at p up to 1e-6·h, or −1 if p is off the grid.
  int locate(Point p) const;
  // Nodes joined to n by a triangle edge.
  std::vector<int> neighbors(int n) const;
  std::vector<int> nodes_of_class(NodeClass c) const;

  friend bool operator==(const Mesh& a, const Mesh& b);

 private:
  Point origin_;
  double h_;
  int nx_;
  int ny_;
  std::vector<NodeClass> classes_;
  std::vector<Triangle> triangles_;
  std::vector<Point> centroids_;
  std::vector<int> tri_offset_;
  std::vector<int> tri_index_;
};

inline constexpr long long kMaxMeshNodes = 10'000'000;

/// Grid of step h over the domain's bounding box, anchored at its lower-left
/// corner. Throws RefinementError if h is too coarse for a slit or puncture or
/// the domain leaves no interior node.
Mesh build_mesh(const Domain& domain, double h);

/// Node tags for a grid over the domain: within h/2 of the area boundary →
/// dirichlet_boundary; outside → excluded; nodes within h/2 of a slit → slit;
/// the node nearest a puncture → puncture. Excluded nodes sharing a triangle
/// edge with an interior node are promoted to dirichlet_boundary.
std::vector<NodeClass> classify_nodes(const Mesh& mesh, const Domain& domain);

/// Square grid of step h centered on `center` (a grid node) covering the ball
/// B(center, radius); nodes outside the ball are excluded.
Mesh build_ball_mesh(Point center, double radius, double h);

/// Nodes of B̄(x₀,t) ∩ Ωᶜ: outside or on the area boundary, outside the
/// bounding box, within h/2 of a slit, or nearest to a puncture.
NodeSet complement_nodes(const Mesh& mesh, const Domain& domain, Point x0, double t);

struct ComplementSample {
  Mesh mesh;      // grid on B(x₀, 2t)
  NodeSet nodes;  // closed-ball node set B̄(x₀,t) ∩ Ωᶜ
  int center;     // node at x₀
};

// complement_nodes(·, t) on a mesh of B(x₀,2t) with step h.
ComplementSample ball_complement_intersection(const Domain& domain, Point x0, double t, double h);

// CSV dumps: "index,x,y,class" and "index,v0,v1,v2".
std::string mesh_nodes_csv(const Mesh& mesh);
std::string mesh_triangles_csv(const Mesh& mesh);

}  // namespace orlicz

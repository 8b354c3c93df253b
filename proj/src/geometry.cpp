#include "orlicz/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/format.hpp"

namespace orlicz {

// --- Shape ------------------------------------------------------------------

struct Shape::Node {
  enum class Kind { ball, rect, half_plane, unite, intersect, complement };
  Kind kind;
  Point p{};
  double r = 0.0;
  Box box{};
  std::vector<Shape> children;
};

Shape Shape::ball(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("ball radius must be positive");
  return Shape(std::make_shared<const Node>(Node{Node::Kind::ball, center, radius, {}, {}}));
}

Shape Shape::rect(Box box) {
  if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw GeometryError("rectangle must have positive extent");
  return Shape(std::make_shared<const Node>(Node{Node::Kind::rect, {}, 0.0, box, {}}));
}

Shape Shape::half_plane(Point normal, double offset) {
  const double len = norm(normal);
  if (!(len > 0.0)) throw GeometryError("half-plane normal must be nonzero");
  return Shape(std::make_shared<const Node>(Node{Node::Kind::half_plane, normal, offset, {}, {}}));
}

Shape Shape::unite(std::vector<Shape> parts) {
  if (parts.empty()) throw GeometryError("union of no shapes");
  if (parts.size() == 1) return parts.front();
  return Shape(std::make_shared<const Node>(Node{Node::Kind::unite, {}, 0.0, {}, std::move(parts)}));
}

Shape Shape::intersect(std::vector<Shape> parts) {
  if (parts.empty()) throw GeometryError("intersection of no shapes");
  if (parts.size() == 1) return parts.front();
  return Shape(std::make_shared<const Node>(Node{Node::Kind::intersect, {}, 0.0, {}, std::move(parts)}));
}

Shape Shape::complement() const {
  return Shape(std::make_shared<const Node>(Node{Node::Kind::complement, {}, 0.0, {}, {*this}}));
}

double Shape::sdf(Point q) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::ball:
      return distance(q, n.p) - n.r;
    case Node::Kind::rect: {
      const double cx = 0.5 * (n.box.x0 + n.box.x1);
      const double cy = 0.5 * (n.box.y0 + n.box.y1);
      const double dx = std::abs(q.x - cx) - 0.5 * n.box.width();
      const double dy = std::abs(q.y - cy) - 0.5 * n.box.height();
      return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0)) + std::min(std::max(dx, dy), 0.0);
    }
    case Node::Kind::half_plane:
      return (dot(n.p, q) - n.r) / norm(n.p);
    case Node::Kind::unite: {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) v = std::min(v, c.sdf(q));
      return v;
    }
    case Node::Kind::intersect: {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& c : n.children) v = std::max(v, c.sdf(q));
      return v;
    }
    case Node::Kind::complement:
      return -n.children.front().sdf(q);
  }
  return 0.0;
}

std::optional<Box> Shape::bounds() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Node::Kind::ball:
      return Box{n.p.x - n.r, n.p.y - n.r, n.p.x + n.r, n.p.y + n.r};
    case Node::Kind::rect:
      return n.box;
    case Node::Kind::half_plane:
    case Node::Kind::complement:
      return std::nullopt;
    case Node::Kind::unite: {
      std::optional<Box> acc;
      for (const auto& c : n.children) {
        auto b = c.bounds();
        if (!b) return std::nullopt;
        acc = acc ? Box{std::min(acc->x0, b->x0), std::min(acc->y0, b->y0), std::max(acc->x1, b->x1),
                        std::max(acc->y1, b->y1)}
                  : *b;
      }
      return acc;
    }
    case Node::Kind::intersect: {
      std::optional<Box> acc;
      for (const auto& c : n.children) {
        auto b = c.bounds();
        if (!b) continue;
        acc = acc ? Box{std::max(acc->x0, b->x0), std::max(acc->y0, b->y0), std::min(acc->x1, b->x1),
                        std::min(acc->y1, b->y1)}
                  : *b;
      }
      return acc;
    }
  }
  return std::nullopt;
}

std::string Shape::spec() const {
  const Node& n = *node_;
  auto list = [&](const char* name) {
    std::string s = std::string(name) + "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) s += (i ? ", " : "") + n.children[i].spec();
    return s + ")";
  };
  switch (n.kind) {
    case Node::Kind::ball:
      return "ball(" + format_number(n.p.x) + ", " + format_number(n.p.y) + ", " + format_number(n.r) + ")";
    case Node::Kind::rect:
      return "rect(" + format_number(n.box.x0) + ", " + format_number(n.box.y0) + ", " + format_number(n.box.x1) +
             ", " + format_number(n.box.y1) + ")";
    case Node::Kind::half_plane:
      return "halfplane(" + format_number(n.p.x) + ", " + format_number(n.p.y) + ", " + format_number(n.r) + ")";
    case Node::Kind::unite:
      return list("union");
    case Node::Kind::intersect:
      return list("intersect");
    case Node::Kind::complement:
      return "complement(" + n.children.front().spec() + ")";
  }
  return {};
}

// --- Domain -----------------------------------------------------------------

Domain::Domain(Shape area, std::optional<Box> bounding_box) : area_(std::move(area)) {
  if (bounding_box) {
    box_ = *bounding_box;
  } else if (auto b = area_.bounds()) {
    box_ = *b;
  } else {
    throw GeometryError("unbounded domain needs an explicit bounding box");
  }
  if (!(box_.x1 > box_.x0) || !(box_.y1 > box_.y0)) throw GeometryError("bounding box must have positive extent");
}

Domain& Domain::remove_slit(Point a, Point b) {
  if (a == b) throw GeometryError("slit endpoints coincide");
  slits_.push_back({a, b});
  return *this;
}

Domain& Domain::remove_point(Point p) {
  punctures_.push_back(p);
  return *this;
}

Domain& Domain::mark(Point x0) {
  marked_ = x0;
  return *this;
}

bool Domain::contains(Point p) const {
  if (!(area_.sdf(p) < 0.0)) return false;
  for (const auto& s : slits_)
    if (segment_distance(p, s.a, s.b) == 0.0) return false;
  for (const auto& q : punctures_)
    if (q == p) return false;
  return true;
}

std::string Domain::spec() const {
  if (slits_.empty() && punctures_.empty()) return area_.spec();
  std::string s = "minus(" + area_.spec();
  for (const auto& sl : slits_)
    s += ", slit(" + format_number(sl.a.x) + ", " + format_number(sl.a.y) + ", " + format_number(sl.b.x) + ", " +
         format_number(sl.b.y) + ")";
  for (const auto& p : punctures_) s += ", puncture(" + format_number(p.x) + ", " + format_number(p.y) + ")";
  return s + ")";
}

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::interior:
      return "interior";
    case NodeClass::dirichlet_boundary:
      return "dirichlet_boundary";
    case NodeClass::excluded:
      return "excluded";
    case NodeClass::slit:
      return "slit";
    case NodeClass::puncture:
      return "puncture";
  }
  return "?";
}

// --- Mesh -------------------------------------------------------------------

Mesh::Mesh(Point origin, double h, int nx, int ny, std::vector<NodeClass> classes)
    : origin_(origin), h_(h), nx_(nx), ny_(ny), classes_(std::move(classes)) {
  if (nx_ < 2 || ny_ < 2 || !(h_ > 0.0)) throw RefinementError("mesh needs at least one grid cell");
  if (static_cast<long long>(classes_.size()) != static_cast<long long>(nx_) * ny_)
    throw ShapeError("node class array does not match the grid");

  for (int j = 0; j + 1 < ny_; ++j) {
    for (int i = 0; i + 1 < nx_; ++i) {
      const int a = index(i, j);
      const int b = index(i + 1, j);
      const int c = index(i + 1, j + 1);
      const int d = index(i, j + 1);
      if (is_active(a) && is_active(b) && is_active(c)) triangles_.push_back({{a, b, c}, false});
      if (is_active(a) && is_active(c) && is_active(d)) triangles_.push_back({{a, c, d}, true});
    }
  }

  centroids_.reserve(triangles_.size());
  std::vector<int> counts(static_cast<std::size_t>(node_count()) + 1, 0);
  for (const auto& t : triangles_) {
    const Point p0 = node(t.v[0]);
    const Point p1 = node(t.v[1]);
    const Point p2 = node(t.v[2]);
    centroids_.push_back({(p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0});
    for (int v : t.v) ++counts[static_cast<std::size_t>(v) + 1];
  }
  tri_offset_.assign(counts.size(), 0);
  for (std::size_t k = 1; k < counts.size(); ++k) tri_offset_[k] = tri_offset_[k - 1] + counts[k];
  tri_index_.assign(static_cast<std::size_t>(tri_offset_.back()), 0);
  std::vector<int> fill(tri_offset_.begin(), tri_offset_.end() - 1);
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t)
    for (int v : triangles_[static_cast<std::size_t>(t)].v) tri_index_[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = t;
}

std::array<Point, 3> Mesh::hat_gradients(const Triangle& tri) const {
  const double s = 1.0 / h_;
  if (tri.upper) return {{{0.0, -s}, {s, 0.0}, {-s, s}}};
  return {{{-s, 0.0}, {s, -s}, {0.0, s}}};
}

Point Mesh::gradient(const Triangle& tri, std::span<const double> u) const {
  const double s = 1.0 / h_;
  const double u0 = u[static_cast<std::size_t>(tri.v[0])];
  const double u1 = u[static_cast<std::size_t>(tri.v[1])];
  const double u2 = u[static_cast<std::size_t>(tri.v[2])];
  if (tri.upper) return {s * (u1 - u2), s * (u2 - u0)};
  return {s * (u1 - u0), s * (u2 - u1)};
}

int Mesh::nearest_node(Point p) const {
  const int i = std::clamp(static_cast<int>(std::lround((p.x - origin_.x) / h_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::lround((p.y - origin_.y) / h_)), 0, ny_ - 1);
  return index(i, j);
}

int Mesh::locate(Point p) const {
  const double fi = (p.x - origin_.x) / h_;
  const double fj = (p.y - origin_.y) / h_;
  const double i = std::round(fi);
  const double j = std::round(fj);
  if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6) return -1;
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return index(static_cast<int>(i), static_cast<int>(j));
}

std::vector<int> Mesh::neighbors(int n) const {
  static constexpr int kOffsets[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
  const int i = n % nx_;
  const int j = n / nx_;
  std::vector<int> out;
  for (const auto& o : kOffsets) {
    const int a = i + o[0];
    const int b = j + o[1];
    if (a >= 0 && a < nx_ && b >= 0 && b < ny_) out.push_back(index(a, b));
  }
  return out;
}

std::vector<int> Mesh::nodes_of_class(NodeClass c) const {
  std::vector<int> out;
  for (int n = 0; n < node_count(); ++n)
    if (node_class(n) == c) out.push_back(n);
  return out;
}

bool operator==(const Mesh& a, const Mesh& b) {
  return a.origin_ == b.origin_ && a.h_ == b.h_ && a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.classes_ == b.classes_ &&
         a.triangles_.size() == b.triangles_.size() &&
         std::equal(a.triangles_.begin(), a.triangles_.end(), b.triangles_.begin(),
                    [](const Triangle& x, const Triangle& y) { return x.v == y.v && x.upper == y.upper; });
}

// --- construction -----------------------------------------------------------

namespace {

struct Grid {
  Point origin;
  int nx;
  int ny;
};

Grid grid_for(const Box& box, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw RefinementError("mesh step must be positive");
  const double wx = box.width() / h;
  const double wy = box.height() / h;
  if ((wx + 1.0) * (wy + 1.0) > static_cast<double>(kMaxMeshNodes))
    throw RefinementError("mesh would exceed " + std::to_string(kMaxMeshNodes) + " nodes");
  const int nx = static_cast<int>(std::floor(wx + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor(wy + 1e-9)) + 1;
  if (nx < 2 || ny < 2) throw RefinementError("mesh step larger than the bounding box");
  return {{box.x0, box.y0}, nx, ny};
}

std::vector<NodeClass> classify_grid(const Grid& grid, double h, const Domain& domain) {
  const int count = grid.nx * grid.ny;
  std::vector<NodeClass> cls(static_cast<std::size_t>(count));
  auto at = [&](int n) { return Point{grid.origin.x + (n % grid.nx) * h, grid.origin.y + (n / grid.nx) * h}; };
  const double band = 0.5 * h * (1.0 + 1e-12);
  for (int n = 0; n < count; ++n) {
    const double s = domain.area_sdf(at(n));
    cls[static_cast<std::size_t>(n)] =
        s > band ? NodeClass::excluded : (s >= -band ? NodeClass::dirichlet_boundary : NodeClass::interior);
  }

  // Keep interior nodes surrounded by active nodes along every triangle edge.
  static constexpr int kOffsets[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
  std::vector<int> promote;
  for (int n = 0; n < count; ++n) {
    if (cls[static_cast<std::size_t>(n)] != NodeClass::interior) continue;
    const int i = n % grid.nx;
    const int j = n / grid.nx;
    for (const auto& o : kOffsets) {
      const int a = i + o[0];
      const int b = j + o[1];
      if (a < 0 || a >= grid.nx || b < 0 || b >= grid.ny) continue;
      const int m = b * grid.nx + a;
      if (cls[static_cast<std::size_t>(m)] == NodeClass::excluded) promote.push_back(m);
    }
  }
  for (int m : promote) cls[static_cast<std::size_t>(m)] = NodeClass::dirichlet_boundary;

  for (const auto& s : domain.slits()) {
    for (int n = 0; n < count; ++n) {
      if (cls[static_cast<std::size_t>(n)] == NodeClass::excluded) continue;
      if (segment_distance(at(n), s.a, s.b) <= band) cls[static_cast<std::size_t>(n)] = NodeClass::slit;
    }
  }
  for (const auto& p : domain.punctures()) {
    const int i = std::clamp(static_cast<int>(std::lround((p.x - grid.origin.x) / h)), 0, grid.nx - 1);
    const int j = std::clamp(static_cast<int>(std::lround((p.y - grid.origin.y) / h)), 0, grid.ny - 1);
    const int n = j * grid.nx + i;
    if (cls[static_cast<std::size_t>(n)] == NodeClass::excluded)
      throw GeometryError("puncture lies outside the domain");
    cls[static_cast<std::size_t>(n)] = NodeClass::puncture;
  }
  return cls;
}

void check_marked_point(const Mesh& mesh, const Domain& domain) {
  if (!domain.marked_point()) return;
  const Point x0 = *domain.marked_point();
  const int n = mesh.nearest_node(x0);
  const double tol = mesh.h() * (std::sqrt(0.5) + 1e-9);
  if (distance(mesh.node(n), x0) > tol || !mesh.is_constrained(n))
    throw GeometryError("marked point is not within reach of a boundary node");
}

}  // namespace

std::vector<NodeClass> classify_nodes(const Mesh& mesh, const Domain& domain) {
  auto cls = classify_grid({mesh.origin(), mesh.nx(), mesh.ny()}, mesh.h(), domain);
  check_marked_point(Mesh(mesh.origin(), mesh.h(), mesh.nx(), mesh.ny(), cls), domain);
  return cls;
}

Mesh build_mesh(const Domain& domain, double h) {
  const Grid grid = grid_for(domain.bounding_box(), h);
  for (const auto& s : domain.slits())
    if (distance(s.a, s.b) < 4.0 * h) throw RefinementError("mesh step too coarse for a slit");
  for (const auto& p : domain.punctures())
    if (domain.area_sdf(p) > -2.0 * h) throw RefinementError("puncture too close to the boundary for this step");

  Mesh mesh(grid.origin, h, grid.nx, grid.ny, classify_grid(grid, h, domain));
  bool any_interior = false;
  for (int n = 0; n < mesh.node_count() && !any_interior; ++n) any_interior = mesh.node_class(n) == NodeClass::interior;
  if (!any_interior) throw RefinementError("domain contains no interior node at this mesh step");
  check_marked_point(mesh, domain);
  return mesh;
}

Mesh build_ball_mesh(Point center, double radius, double h) {
  if (!(radius > 0.0) || !(h > 0.0)) throw GeometryError("ball mesh needs positive radius and step");
  const int m = static_cast<int>(std::ceil(radius / h - 1e-9)) + 1;
  const Box box{center.x - m * h, center.y - m * h, center.x + m * h, center.y + m * h};
  return build_mesh(Domain(Shape::ball(center, radius), box), h);
}

NodeSet complement_nodes(const Mesh& mesh, const Domain& domain, Point x0, double t) {
  std::vector<char> in(static_cast<std::size_t>(mesh.node_count()), 0);
  const double reach = t * (1.0 + 1e-12);
  const double band = 0.5 * mesh.h() * (1.0 + 1e-12);
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n)) continue;
    const Point p = mesh.node(n);
    if (distance(p, x0) > reach) continue;
    bool outside = domain.area_sdf(p) >= -1e-9 * mesh.h() || !domain.bounding_box().contains(p, 0.0);
    for (const auto& s : domain.slits()) outside = outside || segment_distance(p, s.a, s.b) <= band;
    if (outside) in[static_cast<std::size_t>(n)] = 1;
  }
  for (const auto& p : domain.punctures()) {
    if (distance(p, x0) > reach) continue;
    const int n = mesh.nearest_node(p);
    if (mesh.is_active(n)) in[static_cast<std::size_t>(n)] = 1;
  }
  NodeSet out;
  for (int n = 0; n < mesh.node_count(); ++n)
    if (in[static_cast<std::size_t>(n)]) out.push_back(n);
  return out;
}

ComplementSample ball_complement_intersection(const Domain& domain, Point x0, double t, double h) {
  if (!(t > 0.0)) throw DomainError("scale t must be positive");
  ComplementSample out{build_ball_mesh(x0, 2.0 * t, h), {}, 0};
  out.center = out.mesh.nearest_node(x0);
  out.nodes = complement_nodes(out.mesh, domain, x0, t);
  return out;
}

std::string mesh_nodes_csv(const Mesh& mesh) {
  std::ostringstream os;
  os << "index,x,y,class\n";
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Point p = mesh.node(n);
    os << n << ',' << format_17g(p.x) << ',' << format_17g(p.y) << ',' << to_string(mesh.node_class(n)) << '\n';
  }
  return os.str();
}

std::string mesh_triangles_csv(const Mesh& mesh) {
  std::ostringstream os;
  os << "index,v0,v1,v2\n";
  const auto& tris = mesh.triangles();
  for (std::size_t t = 0; t < tris.size(); ++t)
    os << t << ',' << tris[t].v[0] << ',' << tris[t].v[1] << ',' << tris[t].v[2] << '\n';
  return os.str();
}

}  // namespace orlicz

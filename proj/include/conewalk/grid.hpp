#pragma once

#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

/// Thrown when a caller violates an operation's parameter contract.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// A point written as anchor + offset with its exact boundary distance; keeps
/// full relative precision for points extremely close to the boundary.
struct SamplePoint {
  Point anchor;
  Point offset;
  double dist = 0.0;
  Point position() const { return {anchor.x + offset.x, anchor.y + offset.y}; }
};

enum class DomainKind { Interval, UnitSquare };

/// The physical domain. Intervals are [x0, x1]; the square is always [0,1]^2.
struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  double x0 = 0.0;
  double x1 = 1.0;

  static DomainSpec interval(double x0, double x1);
  static DomainSpec unit_square();

  int dimension() const { return kind == DomainKind::Interval ? 1 : 2; }
  double measure() const;
  double diameter() const;
  /// Closed-form dist(x, boundary): minimum over the faces.
  double boundary_distance(Point pt) const;
  std::string name() const;
};

/// A P1 simplex. Intervals use the first two slots of `nodes` and `grad`.
struct Element {
  std::array<int, 3> nodes{};
  double volume = 0.0;
  /// Constant gradients of the local hat functions.
  std::array<std::array<double, 2>, 3> grad{};
};

/// Interior-interior coupling structure shared by every assembled operator.
struct SparsityPattern {
  Eigen::SparseMatrix<double> skeleton;  // compressed, values zeroed
  /// slot[e][a*3+b] is the index into the value array for local pair (a,b),
  /// or -1 if either node is on the boundary.
  std::vector<std::array<int, 9>> slot;
};

/// Immutable structured mesh. Shared between threads via shared_ptr<const Mesh>.
class Mesh {
 public:
  /// `cells` is the number of cells per direction.
  static std::shared_ptr<const Mesh> create(const DomainSpec& domain, int cells);

  const DomainSpec& domain() const { return domain_; }
  int dimension() const { return domain_.dimension(); }
  int cells_per_direction() const { return cells_; }
  int nodes_per_element() const { return dimension() + 1; }
  double h() const { return h_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  std::size_t num_dofs() const { return interior_.size(); }

  std::span<const Point> nodes() const { return nodes_; }
  std::span<const Element> elements() const { return elements_; }
  const Element& element(std::size_t e) const { return elements_[e]; }

  bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  std::span<const int> interior_nodes() const { return interior_; }
  int dof_of_node(std::size_t node) const { return dof_of_node_[node]; }

  /// Lumped (vertex-rule) mass: the integral of each hat function.
  std::span<const double> lumped_mass() const { return lumped_mass_; }
  std::span<const double> boundary_distance() const { return distance_; }

  /// Node-to-element adjacency in CSR form: for node i the entries
  /// [adj_offset[i], adj_offset[i+1]) of adj_element / adj_local.
  std::span<const int> adjacency_offsets() const { return adj_offset_; }
  std::span<const int> adjacency_elements() const { return adj_element_; }
  std::span<const int> adjacency_locals() const { return adj_local_; }

  const SparsityPattern& pattern() const { return pattern_; }

  /// Element containing `pt` and the barycentric coordinates of `pt` in it.
  std::pair<std::size_t, std::array<double, 3>> locate(Point pt) const;

 private:
  Mesh() = default;
  void build_interval();
  void build_square();
  void finalize();

  DomainSpec domain_;
  int cells_ = 0;
  double h_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<char> boundary_;
  std::vector<int> interior_;
  std::vector<int> dof_of_node_;
  std::vector<double> lumped_mass_;
  std::vector<double> distance_;
  std::vector<int> adj_offset_;
  std::vector<int> adj_element_;
  std::vector<int> adj_local_;
  SparsityPattern pattern_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Nodal representation of a P1 function. Value type; the mesh is shared.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(MeshPtr mesh, double value = 0.0);
  FeFunction(MeshPtr mesh, std::vector<double> values);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  bool empty() const { return mesh_ == nullptr; }

  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// True when every boundary node carries |value| <= tol.
  bool dirichlet_zero(double tol = 0.0) const;
  /// Sets boundary nodes to zero.
  FeFunction& clear_boundary();

  /// Evaluates the P1 interpolant at an arbitrary point of the domain.
  double operator()(Point pt) const;
  /// Same, evaluated relative to the nearest element vertex.
  double operator()(const SamplePoint& sp) const;

  double max() const;
  double min() const;
  double sup_norm() const;

  FeFunction& operator+=(const FeFunction& other);
  FeFunction& operator-=(const FeFunction& other);
  FeFunction& operator*=(double s);

  friend FeFunction operator+(FeFunction a, const FeFunction& b) { return a += b; }
  friend FeFunction operator-(FeFunction a, const FeFunction& b) { return a -= b; }
  friend FeFunction operator*(FeFunction a, double s) { return a *= s; }
  friend FeFunction operator*(double s, FeFunction a) { return a *= s; }
  friend FeFunction operator-(FeFunction a) { return a *= -1.0; }

 private:
  void check_same_mesh(const FeFunction& other) const;

  MeshPtr mesh_;
  std::vector<double> values_;
};

/// Per-element sample points (barycentric) and weights relative to the
/// element volume.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  static QuadratureRule gauss_interval();   // 3 points, degree 5
  static QuadratureRule triangle_degree4(); // 6 points, degree 4
  static const QuadratureRule& for_dimension(int dim);
};

/// Gradient of u on element e (second component is zero in 1D).
std::array<double, 2> element_gradient(const Mesh& mesh, std::size_t e,
                                       std::span<const double> u);

/// (integral |grad u|^p)^(1/p), exact for P1.
double w1p_norm(const FeFunction& u, double p);
/// (integral |u|^s)^(1/s) via the element quadrature rule.
double ls_norm(const FeFunction& u, double s);
/// L^s norm with the vertex (lumped) rule used for zero-order terms.
double lumped_ls_norm(const FeFunction& u, double s);

FeFunction interpolate(const std::function<double(Point)>& g, const MeshPtr& mesh);

/// Smooth random function vanishing on the boundary: a sine series with
/// N(0,1) coefficients damped by the mode index.
FeFunction random_field(const MeshPtr& mesh, std::mt19937_64& rng, int modes = 6);

/// CSV export: one row per node, `x,value` or `x,y,value`.
void write_csv(std::ostream& os, const FeFunction& u);
void write_csv(const std::string& path, const FeFunction& u);

}  // namespace conewalk

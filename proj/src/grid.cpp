#include "conewalk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace conewalk {

DomainSpec DomainSpec::interval(double x0, double x1) {
  if (!(x0 < x1)) {
    throw ParameterError("interval domain requires x0 < x1");
  }
  return DomainSpec{DomainKind::Interval, x0, x1};
}

DomainSpec DomainSpec::unit_square() { return DomainSpec{DomainKind::UnitSquare, 0.0, 1.0}; }

double DomainSpec::measure() const { return kind == DomainKind::Interval ? x1 - x0 : 1.0; }

double DomainSpec::diameter() const {
  return kind == DomainKind::Interval ? x1 - x0 : std::sqrt(2.0);
}

double DomainSpec::boundary_distance(Point pt) const {
  if (kind == DomainKind::Interval) {
    return std::max(0.0, std::min(pt.x - x0, x1 - pt.x));
  }
  const double d = std::min({pt.x, 1.0 - pt.x, pt.y, 1.0 - pt.y});
  return std::max(0.0, d);
}

std::string DomainSpec::name() const {
  return kind == DomainKind::Interval ? "interval" : "unit-square";
}

std::shared_ptr<const Mesh> Mesh::create(const DomainSpec& domain, int cells) {
  if (cells < 2) {
    throw ParameterError("mesh needs at least 2 cells per direction");
  }
  std::shared_ptr<Mesh> mesh(new Mesh());
  mesh->domain_ = domain;
  mesh->cells_ = cells;
  if (domain.kind == DomainKind::Interval) {
    mesh->build_interval();
  } else {
    mesh->build_square();
  }
  mesh->finalize();
  return mesh;
}

void Mesh::build_interval() {
  const int n = cells_;
  h_ = (domain_.x1 - domain_.x0) / n;
  nodes_.resize(n + 1);
  boundary_.assign(n + 1, 0);
  for (int i = 0; i <= n; ++i) {
    nodes_[i] = Point{domain_.x0 + i * h_, 0.0};
  }
  nodes_[n].x = domain_.x1;
  boundary_[0] = 1;
  boundary_[n] = 1;
  elements_.resize(n);
  for (int e = 0; e < n; ++e) {
    Element& el = elements_[e];
    el.nodes = {e, e + 1, -1};
    el.volume = nodes_[e + 1].x - nodes_[e].x;
    el.grad[0] = {-1.0 / el.volume, 0.0};
    el.grad[1] = {1.0 / el.volume, 0.0};
    el.grad[2] = {0.0, 0.0};
  }
}

void Mesh::build_square() {
  const int n = cells_;
  h_ = 1.0 / n;
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  nodes_.resize(static_cast<std::size_t>(n + 1) * (n + 1));
  boundary_.assign(nodes_.size(), 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      nodes_[id(i, j)] = Point{i * h_, j * h_};
      if (i == 0 || j == 0 || i == n || j == n) {
        boundary_[id(i, j)] = 1;
      }
    }
  }
  // Each cell is split along the (i,j)-(i+1,j+1) diagonal.
  elements_.reserve(static_cast<std::size_t>(2) * n * n);
  const auto make = [this](int a, int b, int c) {
    Element el;
    el.nodes = {a, b, c};
    const Point pa = nodes_[a], pb = nodes_[b], pc = nodes_[c];
    const double det = (pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y);
    el.volume = 0.5 * std::abs(det);
    // grad of barycentric coordinates
    el.grad[0] = {(pb.y - pc.y) / det, (pc.x - pb.x) / det};
    el.grad[1] = {(pc.y - pa.y) / det, (pa.x - pc.x) / det};
    el.grad[2] = {(pa.y - pb.y) / det, (pb.x - pa.x) / det};
    elements_.push_back(el);
  };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      make(id(i, j), id(i + 1, j), id(i + 1, j + 1));
      make(id(i, j), id(i + 1, j + 1), id(i, j + 1));
    }
  }
}

void Mesh::finalize() {
  const std::size_t nn = nodes_.size();
  const int k = nodes_per_element();

  dof_of_node_.assign(nn, -1);
  interior_.clear();
  for (std::size_t i = 0; i < nn; ++i) {
    if (!boundary_[i]) {
      dof_of_node_[i] = static_cast<int>(interior_.size());
      interior_.push_back(static_cast<int>(i));
    }
  }

  lumped_mass_.assign(nn, 0.0);
  for (const Element& el : elements_) {
    for (int a = 0; a < k; ++a) {
      lumped_mass_[el.nodes[a]] += el.volume / k;
    }
  }

  distance_.resize(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    distance_[i] = boundary_[i] ? 0.0 : domain_.boundary_distance(nodes_[i]);
  }

  std::vector<int> count(nn + 1, 0);
  for (const Element& el : elements_) {
    for (int a = 0; a < k; ++a) {
      ++count[el.nodes[a] + 1];
    }
  }
  adj_offset_.assign(nn + 1, 0);
  for (std::size_t i = 0; i < nn; ++i) {
    adj_offset_[i + 1] = adj_offset_[i] + count[i + 1];
  }
  adj_element_.assign(adj_offset_[nn], 0);
  adj_local_.assign(adj_offset_[nn], 0);
  std::vector<int> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int a = 0; a < k; ++a) {
      const int node = elements_[e].nodes[a];
      adj_element_[cursor[node]] = static_cast<int>(e);
      adj_local_[cursor[node]] = a;
      ++cursor[node];
    }
  }

  const auto ndof = static_cast<Eigen::Index>(interior_.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(elements_.size() * k * k);
  for (const Element& el : elements_) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const int ra = dof_of_node_[el.nodes[a]];
        const int rb = dof_of_node_[el.nodes[b]];
        if (ra >= 0 && rb >= 0) {
          triplets.emplace_back(ra, rb, 0.0);
        }
      }
    }
  }
  pattern_.skeleton.resize(ndof, ndof);
  pattern_.skeleton.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.skeleton.makeCompressed();
  std::fill_n(pattern_.skeleton.valuePtr(), pattern_.skeleton.nonZeros(), 0.0);

  const auto* outer = pattern_.skeleton.outerIndexPtr();
  const auto* inner = pattern_.skeleton.innerIndexPtr();
  pattern_.slot.assign(elements_.size(), {});
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    auto& slot = pattern_.slot[e];
    slot.fill(-1);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const int row = dof_of_node_[elements_[e].nodes[a]];
        const int col = dof_of_node_[elements_[e].nodes[b]];
        if (row < 0 || col < 0) {
          continue;
        }
        const auto* first = inner + outer[col];
        const auto* last = inner + outer[col + 1];
        const auto* it = std::lower_bound(first, last, row);
        slot[a * 3 + b] = static_cast<int>(it - inner);
      }
    }
  }
}

std::pair<std::size_t, std::array<double, 3>> Mesh::locate(Point pt) const {
  const int n = cells_;
  if (dimension() == 1) {
    const double s = (pt.x - domain_.x0) / h_;
    const int e = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
    const double t = std::clamp(s - e, 0.0, 1.0);
    return {static_cast<std::size_t>(e), {1.0 - t, t, 0.0}};
  }
  const double sx = pt.x / h_;
  const double sy = pt.y / h_;
  const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, n - 1);
  const int j = std::clamp(static_cast<int>(std::floor(sy)), 0, n - 1);
  const double tx = std::clamp(sx - i, 0.0, 1.0);
  const double ty = std::clamp(sy - j, 0.0, 1.0);
  const std::size_t cell = static_cast<std::size_t>(j) * n + i;
  if (ty <= tx) {
    // lower triangle (00, 10, 11)
    return {2 * cell, {1.0 - tx, tx - ty, ty}};
  }
  // upper triangle (00, 11, 01)
  return {2 * cell + 1, {1.0 - ty, tx, ty - tx}};
}

FeFunction::FeFunction(MeshPtr mesh, double value)
    : mesh_(std::move(mesh)), values_(mesh_->num_nodes(), value) {}

FeFunction::FeFunction(MeshPtr mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (values_.size() != mesh_->num_nodes()) {
    throw ParameterError("FeFunction value count does not match the mesh");
  }
}

bool FeFunction::dirichlet_zero(double tol) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mesh_->is_boundary(i) && std::abs(values_[i]) > tol) {
      return false;
    }
  }
  return true;
}

FeFunction& FeFunction::clear_boundary() {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mesh_->is_boundary(i)) {
      values_[i] = 0.0;
    }
  }
  return *this;
}

double FeFunction::operator()(Point pt) const {
  const auto [e, bary] = mesh_->locate(pt);
  const Element& el = mesh_->element(e);
  double v = 0.0;
  for (int a = 0; a < mesh_->nodes_per_element(); ++a) {
    v += bary[a] * values_[el.nodes[a]];
  }
  return v;
}

double FeFunction::operator()(const SamplePoint& sp) const {
  const auto [e, bary] = mesh_->locate(sp.position());
  const Element& el = mesh_->element(e);
  int best = 0;
  for (int a = 1; a < mesh_->nodes_per_element(); ++a) {
    if (bary[a] > bary[best]) {
      best = a;
    }
  }
  const Point v = mesh_->nodes()[el.nodes[best]];
  const auto g = element_gradient(*mesh_, e, values_);
  const double dx = (sp.anchor.x - v.x) + sp.offset.x;
  const double dy = (sp.anchor.y - v.y) + sp.offset.y;
  return values_[el.nodes[best]] + g[0] * dx + g[1] * dy;
}

double FeFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double FeFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double FeFunction::sup_norm() const { return std::max(std::abs(max()), std::abs(min())); }

void FeFunction::check_same_mesh(const FeFunction& other) const {
  if (mesh_ != other.mesh_) {
    throw ParameterError("FeFunction arithmetic across different meshes");
  }
}

FeFunction& FeFunction::operator+=(const FeFunction& other) {
  check_same_mesh(other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
  }
  return *this;
}

FeFunction& FeFunction::operator-=(const FeFunction& other) {
  check_same_mesh(other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
  }
  return *this;
}

FeFunction& FeFunction::operator*=(double s) {
  for (double& v : values_) {
    v *= s;
  }
  return *this;
}

QuadratureRule QuadratureRule::gauss_interval() {
  const double d = 0.5 * std::sqrt(3.0 / 5.0);
  QuadratureRule q;
  q.degree = 5;
  for (double t : {0.5 - d, 0.5, 0.5 + d}) {
    q.points.push_back({1.0 - t, t, 0.0});
  }
  q.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  return q;
}

QuadratureRule QuadratureRule::triangle_degree4() {
  QuadratureRule q;
  q.degree = 4;
  const double a1 = 0.108103018168070, b1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.816847572980459, b2 = 0.091576213509771, w2 = 0.109951743655322;
  q.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1}, {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
  q.weights = {w1, w1, w1, w2, w2, w2};
  return q;
}

const QuadratureRule& QuadratureRule::for_dimension(int dim) {
  static const QuadratureRule line = gauss_interval();
  static const QuadratureRule tri = triangle_degree4();
  return dim == 1 ? line : tri;
}

std::array<double, 2> element_gradient(const Mesh& mesh, std::size_t e, std::span<const double> u) {
  const Element& el = mesh.element(e);
  std::array<double, 2> g{0.0, 0.0};
  for (int a = 0; a < mesh.nodes_per_element(); ++a) {
    const double ua = u[el.nodes[a]];
    g[0] += ua * el.grad[a][0];
    g[1] += ua * el.grad[a][1];
  }
  return g;
}

double w1p_norm(const FeFunction& u, double p) {
  if (!(p > 1.0)) {
    throw ParameterError("w1p_norm requires p > 1");
  }
  const Mesh& mesh = u.mesh();
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto g = element_gradient(mesh, e, u.values());
    const double mag = std::hypot(g[0], g[1]);
    sum += mesh.element(e).volume * std::pow(mag, p);
  }
  return std::pow(sum, 1.0 / p);
}

double ls_norm(const FeFunction& u, double s) {
  if (!(s >= 1.0)) {
    throw ParameterError("ls_norm requires s >= 1");
  }
  const Mesh& mesh = u.mesh();
  const QuadratureRule& rule = QuadratureRule::for_dimension(mesh.dimension());
  const int k = mesh.nodes_per_element();
  double sum = 0.0;
  for (const Element& el : mesh.elements()) {
    double local = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      double v = 0.0;
      for (int a = 0; a < k; ++a) {
        v += rule.points[q][a] * u[el.nodes[a]];
      }
      local += rule.weights[q] * std::pow(std::abs(v), s);
    }
    sum += el.volume * local;
  }
  return std::pow(sum, 1.0 / s);
}

double lumped_ls_norm(const FeFunction& u, double s) {
  if (!(s >= 1.0)) {
    throw ParameterError("lumped_ls_norm requires s >= 1");
  }
  const auto mass = u.mesh().lumped_mass();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    sum += mass[i] * std::pow(std::abs(u[i]), s);
  }
  return std::pow(sum, 1.0 / s);
}

FeFunction interpolate(const std::function<double(Point)>& g, const MeshPtr& mesh) {
  FeFunction u(mesh);
  const auto nodes = mesh->nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    u[i] = g(nodes[i]);
  }
  return u;
}

FeFunction random_field(const MeshPtr& mesh, std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const DomainSpec& dom = mesh->domain();
  const double pi = std::acos(-1.0);
  if (mesh->dimension() == 1) {
    std::vector<double> c(modes);
    for (int k = 0; k < modes; ++k) {
      c[k] = normal(rng) / (k + 1);
    }
    const double len = dom.x1 - dom.x0;
    return interpolate(
        [&](Point pt) {
          double v = 0.0;
          for (int k = 0; k < modes; ++k) {
            v += c[k] * std::sin((k + 1) * pi * (pt.x - dom.x0) / len);
          }
          return v;
        },
        mesh);
  }
  std::vector<double> c(static_cast<std::size_t>(modes) * modes);
  for (int j = 0; j < modes; ++j) {
    for (int k = 0; k < modes; ++k) {
      c[j * modes + k] = normal(rng) / (j + k + 1);
    }
  }
  return interpolate(
      [&](Point pt) {
        double v = 0.0;
        for (int j = 0; j < modes; ++j) {
          for (int k = 0; k < modes; ++k) {
            v += c[j * modes + k] * std::sin((j + 1) * pi * pt.x) * std::sin((k + 1) * pi * pt.y);
          }
        }
        return v;
      },
      mesh);
}

void write_csv(std::ostream& os, const FeFunction& u) {
  const Mesh& mesh = u.mesh();
  os << (mesh.dimension() == 1 ? "x,value\n" : "x,y,value\n");
  os << std::setprecision(15);
  const auto nodes = mesh.nodes();
  for (std::size_t i = 0; i < u.size(); ++i) {
    os << nodes[i].x << ',';
    if (mesh.dimension() == 2) {
      os << nodes[i].y << ',';
    }
    os << u[i] << '\n';
  }
}

void write_csv(const std::string& path, const FeFunction& u) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_csv(out, u);
}

}  // namespace conewalk

#include "sing/mesh.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sing {

namespace {

void build_geometry(Mesh& mesh) {
  const auto& x = mesh.nodes;
  const int n = mesh.n_cells();
  auto& g = mesh.geom;
  g.edge_len.resize(n);
  g.edge_weight.assign(n, 1.0);
  g.dual_measure.assign(n + 1, 0.0);

  for (int e = 0; e < n; ++e) {
    g.edge_len[e] = x[e + 1] - x[e];
    if (g.edge_len[e] <= 0.0) throw std::runtime_error("degenerate mesh spacing");
  }

  if (mesh.domain.kind == DomainKind::interval) {
    g.first_interior = 1;
    g.last_interior = n - 1;
    g.mirrored_origin = false;
    for (int i = 1; i < n; ++i) g.dual_measure[i] = 0.5 * (x[i + 1] - x[i - 1]);
  } else {
    const int N = mesh.domain.space_dim;
    g.first_interior = 0;
    g.last_interior = n - 1;
    g.mirrored_origin = true;
    for (int e = 0; e < n; ++e) {
      const double mid = 0.5 * (x[e] + x[e + 1]);
      g.edge_weight[e] = std::pow(mid, N - 1);
    }
    auto cell_vol = [N](double a, double b) {
      return (std::pow(b, N) - std::pow(a, N)) / N;
    };
    // center: mirrored half cell, flux through rho=0 vanishes by symmetry
    g.dual_measure[0] = 2.0 * cell_vol(0.0, 0.5 * (x[0] + x[1]));
    for (int i = 1; i < n; ++i)
      g.dual_measure[i] = cell_vol(0.5 * (x[i - 1] + x[i]), 0.5 * (x[i] + x[i + 1]));
  }
}

}  // namespace

double Mesh::boundary_spacing() const {
  if (domain.kind == DomainKind::interval)
    return std::min(geom.edge_len.front(), geom.edge_len.back());
  return geom.edge_len.back();
}

MeshPtr build_graded_mesh(const DomainSpec& domain, int n, double grading) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("node count must be even and >= 4");
  if (grading < 1.0) throw std::invalid_argument("grading must be >= 1");

  auto mesh = std::make_shared<Mesh>();
  mesh->domain = domain;
  mesh->grading = grading;
  mesh->nodes.resize(n + 1);

  if (domain.kind == DomainKind::interval) {
    for (int i = 0; i <= n / 2; ++i)
      mesh->nodes[i] = 0.5 * std::pow(2.0 * i / n, grading);
    for (int i = 0; i < n / 2; ++i) mesh->nodes[n - i] = 1.0 - mesh->nodes[i];
    mesh->nodes[0] = 0.0;
    mesh->nodes[n] = 1.0;
    mesh->nodes[n / 2] = 0.5;
  } else {
    if (domain.space_dim < 1) throw std::invalid_argument("space_dim must be >= 1");
    for (int i = 0; i <= n; ++i)
      mesh->nodes[i] = 1.0 - std::pow(static_cast<double>(n - i) / n, grading);
    mesh->nodes[0] = 0.0;
    mesh->nodes[n] = 1.0;
  }

  mesh->delta.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = mesh->nodes[i];
    mesh->delta[i] =
        domain.kind == DomainKind::interval ? std::min(x, 1.0 - x) : 1.0 - x;
  }
  build_geometry(*mesh);
  return mesh;
}

MeshPtr refine(const MeshPtr& mesh) {
  auto finer = build_graded_mesh(mesh->domain, 2 * mesh->n_cells(), mesh->grading);
  const_cast<Mesh&>(*finer).level = mesh->level + 1;
  return finer;
}

GridFunction distance_function(const MeshPtr& mesh) {
  GridFunction gf(mesh);
  gf.values = mesh->delta;
  return gf;
}

GridFunction boundary_profile(const MeshPtr& mesh) {
  GridFunction gf(mesh);
  const int n = mesh->n_cells();
  for (int i = 0; i <= n; ++i) {
    const double x = mesh->nodes[i];
    gf[i] = mesh->domain.kind == DomainKind::interval
                ? std::sin(std::numbers::pi * x)
                : std::cos(0.5 * std::numbers::pi * x);
  }
  for (int i = 0; i <= n; ++i)
    if (mesh->is_dirichlet(i)) gf[i] = 0.0;
  return gf;
}

void write_csv(const GridFunction& gf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "coordinate,value\n";
  out.precision(17);
  for (int i = 0; i < gf.size(); ++i)
    out << gf.mesh->nodes[i] << ',' << gf.values[i] << '\n';
}

GridFunction read_csv(const MeshPtr& mesh, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  std::getline(in, line);  // header
  GridFunction gf(mesh);
  int i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double coord, value;
    char comma;
    if (!(ss >> coord >> comma >> value))
      throw std::runtime_error("bad CSV line: " + line);
    if (i >= gf.size()) throw std::runtime_error("CSV has more rows than mesh nodes");
    if (std::fabs(coord - mesh->nodes[i]) > 1e-12)
      throw std::runtime_error("CSV coordinate does not match mesh node");
    gf[i++] = value;
  }
  if (i != gf.size()) throw std::runtime_error("CSV has fewer rows than mesh nodes");
  return gf;
}

}  // namespace sing

// Graded meshes on the unit interval and the radial unit ball, plus the
// boundary-distance function and the analytic boundary profile used to seed
// barriers. Meshes and grid functions are immutable after construction and
// can be shared across threads.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sing/kernels.hpp"

namespace sing {

enum class DomainKind { interval, radial_ball };

struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  int space_dim = 1;  // N, used only by radial_ball

  double diameter() const { return kind == DomainKind::interval ? 1.0 : 2.0; }
};

struct Mesh {
  DomainSpec domain;
  double grading = 1.0;
  int level = 0;
  std::vector<double> nodes;   // strictly increasing, nodes.front()=0, back()=1
  std::vector<double> delta;   // dist to the Dirichlet boundary, per node
  kernels::Geometry geom;

  int n_cells() const { return static_cast<int>(nodes.size()) - 1; }
  bool is_dirichlet(int i) const {
    if (domain.kind == DomainKind::interval) return i == 0 || i == n_cells();
    return i == n_cells();
  }
  // smallest spacing adjacent to a Dirichlet node (fit-window anchor)
  double boundary_spacing() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

// Interval: x_i = (2i/n)^gamma / 2 up to the midpoint, mirrored.
// Ball: rho_i = 1 - ((n-i)/n)^gamma, so spacing shrinks toward rho=1.
// Throws std::invalid_argument on odd n, n < 4 or gamma < 1.
MeshPtr build_graded_mesh(const DomainSpec& domain, int n, double grading);

// Same domain and grading, n doubled, level incremented.
MeshPtr refine(const MeshPtr& mesh);

struct GridFunction {
  MeshPtr mesh;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(MeshPtr m, double fill = 0.0)
      : mesh(std::move(m)), values(mesh->nodes.size(), fill) {}

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

// delta(x) as a grid function: min(x, 1-x) on the interval, 1-rho on the ball.
GridFunction distance_function(const MeshPtr& mesh);

// Smooth positive profile with unit max, two-sided comparable to delta:
// sin(pi x) on the interval, cos(pi rho / 2) on the ball.
GridFunction boundary_profile(const MeshPtr& mesh);

// CSV with a "coordinate,value" header, full precision.
void write_csv(const GridFunction& gf, const std::string& path);
// Reads values for `mesh`, validating coordinates against the nodes.
GridFunction read_csv(const MeshPtr& mesh, const std::string& path);

}  // namespace sing

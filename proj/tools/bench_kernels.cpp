// Times the serial reference kernels against the OpenMP ones on large meshes
// and prints a speedup table.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "sing/kernels.hpp"
#include "sing/mesh.hpp"

using namespace sing;
namespace k = kernels;
using clk = std::chrono::steady_clock;

namespace {

double seconds_per_call(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = clk::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = clk::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  std::printf("OpenMP compiled in: %s\n", k::openmp_compiled() ? "yes" : "no");
  std::printf("%-22s %10s %12s %12s %8s\n", "kernel", "n", "serial[s]", "parallel[s]",
              "speedup");

  std::mt19937_64 rng(12345);
  for (int n : {1 << 14, 1 << 17, 1 << 20}) {
    auto mesh = build_graded_mesh(DomainSpec{}, n, 2.0);
    std::vector<double> u(mesh->nodes.size()), out(mesh->nodes.size(), 0.0);
    std::uniform_real_distribution<double> dist(0.1, 1.0);
    for (size_t i = 0; i < u.size(); ++i) u[i] = dist(rng) * mesh->delta[i];
    std::vector<double> weight(u.size(), 1.0), lo(u.size()), di(u.size()),
        up(u.size()), resid(u.size()), scratch;

    const int reps = std::max(2, (1 << 22) / n);
    const double m = 3.0;

    struct Row {
      const char* name;
      double ser, par;
    };
    std::vector<Row> rows;

    rows.push_back({"minus_mlap",
                    seconds_per_call(reps,
                                     [&] {
                                       k::minus_mlap(mesh->geom, u.data(), m, 1e-4,
                                                     out.data(), scratch,
                                                     k::Exec::serial);
                                     }),
                    seconds_per_call(reps, [&] {
                      k::minus_mlap(mesh->geom, u.data(), m, 1e-4, out.data(),
                                    scratch, k::Exec::parallel);
                    })});
    rows.push_back({"newton_rows",
                    seconds_per_call(reps,
                                     [&] {
                                       k::newton_rows_serial(
                                           mesh->geom, u.data(), m, 1e-4,
                                           weight.data(), 0.5, resid.data(),
                                           lo.data(), di.data(), up.data(), scratch);
                                     }),
                    seconds_per_call(reps, [&] {
                      k::newton_rows(mesh->geom, u.data(), m, 1e-4, weight.data(),
                                     0.5, resid.data(), lo.data(), di.data(),
                                     up.data(), scratch, k::Exec::parallel);
                    })});
    rows.push_back({"edge_pow_sum",
                    seconds_per_call(reps,
                                     [&] {
                                       volatile double v = k::edge_pow_sum_serial(
                                           mesh->geom, u.data(), 3.5);
                                       (void)v;
                                     }),
                    seconds_per_call(reps, [&] {
                      volatile double v = k::edge_pow_sum(mesh->geom, u.data(), 3.5,
                                                          k::Exec::parallel);
                      (void)v;
                    })});

    for (const auto& row : rows)
      std::printf("%-22s %10d %12.3e %12.3e %8.2f\n", row.name, n, row.ser, row.par,
                  row.ser / row.par);
  }
  return 0;
}

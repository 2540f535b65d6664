#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hm/kernels.hpp"
#include "hm/linalg.hpp"

namespace hm {

struct GridParams {
  int d = 1;
  int n = 3;
  double Lx = 1.0;
  double Lt = 1.0;
  int Nx = 32;
  int Nt = 32;  // per t axis, even
};

// Cells of [-Lx,Lx] x [-Lt,Lt]^{n-d}; boundary cells are the x-lattice on t = 0.
struct WeightedGrid {
  GridParams p;
  double hx = 0.0;
  double ht = 0.0;
  int cells = 0;
  int boundary_cells = 0;

  int index(int i, int j, int k = 0) const { return p.n == 3 ? (k * p.Nt + j) * p.Nx + i : j * p.Nx + i; }
  // (i, j, k) of a cell.
  void unpack(int c, int& i, int& j, int& k) const;
  Vec x_of(int c) const;
  Vec t_of(int c) const;
  double boundary_x(int i) const { return -p.Lx + (i + 0.5) * hx; }
  // Cell whose center is nearest to (x, t).
  int locate(double x, const Vec& t) const;
  double cell_volume() const;
  // Largest mismatch of the cell set under t -> -t (0 when symmetric).
  double reflection_error() const;
};

WeightedGrid build_grid(const GridParams& p);

using CoefficientField = std::function<Mat(const Vec& x, const Vec& t)>;

struct AssemblyOptions {
  bool cross_terms = true;
};

struct DiscreteOperator {
  WeightedGrid grid;
  Csr A;  // interior system
  Csr B;  // Dirichlet coupling (interior x boundary), A u = B g
  bool symmetric = true;
  bool diagonal_coefficients = true;
  double min_eigenvalue = 0.0;  // symmetric part of the sampled coefficients
  double max_eigenvalue = 0.0;
  double min_transmissibility = 0.0;

  // max_r |sum_j A_rj - sum_i B_ri|
  double conservation_error() const;
};

DiscreteOperator assemble(const WeightedGrid& grid, const CoefficientField& coeff, const AssemblyOptions& opt = {});

struct SolverOptions {
  double tolerance = 1e-12;  // relative residual
  int max_iterations = 20000;
};

struct GridSolution {
  std::vector<double> values;
  double residual = 0.0;
  int iterations = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::string method;
};

// Krylov solve of A x = b (CG when symmetric, BiCGSTAB otherwise) with Jacobi preconditioning.
GridSolution krylov_solve(const Csr& A, bool symmetric, const std::vector<double>& b, const SolverOptions& opt);

GridSolution solve_dirichlet(const DiscreteOperator& op, const std::vector<double>& data,
                             const SolverOptions& opt = {});

struct MeasureVector {
  std::vector<double> weights;
  double total = 0.0;
  double clipped = 0.0;  // most negative raw weight (0 if none)
  int iterations = 0;
  int pole = -1;
};

// Discrete harmonic measure of the pole cell via one adjoint solve.
MeasureVector harmonic_measure(const DiscreteOperator& op, int pole, const SolverOptions& opt = {});

// omega(E) for boundary cells with centers in [a, b].
double measure_of_interval(const WeightedGrid& g, const MeasureVector& w, double a, double b);

}  // namespace hm

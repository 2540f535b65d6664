#include "hm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hm/error.hpp"

namespace hm {

void WeightedGrid::unpack(int c, int& i, int& j, int& k) const {
  i = c % p.Nx;
  int rest = c / p.Nx;
  if (p.n == 3) {
    j = rest % p.Nt;
    k = rest / p.Nt;
  } else {
    j = rest;
    k = 0;
  }
}

Vec WeightedGrid::x_of(int c) const {
  int i, j, k;
  unpack(c, i, j, k);
  Vec x(1);
  x << -p.Lx + (i + 0.5) * hx;
  return x;
}

Vec WeightedGrid::t_of(int c) const {
  int i, j, k;
  unpack(c, i, j, k);
  Vec t(p.n - p.d);
  t(0) = -p.Lt + (j + 0.5) * ht;
  if (p.n == 3) t(1) = -p.Lt + (k + 0.5) * ht;
  return t;
}

int WeightedGrid::locate(double x, const Vec& t) const {
  auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  int i = clampi(static_cast<int>(std::floor((x + p.Lx) / hx)), p.Nx);
  int j = clampi(static_cast<int>(std::floor((t(0) + p.Lt) / ht)), p.Nt);
  int k = p.n == 3 ? clampi(static_cast<int>(std::floor((t(1) + p.Lt) / ht)), p.Nt) : 0;
  return index(i, j, k);
}

double WeightedGrid::cell_volume() const { return p.n == 3 ? hx * ht * ht : hx * ht; }

double WeightedGrid::reflection_error() const {
  double worst = 0.0;
  for (int c = 0; c < cells; ++c) {
    int i, j, k;
    unpack(c, i, j, k);
    int m = index(i, p.Nt - 1 - j, p.n == 3 ? p.Nt - 1 - k : 0);
    worst = std::max(worst, (t_of(c) + t_of(m)).norm());
  }
  return worst;
}

WeightedGrid build_grid(const GridParams& p) {
  if (p.d != 1 || (p.n != 2 && p.n != 3)) throw ConfigError("build_grid: supported dims are (1,2) and (1,3)");
  if (p.Nt % 2 != 0) throw ConfigError("build_grid: t cell counts must be even");
  if (p.Nx < 2 || p.Nt < 2 || !(p.Lx > 0.0) || !(p.Lt > 0.0)) throw ConfigError("build_grid: bad grid size");
  WeightedGrid g;
  g.p = p;
  g.hx = 2.0 * p.Lx / p.Nx;
  g.ht = 2.0 * p.Lt / p.Nt;
  g.cells = p.n == 3 ? p.Nx * p.Nt * p.Nt : p.Nx * p.Nt;
  g.boundary_cells = p.Nx;
  return g;
}

namespace {

// \int_0^x \int_0^y dt / |t| for the signed rectangle corner (x, y).
double corner_integral(double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  double ax = std::abs(x), ay = std::abs(y);
  double v = ax * std::asinh(ay / ax) + ay * std::asinh(ax / ay);
  return (x > 0) == (y > 0) ? v : -v;
}

// Mean of |t|^{-1} over [a0,a1] x [b0,b1].
double mean_inverse_radius_rect(double a0, double a1, double b0, double b1) {
  double I = corner_integral(a1, b1) - corner_integral(a0, b1) - corner_integral(a1, b0) + corner_integral(a0, b0);
  return I / ((a1 - a0) * (b1 - b0));
}

// Mean of |t|^{-1} over the segment t1 = c, t2 in [b0, b1]; centroid value when it touches the axis.
double mean_inverse_radius_segment(double c, double b0, double b1) {
  if (std::abs(c) < 1e-14) {
    if (b0 >= 0.0 || b1 <= 0.0) return 1.0 / std::abs(0.5 * (b0 + b1));
    throw std::logic_error("segment straddles the axis");
  }
  double ac = std::abs(c);
  return (std::asinh(b1 / ac) - std::asinh(b0 / ac)) / (b1 - b0);
}

struct Stencil {
  int cell[2];
  double coef[2];
  int size = 0;
};

}  // namespace

double DiscreteOperator::conservation_error() const {
  double worst = 0.0;
  for (int r = 0; r < A.rows; ++r) {
    double s = 0.0, scale = 0.0;
    for (long k = A.ptr[r]; k < A.ptr[r + 1]; ++k) s += A.val[k], scale = std::max(scale, std::abs(A.val[k]));
    for (long k = B.ptr[r]; k < B.ptr[r + 1]; ++k) s -= B.val[k];
    worst = std::max(worst, std::abs(s) / std::max(scale, 1e-300));
  }
  return worst;
}

DiscreteOperator assemble(const WeightedGrid& g, const CoefficientField& coeff, const AssemblyOptions& opt) {
  const int n = g.p.n, Nx = g.p.Nx, Nt = g.p.Nt, half = Nt / 2;
  const int C = g.cells;
  std::vector<Mat> A(C);
#pragma omp parallel for schedule(dynamic, 64)
  for (int c = 0; c < C; ++c) A[c] = coeff(g.x_of(c), g.t_of(c));

  DiscreteOperator op;
  op.grid = g;
  op.min_eigenvalue = 1e300;
  op.max_eigenvalue = -1e300;
  for (int c = 0; c < C; ++c) {
    Mat S = 0.5 * (A[c] + A[c].transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n - 1);
    if (!(lo > 0.0)) {
      Vec x = g.x_of(c), t = g.t_of(c);
      throw NumericalError("assemble", "coefficient not elliptic at x=" + std::to_string(x(0)) +
                                           " t=(" + std::to_string(t(0)) + (n == 3 ? "," + std::to_string(t(1)) : "") +
                                           ")", lo);
    }
    op.min_eigenvalue = std::min(op.min_eigenvalue, lo);
    op.max_eigenvalue = std::max(op.max_eigenvalue, hi);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b && A[c](a, b) != 0.0) op.diagonal_coefficients = false;
  }

  auto coord = [&](int c, int& i, int& j, int& k) { g.unpack(c, i, j, k); };
  // Neighbor in axis a (0 = x, 1 = t1, 2 = t2) or -1.
  auto neighbor = [&](int c, int a, int dir) {
    int i, j, k;
    coord(c, i, j, k);
    int v[3] = {i, j, k};
    v[a] += dir;
    int lim = a == 0 ? Nx : Nt;
    if (v[a] < 0 || v[a] >= lim) return -1;
    if (n == 2 && a == 1 && ((j == half - 1 && dir == 1) || (j == half && dir == -1))) return -1;
    return g.index(v[0], v[1], v[2]);
  };
  const double h[3] = {g.hx, g.ht, g.ht};
  // Central (or one-sided) difference for d_b u at a cell.
  auto gradient = [&](int c, int b) {
    Stencil s;
    int lo = neighbor(c, b, -1), hi = neighbor(c, b, 1);
    if (lo >= 0 && hi >= 0) {
      s.cell[0] = hi, s.coef[0] = 0.5 / h[b];
      s.cell[1] = lo, s.coef[1] = -0.5 / h[b];
      s.size = 2;
    } else if (hi >= 0) {
      s.cell[0] = hi, s.coef[0] = 1.0 / h[b];
      s.cell[1] = c, s.coef[1] = -1.0 / h[b];
      s.size = 2;
    } else if (lo >= 0) {
      s.cell[0] = c, s.coef[0] = 1.0 / h[b];
      s.cell[1] = lo, s.coef[1] = -1.0 / h[b];
      s.size = 2;
    }
    return s;
  };

  const bool cross = opt.cross_terms && !op.diagonal_coefficients;
  std::vector<std::vector<Triplet>> rows_a(C), rows_b(C);
  double min_T = 1e300;
#pragma omp parallel for schedule(static) reduction(min : min_T)
  for (int c = 0; c < C; ++c) {
    int i, j, k;
    coord(c, i, j, k);
    const double lo_t[3] = {0.0, -g.p.Lt + j * g.ht, -g.p.Lt + k * g.ht};
    auto& ra = rows_a[c];
    // Faces toward +a are owned by c; both rows receive the flux.
    for (int a = 0; a < n; ++a) {
      for (int dir : {-1, 1}) {
        int q = neighbor(c, a, dir);
        if (q < 0) continue;
        double area, w = 1.0;
        if (n == 2) {
          area = a == 0 ? g.ht : g.hx;
        } else if (a == 0) {
          area = g.ht * g.ht;
          w = mean_inverse_radius_rect(lo_t[1], lo_t[1] + g.ht, lo_t[2], lo_t[2] + g.ht);
        } else {
          area = g.hx * g.ht;
          double face = a == 1 ? (dir > 0 ? lo_t[1] + g.ht : lo_t[1]) : (dir > 0 ? lo_t[2] + g.ht : lo_t[2]);
          double o0 = a == 1 ? lo_t[2] : lo_t[1];
          w = mean_inverse_radius_segment(face, o0, o0 + g.ht);
        }
        double aP = A[c](a, a), aQ = A[q](a, a);
        double T = area * w * 2.0 * aP * aQ / (aP + aQ) / h[a];
        min_T = std::min(min_T, T);
        // flux out of c through this face: dir * (-w A grad u)_a * area
        ra.push_back({c, c, T});
        ra.push_back({c, q, -T});
        if (cross) {
          for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            double Aab = 0.5 * (A[c](a, b) + A[q](a, b));
            if (Aab == 0.0) continue;
            double f = -dir * area * w * Aab * 0.5;
            for (int cc : {c, q}) {
              Stencil s = gradient(cc, b);
              for (int m = 0; m < s.size; ++m) ra.push_back({c, s.cell[m], f * s.coef[m]});
            }
          }
        }
      }
    }
    // Dirichlet coupling for cells touching t = 0.
    bool adj = n == 2 ? (j == half - 1 || j == half)
                      : ((j == half - 1 || j == half) && (k == half - 1 || k == half));
    if (adj) {
      double Tb;
      if (n == 2) {
        Tb = g.hx * A[c](1, 1) / (0.5 * g.ht);
      } else {
        Vec t = g.t_of(c);
        double rc = t.norm();
        Vec e = t / rc;
        double Abar = e.dot(A[c].bottomRightCorner(2, 2) * e);
        Tb = g.hx * 0.5 * std::numbers::pi * Abar / rc;
      }
      ra.push_back({c, c, Tb});
      rows_b[c].push_back({c, i, Tb});
    }
  }
  op.min_transmissibility = min_T;
  std::vector<Triplet> ta, tb;
  for (int c = 0; c < C; ++c) {
    ta.insert(ta.end(), rows_a[c].begin(), rows_a[c].end());
    tb.insert(tb.end(), rows_b[c].begin(), rows_b[c].end());
  }
  op.A = csr_from_triplets(C, C, std::move(ta));
  op.B = csr_from_triplets(C, g.boundary_cells, std::move(tb));
  double scale = 0.0;
  for (double v : op.A.val) scale = std::max(scale, std::abs(v));
  op.symmetric = op.A.asymmetry() <= 1e-14 * scale;
  return op;
}

GridSolution krylov_solve(const Csr& A, bool symmetric, const std::vector<double>& b, const SolverOptions& opt) {
  using namespace kernels;
  const std::size_t N = b.size();
  GridSolution sol;
  sol.values.assign(N, 0.0);
  std::vector<double> dinv = A.diagonal();
  for (double& v : dinv) v = 1.0 / v;
  const double bnorm = std::sqrt(dot(b.data(), b.data(), N));
  if (bnorm == 0.0) {
    sol.method = "trivial";
    return sol;
  }
  std::vector<double> x(N, 0.0), r(b), z(N), p(N), q(N);
  auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(N); ++i) out[i] = dinv[i] * in[i];
  };
  double rel = 1.0;
  int it = 0;
  if (symmetric) {
    sol.method = "cg";
    precond(r, z);
    p = z;
    double rz = dot(r.data(), z.data(), N);
    for (; it < opt.max_iterations; ++it) {
      spmv(A, p.data(), q.data());
      double alpha = rz / dot(p.data(), q.data(), N);
      axpy(alpha, p.data(), x.data(), N);
      axpy(-alpha, q.data(), r.data(), N);
      rel = std::sqrt(dot(r.data(), r.data(), N)) / bnorm;
      if (rel <= opt.tolerance) {
        ++it;
        break;
      }
      precond(r, z);
      double rz_new = dot(r.data(), z.data(), N);
      xpby(z.data(), rz_new / rz, p.data(), N);
      rz = rz_new;
    }
  } else {
    sol.method = "bicgstab";
    std::vector<double> r0(r), v(N, 0.0), s(N), t(N), ph(N), sh(N);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    for (; it < opt.max_iterations; ++it) {
      double rho_new = dot(r0.data(), r.data(), N);
      if (rho_new == 0.0) break;
      double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
#pragma omp parallel for schedule(static)
      for (long i = 0; i < static_cast<long>(N); ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      precond(p, ph);
      spmv(A, ph.data(), v.data());
      alpha = rho / dot(r0.data(), v.data(), N);
#pragma omp parallel for schedule(static)
      for (long i = 0; i < static_cast<long>(N); ++i) s[i] = r[i] - alpha * v[i];
      double snorm = std::sqrt(dot(s.data(), s.data(), N)) / bnorm;
      if (snorm <= opt.tolerance) {
        axpy(alpha, ph.data(), x.data(), N);
        r = s;
        rel = snorm;
        ++it;
        break;
      }
      precond(s, sh);
      spmv(A, sh.data(), t.data());
      omega = dot(t.data(), s.data(), N) / dot(t.data(), t.data(), N);
#pragma omp parallel for schedule(static)
      for (long i = 0; i < static_cast<long>(N); ++i) {
        x[i] += alpha * ph[i] + omega * sh[i];
        r[i] = s[i] - omega * t[i];
      }
      rel = std::sqrt(dot(r.data(), r.data(), N)) / bnorm;
      if (rel <= opt.tolerance) {
        ++it;
        break;
      }
    }
  }
  // true residual
  spmv(A, x.data(), q.data());
  double res = 0.0;
  for (std::size_t i = 0; i < N; ++i) res += (b[i] - q[i]) * (b[i] - q[i]);
  sol.residual = std::sqrt(res) / bnorm;
  sol.iterations = it;
  sol.values = std::move(x);
  if (!(sol.residual <= std::max(opt.tolerance * 10.0, 1e-9)))
    throw NumericalError("krylov_solve", sol.method + " did not converge", sol.residual);
  return sol;
}

GridSolution solve_dirichlet(const DiscreteOperator& op, const std::vector<double>& data, const SolverOptions& opt) {
  if (static_cast<int>(data.size()) != op.grid.boundary_cells)
    throw std::invalid_argument("solve_dirichlet: data size mismatch");
  for (double v : data)
    if (!std::isfinite(v)) throw std::invalid_argument("solve_dirichlet: non-finite data");
  std::vector<double> rhs(op.A.rows);
  kernels::spmv(op.B, data.data(), rhs.data());
  GridSolution sol = krylov_solve(op.A, op.symmetric, rhs, opt);
  auto [mn, mx] = std::minmax_element(sol.values.begin(), sol.values.end());
  sol.min_value = *mn;
  sol.max_value = *mx;
  return sol;
}

MeasureVector harmonic_measure(const DiscreteOperator& op, int pole, const SolverOptions& opt) {
  if (pole < 0 || pole >= op.A.rows) throw std::invalid_argument("harmonic_measure: bad pole");
  std::vector<double> e(op.A.rows, 0.0);
  e[pole] = 1.0;
  GridSolution y = op.symmetric ? krylov_solve(op.A, true, e, opt) : krylov_solve(op.A.transpose(), false, e, opt);
  MeasureVector mv;
  mv.pole = pole;
  mv.iterations = y.iterations;
  mv.weights.assign(op.grid.boundary_cells, 0.0);
  Csr Bt = op.B.transpose();
  kernels::spmv(Bt, y.values.data(), mv.weights.data());
  for (double& w : mv.weights) {
    if (w < 0.0) {
      mv.clipped = std::min(mv.clipped, w);
      w = 0.0;
    }
  }
  for (double w : mv.weights) mv.total += w;
  return mv;
}

double measure_of_interval(const WeightedGrid& g, const MeasureVector& w, double a, double b) {
  double s = 0.0;
  for (int i = 0; i < g.boundary_cells; ++i) {
    double x = g.boundary_x(i);
    if (x >= a && x <= b) s += w.weights[i];
  }
  return s;
}

}  // namespace hm

#include "hm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace hm {

Csr csr_from_triplets(int rows, int cols, std::vector<Triplet> t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  Csr A;
  A.rows = rows;
  A.cols = cols;
  A.ptr.assign(rows + 1, 0);
  for (size_t k = 0; k < t.size();) {
    size_t l = k;
    double v = 0.0;
    while (l < t.size() && t[l].row == t[k].row && t[l].col == t[k].col) v += t[l++].value;
    A.idx.push_back(t[k].col);
    A.val.push_back(v);
    A.ptr[t[k].row + 1]++;
    k = l;
  }
  for (int r = 0; r < rows; ++r) A.ptr[r + 1] += A.ptr[r];
  return A;
}

Csr Csr::transpose() const {
  Csr T;
  T.rows = cols;
  T.cols = rows;
  T.ptr.assign(cols + 1, 0);
  for (int c : idx) T.ptr[c + 1]++;
  for (int c = 0; c < cols; ++c) T.ptr[c + 1] += T.ptr[c];
  T.idx.resize(idx.size());
  T.val.resize(val.size());
  std::vector<long> pos(T.ptr.begin(), T.ptr.end() - 1);
  for (int r = 0; r < rows; ++r)
    for (long k = ptr[r]; k < ptr[r + 1]; ++k) {
      long p = pos[idx[k]]++;
      T.idx[p] = r;
      T.val[p] = val[k];
    }
  return T;
}

std::vector<double> Csr::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (int r = 0; r < rows; ++r)
    for (long k = ptr[r]; k < ptr[r + 1]; ++k)
      if (idx[k] == r) d[r] += val[k];
  return d;
}

double Csr::asymmetry() const {
  Csr T = transpose();
  double worst = 0.0;
  for (int r = 0; r < rows; ++r) {
    long a = ptr[r], b = T.ptr[r];
    while (a < ptr[r + 1] || b < T.ptr[r + 1]) {
      int ca = a < ptr[r + 1] ? idx[a] : cols, cb = b < T.ptr[r + 1] ? T.idx[b] : cols;
      if (ca == cb) {
        worst = std::max(worst, std::abs(val[a++] - T.val[b++]));
      } else if (ca < cb) {
        worst = std::max(worst, std::abs(val[a++]));
      } else {
        worst = std::max(worst, std::abs(T.val[b++]));
      }
    }
  }
  return worst;
}

namespace kernels {

void spmv(const Csr& A, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < A.rows; ++r) {
    double s = 0.0;
    for (long k = A.ptr[r]; k < A.ptr[r + 1]; ++k) s += A.val[k] * x[A.idx[k]];
    y[r] = s;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  const long nb = static_cast<long>((n + kBlock - 1) / kBlock);
  std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (long blk = 0; blk < nb; ++blk) {
    std::size_t lo = blk * kBlock, hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    part[blk] = s;
  }
  double s = 0.0;
  for (double p : part) s += p;
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) y[i] = x[i] + beta * y[i];
}

namespace serial {

void spmv(const Csr& A, const double* x, double* y) {
  for (int r = 0; r < A.rows; ++r) {
    double s = 0.0;
    for (long k = A.ptr[r]; k < A.ptr[r + 1]; ++k) s += A.val[k] * x[A.idx[k]];
    y[r] = s;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t lo = 0; lo < n; lo += kBlock) {
    double p = 0.0;
    for (std::size_t i = lo; i < std::min(n, lo + kBlock); ++i) p += a[i] * b[i];
    s += p;
  }
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

}  // namespace serial

}  // namespace kernels

}  // namespace hm

#pragma once

#include <cstddef>
#include <vector>

namespace hm {

// Compressed sparse row matrix.
struct Csr {
  int rows = 0;
  int cols = 0;
  std::vector<long> ptr;
  std::vector<int> idx;
  std::vector<double> val;

  long nnz() const { return static_cast<long>(val.size()); }
  Csr transpose() const;
  std::vector<double> diagonal() const;
  // Largest |A_ij - A_ji| (square matrices).
  double asymmetry() const;
};

struct Triplet {
  int row;
  int col;
  double value;
};

// Sums duplicates; column indices sorted within each row.
Csr csr_from_triplets(int rows, int cols, std::vector<Triplet> t);

namespace kernels {

// Fixed reduction block; partial sums are combined in block order, so results
// do not depend on the thread count.
inline constexpr std::size_t kBlock = 4096;

void spmv(const Csr& A, const double* x, double* y);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = x + beta y
void xpby(const double* x, double beta, double* y, std::size_t n);

namespace serial {

void spmv(const Csr& A, const double* x, double* y);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);

}  // namespace serial

}  // namespace kernels

}  // namespace hm

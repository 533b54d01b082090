#include "subspect/gemm.hpp"

#include <Eigen/Dense>

namespace subspect::nn {

namespace {
template <typename T>
using RowMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapC = Eigen::Map<const RowMat<T>>;
template <typename T>
using Map = Eigen::Map<RowMat<T>>;
}  // namespace

template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a,
          const T* b, T beta, T* c) {
  Map<T> C(c, m, n);
  if (beta == T(0))
    C.setZero();
  else if (beta != T(1))
    C *= beta;
  const auto apply = [&](const auto& A, const auto& B) {
    if (alpha == T(1))
      C.noalias() += A * B;
    else
      C.noalias() += alpha * (A * B);
  };
  if (!trans_a && !trans_b)
    apply(MapC<T>(a, m, k), MapC<T>(b, k, n));
  else if (trans_a && !trans_b)
    apply(MapC<T>(a, k, m).transpose(), MapC<T>(b, k, n));
  else if (!trans_a && trans_b)
    apply(MapC<T>(a, m, k), MapC<T>(b, n, k).transpose());
  else
    apply(MapC<T>(a, k, m).transpose(), MapC<T>(b, n, k).transpose());
}

template void gemm<float>(bool, bool, int, int, int, float, const float*,
                          const float*, float, float*);
template void gemm<double>(bool, bool, int, int, int, double, const double*,
                           const double*, double, double*);

}  // namespace subspect::nn

#pragma once

namespace subspect::nn {

// Row-major C(m x n) = alpha * op(A) * op(B) + beta * C.
// op(A) is A (m x k) or A^T with A stored (k x m) when trans_a.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a,
          const T* b, T beta, T* c);

}  // namespace subspect::nn

#include <cmath>
#include <stdexcept>

#include "acots/conic.hpp"

namespace acots::detail {

void SparseLdl::analyze(int n, const std::vector<int>& col_ptr, const std::vector<int>& row_idx) {
  n_ = n;
  ap_ = col_ptr;
  ai_ = row_idx;
  etree_.assign(n, -1);
  lnz_.assign(n, 0);
  std::vector<int> work(n, 0);
  for (int j = 0; j < n; ++j) {
    work[j] = j;
    for (int p = ap_[j]; p < ap_[j + 1]; ++p) {
      int i = ai_[p];
      if (i > j) throw std::logic_error("SparseLdl: pattern is not upper triangular");
      while (work[i] != j) {
        if (etree_[i] == -1) etree_[i] = j;
        ++lnz_[i];
        work[i] = j;
        i = etree_[i];
      }
    }
  }
  lp_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) lp_[i + 1] = lp_[i] + lnz_[i];
  li_.assign(lp_[n], 0);
  lx_.assign(lp_[n], 0.0);
  d_.assign(n, 0.0);
  dinv_.assign(n, 0.0);
  iwork_.assign(3 * n, 0);
  bwork_.assign(n, 0);
  fwork_.assign(n, 0.0);
}

int SparseLdl::factor(const std::vector<double>& values, const std::vector<int>& signs, double eps,
                      double delta) {
  const int n = n_;
  int* y_idx = iwork_.data();
  int* elim = iwork_.data() + n;
  int* next_space = iwork_.data() + 2 * n;
  double* y_vals = fwork_.data();
  char* marked = bwork_.data();
  int replaced = 0;

  for (int i = 0; i < n; ++i) {
    marked[i] = 0;
    y_vals[i] = 0.0;
    d_[i] = 0.0;
    next_space[i] = lp_[i];
  }

  auto fix_pivot = [&](int k) {
    if (signs[k] * d_[k] <= eps) {
      d_[k] = signs[k] * delta;
      ++replaced;
    }
    dinv_[k] = 1.0 / d_[k];
  };

  for (int k = 0; k < n; ++k) {
    int nnz_y = 0;
    for (int p = ap_[k]; p < ap_[k + 1]; ++p) {
      int b = ai_[p];
      if (b == k) {
        d_[k] += values[p];
        continue;
      }
      y_vals[b] += values[p];
      if (marked[b]) continue;
      marked[b] = 1;
      elim[0] = b;
      int n_e = 1;
      int next = etree_[b];
      while (next != -1 && next < k) {
        if (marked[next]) break;
        marked[next] = 1;
        elim[n_e++] = next;
        next = etree_[next];
      }
      while (n_e) y_idx[nnz_y++] = elim[--n_e];
    }
    for (int i = nnz_y - 1; i >= 0; --i) {
      int c = y_idx[i];
      int tmp = next_space[c];
      double yc = y_vals[c];
      for (int j = lp_[c]; j < tmp; ++j) y_vals[li_[j]] -= lx_[j] * yc;
      li_[tmp] = k;
      lx_[tmp] = yc * dinv_[c];
      d_[k] -= yc * lx_[tmp];
      ++next_space[c];
      y_vals[c] = 0.0;
      marked[c] = 0;
    }
    fix_pivot(k);
  }
  return replaced;
}

void SparseLdl::solve(double* x) const {
  for (int i = 0; i < n_; ++i) {
    double xi = x[i];
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) x[li_[j]] -= lx_[j] * xi;
  }
  for (int i = 0; i < n_; ++i) x[i] *= dinv_[i];
  for (int i = n_ - 1; i >= 0; --i) {
    double xi = x[i];
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) xi -= lx_[j] * x[li_[j]];
    x[i] = xi;
  }
}

}  // namespace acots::detail

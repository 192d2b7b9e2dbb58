#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace acots {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Cone layout of the slack vector s: `nonneg` nonnegative coordinates first,
// then one second-order cone per entry of `soc` (dimension of each block,
// first coordinate is the norm bound).
struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;

  int total() const;
  int degree() const;
};

// min c'x  s.t.  A x = b,  G x + s = h,  s in K.
struct ConicProblem {
  Eigen::VectorXd c;
  SparseMatrix A;
  Eigen::VectorXd b;
  SparseMatrix G;
  Eigen::VectorXd h;
  ConeDims cones;
};

struct IpmSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  double feastol_inacc = 1e-5;
  double abstol_inacc = 5e-5;
  double reltol_inacc = 5e-5;
  int max_iter = 120;
  double static_reg = 1e-8;
  double dyn_reg_eps = 1e-13;
  double dyn_reg_delta = 7e-8;
  int refine_steps = 8;
  int equil_iters = 12;
  bool verbose = false;
};

enum class IpmStatus {
  kOptimal,
  kInaccurateOptimal,
  kPrimalInfeasible,
  kDualInfeasible,
  kMaxIterations,
  kNumerical,
};

const char* to_string(IpmStatus status);

struct IpmResult {
  IpmStatus status = IpmStatus::kNumerical;
  // Primal-dual solution in the original scaling. For kPrimalInfeasible, y and
  // z hold a certificate normalized so that b'y + h'z = -1 and A'y + G'z ~ 0.
  Eigen::VectorXd x, y, z, s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

IpmResult solve_conic(const ConicProblem& problem, const IpmSettings& settings = {});

namespace detail {

// Jordan-algebra helpers over a cone product; exposed for unit tests.
struct NtScaling {
  std::vector<double> lp_w;     // sqrt(s/z) per nonnegative coordinate
  std::vector<double> soc_eta;  // per SOC block
  Eigen::VectorXd soc_w;        // normalized w-bar, stacked over SOC blocks
};

bool compute_nt_scaling(const ConeDims& k, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                        NtScaling& w, Eigen::VectorXd& lambda);
Eigen::VectorXd apply_w(const ConeDims& k, const NtScaling& w, const Eigen::VectorXd& v);
Eigen::VectorXd apply_w_inv(const ConeDims& k, const NtScaling& w, const Eigen::VectorXd& v);
Eigen::VectorXd cone_product(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
Eigen::VectorXd cone_division(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
// Largest step a in [0, inf) keeping u + a du in the cone (u interior).
double max_step(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& du);

// LDL' factorization of a symmetric quasi-definite matrix stored as its
// upper triangle in compressed columns, after a fill-reducing permutation.
class SparseLdl {
 public:
  void analyze(int n, const std::vector<int>& col_ptr, const std::vector<int>& row_idx);
  // Pivots whose sign disagrees with `signs` (or whose magnitude is below
  // eps) are replaced by signs[k] * delta. Returns the number replaced.
  int factor(const std::vector<double>& values, const std::vector<int>& signs, double eps,
             double delta);
  void solve(double* x) const;
  int size() const { return n_; }
  int factor_nnz() const { return static_cast<int>(li_.size()); }

 private:
  int n_ = 0;
  std::vector<int> ap_, ai_;
  std::vector<int> etree_, lnz_, lp_;
  std::vector<int> li_;
  std::vector<double> lx_, d_, dinv_;
  std::vector<int> iwork_;
  std::vector<char> bwork_;
  std::vector<double> fwork_;
};

}  // namespace detail
}  // namespace acots

#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace srbeam::conic {

/// Sparse affine expression sum_k coeff_k * x_{var_k} + constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT: implicit constants are handy

  static LinExpr variable(int v, double coeff = 1.0) {
    LinExpr e;
    e.terms.emplace_back(v, coeff);
    return e;
  }

  LinExpr& add(int var, double coeff) {
    if (coeff != 0.0) terms.emplace_back(var, coeff);
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  double value(const Eigen::VectorXd& x) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator-(LinExpr a);

enum class Cone { zero, nonneg, soc, rsoc, psd };

/// soc rows are (t, u...) with t >= ||u||; rsoc rows are (a, b, u...) with
/// 2ab >= ||u||^2, a,b >= 0; psd rows hold svec(S) of a symmetric matrix of
/// order psd_order (off-diagonals scaled by sqrt 2).
struct ConeBlock {
  Cone kind;
  int psd_order = 0;
  std::string tag;
  std::vector<LinExpr> rows;
  int dim() const { return static_cast<int>(rows.size()); }
};

/// Solver-agnostic conic program in standard form: minimize c'x subject to
/// each block's affine image lying in its cone.
class Program {
 public:
  int add_var(std::string name = {});
  int add_vars(int n, const std::string& prefix = {});
  int var_count() const { return static_cast<int>(names_.size()); }
  const std::string& var_name(int v) const { return names_.at(v); }

  void set_objective(LinExpr e) { objective_ = std::move(e); }
  const LinExpr& objective() const { return objective_; }

  int add_block(Cone kind, std::vector<LinExpr> rows, std::string tag = {},
                int psd_order = 0);
  const std::vector<ConeBlock>& blocks() const { return blocks_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  Eigen::VectorXd block_values(int b, const Eigen::VectorXd& x) const;
  double objective_value(const Eigen::VectorXd& x) const;

  /// Worst cone-membership violation over all blocks at the point x.
  double max_violation(const Eigen::VectorXd& x) const;

  /// Plain-text standard form, one cone block per line group.
  void dump(std::ostream& os) const;

  int count_blocks(Cone kind) const;
  int count_blocks_tagged(const std::string& prefix) const;

 private:
  std::vector<std::string> names_;
  LinExpr objective_;
  std::vector<ConeBlock> blocks_;
};

/// Amount by which `values` fails membership of the cone (0 when inside).
/// rsoc values are measured after rotation onto the equivalent soc.
double cone_violation(Cone kind, const Eigen::VectorXd& values,
                      int psd_order = 0);

}  // namespace srbeam::conic

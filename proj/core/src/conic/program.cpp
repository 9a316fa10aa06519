#include "srbeam/conic/program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "srbeam/conic/hermitian.hpp"

namespace srbeam::conic {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  constant -= o.constant;
  for (const auto& [v, c] : o.terms) terms.emplace_back(v, -c);
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant *= s;
  for (auto& [v, c] : terms) c *= s;
  return *this;
}

double LinExpr::value(const Eigen::VectorXd& x) const {
  double r = constant;
  for (const auto& [v, c] : terms) r += c * x[v];
  return r;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

int Program::add_var(std::string name) {
  if (name.empty()) name = "x" + std::to_string(names_.size());
  names_.push_back(std::move(name));
  return static_cast<int>(names_.size()) - 1;
}

int Program::add_vars(int n, const std::string& prefix) {
  const int first = var_count();
  for (int k = 0; k < n; ++k)
    add_var(prefix.empty() ? std::string{} : prefix + std::to_string(k));
  return first;
}

int Program::add_block(Cone kind, std::vector<LinExpr> rows, std::string tag,
                       int psd_order) {
  if (rows.empty()) throw std::invalid_argument("conic: empty cone block");
  if (kind == Cone::psd) {
    if (psd_order < 1 || svec_dim(psd_order) != static_cast<int>(rows.size()))
      throw std::invalid_argument("conic: psd block dimension mismatch");
  } else if (psd_order != 0) {
    throw std::invalid_argument("conic: psd_order only valid for psd blocks");
  }
  if (kind == Cone::soc && rows.size() < 2)
    throw std::invalid_argument("conic: soc block needs at least 2 rows");
  if (kind == Cone::rsoc && rows.size() < 3)
    throw std::invalid_argument("conic: rsoc block needs at least 3 rows");
  for (const auto& r : rows)
    for (const auto& [v, c] : r.terms) {
      (void)c;
      if (v < 0 || v >= var_count())
        throw std::invalid_argument("conic: row references unknown variable");
    }
  blocks_.push_back({kind, psd_order, std::move(tag), std::move(rows)});
  return static_cast<int>(blocks_.size()) - 1;
}

Eigen::VectorXd Program::block_values(int b, const Eigen::VectorXd& x) const {
  const ConeBlock& blk = blocks_.at(b);
  Eigen::VectorXd v(blk.dim());
  for (int r = 0; r < blk.dim(); ++r) v[r] = blk.rows[r].value(x);
  return v;
}

double Program::objective_value(const Eigen::VectorXd& x) const {
  return objective_.value(x);
}

double Program::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0;
  for (int b = 0; b < block_count(); ++b)
    worst = std::max(worst, cone_violation(blocks_[b].kind, block_values(b, x),
                                           blocks_[b].psd_order));
  return worst;
}

int Program::count_blocks(Cone kind) const {
  return static_cast<int>(
      std::count_if(blocks_.begin(), blocks_.end(),
                    [&](const ConeBlock& b) { return b.kind == kind; }));
}

int Program::count_blocks_tagged(const std::string& prefix) const {
  return static_cast<int>(std::count_if(
      blocks_.begin(), blocks_.end(), [&](const ConeBlock& b) {
        return b.tag.compare(0, prefix.size(), prefix) == 0;
      }));
}

namespace {
const char* cone_name(Cone k) {
  switch (k) {
    case Cone::zero: return "zero";
    case Cone::nonneg: return "nonneg";
    case Cone::soc: return "soc";
    case Cone::rsoc: return "rsoc";
    case Cone::psd: return "psd";
  }
  return "?";
}
}  // namespace

void Program::dump(std::ostream& os) const {
  os << "min";
  for (const auto& [v, c] : objective_.terms)
    os << (c < 0 ? " - " : " + ") << std::abs(c) << "*" << names_[v];
  if (objective_.constant != 0) os << " + " << objective_.constant;
  os << "\n";
  for (const auto& blk : blocks_) {
    os << cone_name(blk.kind);
    if (blk.kind == Cone::psd) os << "(" << blk.psd_order << ")";
    if (!blk.tag.empty()) os << " [" << blk.tag << "]";
    os << ":\n";
    for (const auto& row : blk.rows) {
      os << " ";
      if (row.constant != 0 || row.terms.empty()) os << " " << row.constant;
      for (const auto& [v, c] : row.terms)
        os << (c < 0 ? " - " : " + ") << std::abs(c) << "*" << names_[v];
      os << "\n";
    }
  }
}

double cone_violation(Cone kind, const Eigen::VectorXd& values,
                      int psd_order) {
  switch (kind) {
    case Cone::zero:
      return values.cwiseAbs().maxCoeff();
    case Cone::nonneg:
      return std::max(0.0, -values.minCoeff());
    case Cone::soc:
      return std::max(0.0, values.tail(values.size() - 1).norm() - values[0]);
    case Cone::rsoc: {
      Eigen::VectorXd r(values.size());
      const double s = 1.0 / std::sqrt(2.0);
      r[0] = s * (values[0] + values[1]);
      r[1] = s * (values[0] - values[1]);
      r.tail(values.size() - 2) = values.tail(values.size() - 2);
      return cone_violation(Cone::soc, r);
    }
    case Cone::psd: {
      if (svec_dim(psd_order) != values.size())
        throw std::invalid_argument("cone_violation: bad psd dimension");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(values),
                                                        Eigen::EigenvaluesOnly);
      return std::max(0.0, -es.eigenvalues().minCoeff());
    }
  }
  throw std::logic_error("cone_violation: unknown cone");
}

}  // namespace srbeam::conic

#include "srbeam/conic/expchain.hpp"

#include <cmath>
#include <stdexcept>

namespace srbeam::conic {

namespace {

// one "1 + a >= ||[1 - a, w]||" relation, i.e. a >= (w/2)^2
std::vector<LinExpr> square_rows(const LinExpr& a, const LinExpr& w) {
  return {LinExpr(1.0) + a, LinExpr(1.0) - a, w};
}

}  // namespace

ExpChain append_exp_soc_chain(Program& p, const LinExpr& z, const LinExpr& xi,
                              int M, const std::string& tag) {
  if (M < 1) throw std::invalid_argument("exp chain: M must be >= 1");
  ExpChain out;
  const int first = p.add_vars(M + 4, tag + "_zeta");
  for (int q = 0; q < M + 4; ++q) out.zeta_vars.push_back(first + q);
  auto zeta = [&](int q) { return LinExpr::variable(first + q - 1); };

  const double pm = std::pow(2.0, -M);
  out.soc_blocks.push_back(p.add_block(
      Cone::soc, square_rows(zeta(1), LinExpr(2.0) + 2.0 * pm * z), tag + "_seed1"));
  out.soc_blocks.push_back(p.add_block(
      Cone::soc, square_rows(zeta(2), LinExpr(5.0 / 3.0) + pm * z), tag + "_seed2"));
  out.soc_blocks.push_back(
      p.add_block(Cone::soc, square_rows(zeta(3), 2.0 * zeta(1)), tag + "_sq3"));
  out.lin_blocks.push_back(p.add_block(
      Cone::nonneg,
      {zeta(4) - zeta(2) - (1.0 / 24.0) * zeta(3) - LinExpr(19.0 / 72.0)},
      tag + "_affine"));
  for (int q = 5; q <= M + 4; ++q)
    out.soc_blocks.push_back(p.add_block(
        Cone::soc, square_rows(zeta(q), 2.0 * zeta(q - 1)), tag + "_sq" + std::to_string(q)));
  out.lin_blocks.push_back(p.add_block(
      Cone::nonneg, {LinExpr(1.0) + xi - zeta(M + 4)}, tag + "_cap"));
  return out;
}

double exp_chain_tight(double z, int M) {
  if (M < 1) throw std::invalid_argument("exp chain: M must be >= 1");
  const double pm = std::pow(2.0, -M);
  const double z1 = (1.0 + pm * z) * (1.0 + pm * z);
  const double z2 = (5.0 / 6.0 + 0.5 * pm * z) * (5.0 / 6.0 + 0.5 * pm * z);
  const double z3 = z1 * z1;
  double zq = z2 + z3 / 24.0 + 19.0 / 72.0;
  for (int q = 5; q <= M + 4; ++q) zq = zq * zq;
  return zq;
}

}  // namespace srbeam::conic

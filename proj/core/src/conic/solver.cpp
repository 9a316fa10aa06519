#include "srbeam/conic/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "srbeam/conic/hermitian.hpp"

// Primal-dual path following on the homogeneous self-dual embedding of
//
//   min c'x   s.t.  A x = b,  G x + s = h,  s in K,
//
// with K a product of nonnegative, second-order and PSD cones (rotated
// cones are rotated onto plain second-order cones at ingestion). Directions
// come from Nesterov-Todd scalings with a Mehrotra correction; the KKT
// system is reduced to the dense Schur complement G' (W'W)^-1 G.
//
// Embedding variables (x, y, z, s, tau, kappa) satisfy at a solution
//   A'y + G'z + c tau = 0,  A x = b tau,  G x + s = h tau,
//   kappa + c'x + b'y + h'z = 0,
// with tau > 0 at optimality and kappa > 0 on infeasibility certificates.

namespace srbeam::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class CK { nn, soc, psd };

using SparseRow = std::vector<std::pair<int, double>>;

struct ConeSeg {
  CK kind;
  int order = 0;  // psd matrix order
  int offset = 0; // first row in m-space
  int dim = 0;
};

struct StdForm {
  int n = 0, p = 0, m = 0;
  Eigen::VectorXd c;
  double c0 = 0;
  double obj_scale = 1;           // reported objective = obj_scale*c'x + c0
  std::vector<SparseRow> A;       // p rows
  Eigen::VectorXd b;
  std::vector<SparseRow> G;       // m rows
  Eigen::VectorXd h;
  std::vector<ConeSeg> cones;
  Eigen::VectorXd col_scale;      // x_original = col_scale .* x_solved
  double degree = 0;
};

void axpy_row(const SparseRow& row, double alpha, const Eigen::VectorXd& x,
              double& acc) {
  double s = 0;
  for (const auto& [v, c] : row) s += c * x[v];
  acc += alpha * s;
}

Eigen::VectorXd mat_vec(const std::vector<SparseRow>& rows,
                        const Eigen::VectorXd& x, int nrows) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nrows);
  for (int r = 0; r < nrows; ++r) axpy_row(rows[r], 1.0, x, out[r]);
  return out;
}

Eigen::VectorXd mat_tvec(const std::vector<SparseRow>& rows,
                         const Eigen::VectorXd& y, int ncols) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ncols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [v, c] : rows[r]) out[v] += c * y[r];
  return out;
}

StdForm ingest(const Program& prog) {
  if (prog.var_count() == 0)
    throw std::invalid_argument("conic solve: program has no variables");
  if (prog.objective().terms.empty())
    throw std::invalid_argument("conic solve: program has an empty objective");

  StdForm f;
  f.n = prog.var_count();
  f.c = Eigen::VectorXd::Zero(f.n);
  for (const auto& [v, coef] : prog.objective().terms) f.c[v] += coef;
  f.c0 = prog.objective().constant;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& blk : prog.blocks()) {
    auto make_row = [&](const LinExpr& e, double scale) {
      SparseRow r;
      for (const auto& [v, c] : e.terms) r.emplace_back(v, scale * c);
      return r;
    };
    if (blk.kind == Cone::zero) {
      for (const auto& e : blk.rows) {
        f.A.push_back(make_row(e, 1.0));
        f.b.conservativeResize(f.A.size());
        f.b[f.A.size() - 1] = -e.constant;
      }
      continue;
    }
    std::vector<LinExpr> rows = blk.rows;
    if (blk.kind == Cone::rsoc) {
      // (a, b, u) -> ((a+b)/sqrt2, (a-b)/sqrt2, u)
      LinExpr a = rows[0], b = rows[1];
      rows[0] = inv_sqrt2 * (a + b);
      rows[1] = inv_sqrt2 * (a - b);
    }
    ConeSeg seg;
    seg.kind = blk.kind == Cone::psd ? CK::psd
               : blk.kind == Cone::nonneg ? CK::nn
                                          : CK::soc;
    seg.order = blk.psd_order;
    seg.offset = static_cast<int>(f.G.size());
    seg.dim = static_cast<int>(rows.size());
    for (const auto& e : rows) {
      // s = h - G x with s = F x + g  =>  G = -F, h = g
      f.G.push_back(make_row(e, -1.0));
      f.h.conservativeResize(f.G.size());
      f.h[f.G.size() - 1] = e.constant;
    }
    f.cones.push_back(seg);
  }
  f.p = static_cast<int>(f.A.size());
  f.m = static_cast<int>(f.G.size());
  f.col_scale = Eigen::VectorXd::Ones(f.n);
  for (const auto& seg : f.cones)
    f.degree += seg.kind == CK::nn ? seg.dim : seg.kind == CK::soc ? 1 : seg.order;
  return f;
}

// Ruiz equilibration with block-uniform row scaling on cone blocks so cone
// membership is preserved.
void equilibrate(StdForm& f) {
  const int iters = 8;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd rowA = Eigen::VectorXd::Zero(f.p);
    Eigen::VectorXd rowG = Eigen::VectorXd::Zero(f.m);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(f.n);
    for (int r = 0; r < f.p; ++r)
      for (const auto& [v, c] : f.A[r]) {
        rowA[r] = std::max(rowA[r], std::abs(c));
        col[v] = std::max(col[v], std::abs(c));
      }
    for (int r = 0; r < f.m; ++r)
      for (const auto& [v, c] : f.G[r]) {
        rowG[r] = std::max(rowG[r], std::abs(c));
        col[v] = std::max(col[v], std::abs(c));
      }
    auto factor = [](double norm) {
      if (norm <= 0) return 1.0;
      return 1.0 / std::sqrt(norm);
    };
    // uniform within each cone block (max norm over the block)
    for (const auto& seg : f.cones) {
      if (seg.kind == CK::nn) continue;
      double mx = 0;
      for (int r = seg.offset; r < seg.offset + seg.dim; ++r)
        mx = std::max(mx, rowG[r]);
      for (int r = seg.offset; r < seg.offset + seg.dim; ++r) rowG[r] = mx;
    }
    for (int r = 0; r < f.p; ++r) {
      const double e = factor(rowA[r]);
      for (auto& [v, c] : f.A[r]) c *= e;
      f.b[r] *= e;
    }
    for (int r = 0; r < f.m; ++r) {
      const double e = factor(rowG[r]);
      for (auto& [v, c] : f.G[r]) c *= e;
      f.h[r] *= e;
    }
    for (int v = 0; v < f.n; ++v) col[v] = factor(col[v]);
    for (auto& rows : {&f.A, &f.G})
      for (auto& row : *rows)
        for (auto& [v, c] : row) c *= col[v];
    f.c.array() *= col.array();
    f.col_scale.array() *= col.array();
  }
  const double cs = std::max(1.0, f.c.cwiseAbs().maxCoeff());
  f.c /= cs;
  f.obj_scale = cs;
}

// ---- Nesterov-Todd scaling per cone segment -----------------------------

struct Scaling {
  CK kind;
  int dim = 0, order = 0;
  Eigen::VectorXd w;       // nn
  double beta = 1;         // soc
  Eigen::VectorXd wbar;    // soc
  Eigen::MatrixXd R, Rinv; // psd
  Eigen::VectorXd lam;     // scaled point (svec(diag) for psd)
  Eigen::VectorXd sig;     // psd eigenvalues of the scaled point

  static Eigen::VectorXd jmul_soc(const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v) {
    Eigen::VectorXd r(u.size());
    r[0] = u.dot(v);
    r.tail(u.size() - 1) =
        u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
    return r;
  }

  void compute(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    switch (kind) {
      case CK::nn: {
        w = (s.array() / z.array()).sqrt();
        lam = (s.array() * z.array()).sqrt();
        return;
      }
      case CK::soc: {
        auto jn = [](const Eigen::VectorXd& u) {
          const double v = u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
          return std::sqrt(std::max(v, 1e-300));
        };
        const double sn = jn(s), zn = jn(z);
        Eigen::VectorXd sb = s / sn, zb = z / zn;
        const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
        Eigen::VectorXd jzb = zb;
        jzb.tail(zb.size() - 1) *= -1.0;
        // midpoint w of the hyperbolic geodesic, then its Jordan square
        // root v, so that (2vv' - J)^2 maps zb onto sb
        Eigen::VectorXd w = (sb + jzb) / (2.0 * gamma);
        wbar = w;
        wbar[0] += 1.0;
        wbar /= std::sqrt(2.0 * (1.0 + w[0]));
        beta = std::sqrt(sn / zn);
        lam = W(z);
        return;
      }
      case CK::psd: {
        Eigen::MatrixXd S = smat(s), Z = smat(z);
        Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
          const double eps = 1e-14 * (S.trace() + Z.trace() + 1);
          ls.compute(S + eps * Eigen::MatrixXd::Identity(order, order));
          lz.compute(Z + eps * Eigen::MatrixXd::Identity(order, order));
          if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
            throw std::runtime_error("conic solve: scaling point left the cone");
        }
        Eigen::MatrixXd Ls = ls.matrixL(), Lz = lz.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        sig = svd.singularValues();
        Eigen::VectorXd si = sig.cwiseMax(1e-150).cwiseSqrt().cwiseInverse();
        R = Ls * svd.matrixV() * si.asDiagonal();
        Rinv = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        lam = svec(Eigen::MatrixXd(sig.asDiagonal()));
        return;
      }
    }
  }

  Eigen::VectorXd W(const Eigen::VectorXd& u) const {
    switch (kind) {
      case CK::nn: return w.cwiseProduct(u);
      case CK::soc: {
        Eigen::VectorXd ju = u;
        ju.tail(u.size() - 1) *= -1.0;
        return beta * (2.0 * wbar * wbar.dot(u) - ju);
      }
      case CK::psd:
        return svec(R.transpose() * smat(u) * R);
    }
    return u;
  }
  Eigen::VectorXd WT(const Eigen::VectorXd& u) const {
    if (kind == CK::psd) return svec(R * smat(u) * R.transpose());
    return W(u);
  }
  Eigen::VectorXd Winv(const Eigen::VectorXd& u) const {
    switch (kind) {
      case CK::nn: return u.cwiseQuotient(w);
      case CK::soc: {
        Eigen::VectorXd v = wbar;
        v.tail(v.size() - 1) *= -1.0;  // J wbar
        Eigen::VectorXd ju = u;
        ju.tail(u.size() - 1) *= -1.0;
        return (2.0 * v * v.dot(u) - ju) / beta;
      }
      case CK::psd:
        return svec(Rinv.transpose() * smat(u) * Rinv);
    }
    return u;
  }
  Eigen::VectorXd WinvT(const Eigen::VectorXd& u) const {
    if (kind == CK::psd) return svec(Rinv * smat(u) * Rinv.transpose());
    return Winv(u);
  }

  /// (W'W)^{-1} materialized (dim x dim).
  Eigen::MatrixXd winv2() const {
    switch (kind) {
      case CK::nn:
        return Eigen::MatrixXd(
            (w.array().square().inverse()).matrix().asDiagonal());
      case CK::soc: {
        Eigen::MatrixXd Wi(dim, dim);
        for (int k = 0; k < dim; ++k)
          Wi.col(k) = Winv(Eigen::VectorXd::Unit(dim, k));
        return Wi * Wi;  // symmetric
      }
      case CK::psd: {
        const Eigen::MatrixXd Qi = Rinv.transpose() * Rinv;  // (R R')^{-1}
        Eigen::MatrixXd M(dim, dim);
        int k = 0;
        const double s2 = std::sqrt(2.0);
        for (int j = 0; j < order; ++j)
          for (int i = 0; i <= j; ++i) {
            Eigen::MatrixXd E;
            if (i == j)
              E = Qi.col(i) * Qi.row(i);
            else
              E = (Qi.col(i) * Qi.row(j) + Qi.col(j) * Qi.row(i)) / s2;
            M.col(k++) = svec(E);
          }
        return M;
      }
    }
    return Eigen::MatrixXd::Identity(dim, dim);
  }

  Eigen::VectorXd jprod(const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v) const {
    switch (kind) {
      case CK::nn: return u.cwiseProduct(v);
      case CK::soc: return jmul_soc(u, v);
      case CK::psd: {
        Eigen::MatrixXd U = smat(u), V = smat(v);
        return svec(0.5 * (U * V + V * U));
      }
    }
    return u;
  }

  /// solve lam o u = eta
  Eigen::VectorXd jdiv_lam(const Eigen::VectorXd& eta) const {
    switch (kind) {
      case CK::nn: return eta.cwiseQuotient(lam);
      case CK::soc: {
        const double l0 = lam[0];
        const auto lbar = lam.tail(dim - 1);
        const double den = l0 * l0 - lbar.squaredNorm();
        Eigen::VectorXd u(dim);
        u[0] = (l0 * eta[0] - lbar.dot(eta.tail(dim - 1))) / den;
        u.tail(dim - 1) = (eta.tail(dim - 1) - u[0] * lbar) / l0;
        return u;
      }
      case CK::psd: {
        Eigen::MatrixXd E = smat(eta), U(order, order);
        for (int i = 0; i < order; ++i)
          for (int j = 0; j < order; ++j)
            U(i, j) = 2.0 * E(i, j) / (sig[i] + sig[j]);
        return svec(U);
      }
    }
    return eta;
  }

  Eigen::VectorXd identity() const {
    switch (kind) {
      case CK::nn: return Eigen::VectorXd::Ones(dim);
      case CK::soc: {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e[0] = 1;
        return e;
      }
      case CK::psd:
        return svec(Eigen::MatrixXd::Identity(order, order));
    }
    return Eigen::VectorXd::Zero(dim);
  }

  /// sup { a >= 0 : lam + a d in K }
  double max_step(const Eigen::VectorXd& d) const {
    switch (kind) {
      case CK::nn: {
        double a = kInf;
        for (int i = 0; i < dim; ++i)
          if (d[i] < 0) a = std::min(a, -lam[i] / d[i]);
        return a;
      }
      case CK::soc: {
        const auto db = d.tail(dim - 1);
        const auto lb = lam.tail(dim - 1);
        const double qa = d[0] * d[0] - db.squaredNorm();
        const double qb = 2.0 * (lam[0] * d[0] - lb.dot(db));
        const double qc = lam[0] * lam[0] - lb.squaredNorm();
        double root = kInf;
        if (std::abs(qa) < 1e-300) {
          if (qb < 0) root = -qc / qb;
        } else {
          const double disc = qb * qb - 4.0 * qa * qc;
          if (disc >= 0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (qb + (qb >= 0 ? sq : -sq));
            for (double r : {q / qa, (std::abs(q) > 0 ? qc / q : kInf)})
              if (r > 0) root = std::min(root, r);
          }
        }
        return root;
      }
      case CK::psd: {
        Eigen::MatrixXd D = smat(d);
        Eigen::VectorXd si = sig.cwiseMax(1e-150).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd M = si.asDiagonal() * D * si.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                          Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues().minCoeff();
        return emin >= 0 ? kInf : -1.0 / emin;
      }
    }
    return kInf;
  }
};

// ---- reduced KKT solver --------------------------------------------------

struct Kkt {
  const StdForm& f;
  std::vector<Scaling>* sc = nullptr;  // null means W = I
  Eigen::MatrixXd H;                   // n x n Schur complement (kept for refinement)
  Eigen::MatrixXd M;                   // (n+p) when p > 0
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool ok = false;

  explicit Kkt(const StdForm& form) : f(form) {}

  Eigen::VectorXd apply_winv2(const Eigen::VectorXd& u) const {
    if (!sc) return u;
    Eigen::VectorXd out(f.m);
    for (std::size_t k = 0; k < f.cones.size(); ++k) {
      const auto& seg = f.cones[k];
      const auto& s = (*sc)[k];
      out.segment(seg.offset, seg.dim) =
          s.Winv(s.WinvT(u.segment(seg.offset, seg.dim)));
    }
    return out;
  }

  Eigen::VectorXd apply_w2(const Eigen::VectorXd& u) const {
    if (!sc) return u;
    Eigen::VectorXd out(f.m);
    for (std::size_t k = 0; k < f.cones.size(); ++k) {
      const auto& seg = f.cones[k];
      const auto& s = (*sc)[k];
      out.segment(seg.offset, seg.dim) =
          s.WT(s.W(u.segment(seg.offset, seg.dim)));
    }
    return out;
  }

  void factor(std::vector<Scaling>* scalings) {
    sc = scalings;
    H.setZero(f.n, f.n);
    for (std::size_t k = 0; k < f.cones.size(); ++k) {
      const auto& seg = f.cones[k];
      if (seg.kind == CK::nn && sc) {
        const auto& w = (*sc)[k].w;
        for (int r = 0; r < seg.dim; ++r) {
          const double wi = 1.0 / (w[r] * w[r]);
          const auto& row = f.G[seg.offset + r];
          for (const auto& [v1, c1] : row)
            for (const auto& [v2, c2] : row) H(v1, v2) += wi * c1 * c2;
        }
        continue;
      }
      // gather the block's variables, form local dense product
      std::vector<int> vars;
      std::vector<int> pos(f.n, -1);
      for (int r = 0; r < seg.dim; ++r)
        for (const auto& [v, c] : f.G[seg.offset + r]) {
          (void)c;
          if (pos[v] < 0) {
            pos[v] = static_cast<int>(vars.size());
            vars.push_back(v);
          }
        }
      if (vars.empty()) continue;
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(seg.dim, vars.size());
      for (int r = 0; r < seg.dim; ++r)
        for (const auto& [v, c] : f.G[seg.offset + r]) B(r, pos[v]) += c;
      Eigen::MatrixXd Wi2 = sc ? (*sc)[k].winv2()
                               : Eigen::MatrixXd::Identity(seg.dim, seg.dim);
      Eigen::MatrixXd Hloc = B.transpose() * Wi2 * B;
      for (std::size_t a = 0; a < vars.size(); ++a)
        for (std::size_t bb = 0; bb < vars.size(); ++bb)
          H(vars[a], vars[bb]) += Hloc(a, bb);
    }
    const double reg = 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
    H.diagonal().array() += reg;

    ok = false;
    if (f.p == 0) {
      llt.compute(H);
      if (llt.info() == Eigen::Success) {
        ok = true;
        return;
      }
      H.diagonal().array() += 1e-8 * std::max(1.0, H.diagonal().maxCoeff());
      llt.compute(H);
      ok = llt.info() == Eigen::Success;
      return;
    }
    M.setZero(f.n + f.p, f.n + f.p);
    M.topLeftCorner(f.n, f.n) = H;
    for (int r = 0; r < f.p; ++r)
      for (const auto& [v, c] : f.A[r]) {
        M(f.n + r, v) = c;
        M(v, f.n + r) = c;
      }
    M.bottomRightCorner(f.p, f.p).diagonal().array() -= reg;
    lu.compute(M);
    ok = true;
  }

  // one Schur-complement pass for [0 A' G'; A 0 0; G 0 -W'W]
  void solve_once(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
                  const Eigen::VectorXd& r3, Eigen::VectorXd& dx,
                  Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
    const Eigen::VectorXd gw = mat_tvec(f.G, apply_winv2(r3), f.n);
    Eigen::VectorXd rhs1 = r1 + gw;
    if (f.p == 0) {
      dx = llt.solve(rhs1);
      dx += llt.solve(rhs1 - H.selfadjointView<Eigen::Lower>() * dx);
      dy.resize(0);
    } else {
      Eigen::VectorXd rhs(f.n + f.p);
      rhs << rhs1, r2;
      Eigen::VectorXd sol = lu.solve(rhs);
      sol += lu.solve(rhs - M * sol);
      dx = sol.head(f.n);
      dy = sol.tail(f.p);
    }
    dz = apply_winv2(mat_vec(f.G, dx, f.m) - r3);
  }

  // solve with refinement against the unreduced system; the Schur pass
  // loses accuracy once the scalings become extreme near the optimum
  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
             const Eigen::VectorXd& r3, Eigen::VectorXd& dx,
             Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
    solve_once(r1, r2, r3, dx, dy, dz);
    for (int pass = 0; pass < 3; ++pass) {
      Eigen::VectorXd e1 = r1 - mat_tvec(f.G, dz, f.n);
      if (f.p) e1 -= mat_tvec(f.A, dy, f.n);
      Eigen::VectorXd e2 =
          f.p ? (r2 - mat_vec(f.A, dx, f.p)).eval() : Eigen::VectorXd();
      Eigen::VectorXd e3 = r3 - mat_vec(f.G, dx, f.m) + apply_w2(dz);
      const double res = std::max({e1.cwiseAbs().maxCoeff(),
                                   f.p ? e2.cwiseAbs().maxCoeff() : 0.0,
                                   e3.cwiseAbs().maxCoeff()});
      const double scale = 1.0 + std::max({r1.cwiseAbs().maxCoeff(),
                                           f.p ? r2.cwiseAbs().maxCoeff() : 0.0,
                                           r3.cwiseAbs().maxCoeff()});
      if (res <= 1e-14 * scale) break;
      Eigen::VectorXd cx, cy, cz;
      solve_once(e1, e2, e3, cx, cy, cz);
      dx += cx;
      if (f.p) dy += cy;
      dz += cz;
    }
  }
};

struct State {
  Eigen::VectorXd x, y, z, s;
  double tau = 1, kappa = 1;
};

double block_interior_violation(const ConeSeg& seg, const Eigen::VectorXd& v) {
  switch (seg.kind) {
    case CK::nn: return -v.minCoeff();
    case CK::soc: return v.tail(v.size() - 1).norm() - v[0];
    case CK::psd: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(v),
                                                        Eigen::EigenvaluesOnly);
      return -es.eigenvalues().minCoeff();
    }
  }
  return 0;
}

Eigen::VectorXd cone_identity(const StdForm& f) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(f.m);
  for (const auto& seg : f.cones) {
    if (seg.kind == CK::nn)
      e.segment(seg.offset, seg.dim).setOnes();
    else if (seg.kind == CK::soc)
      e[seg.offset] = 1;
    else
      e.segment(seg.offset, seg.dim) =
          svec(Eigen::MatrixXd::Identity(seg.order, seg.order));
  }
  return e;
}

void push_into_cone(const StdForm& f, Eigen::VectorXd& v) {
  for (const auto& seg : f.cones) {
    Eigen::VectorXd seg_v = v.segment(seg.offset, seg.dim);
    const double viol = block_interior_violation(seg, seg_v);
    if (viol >= 0) {
      Eigen::VectorXd e =
          seg.kind == CK::nn
              ? Eigen::VectorXd::Ones(seg.dim)
              : seg.kind == CK::soc
                    ? Eigen::VectorXd::Unit(seg.dim, 0)
                    : svec(Eigen::MatrixXd::Identity(seg.order, seg.order));
      v.segment(seg.offset, seg.dim) = seg_v + (1.0 + viol) * e;
    }
  }
}

}  // namespace

ConicSolution solve(const Program& prog, const SolveOptions& opts) {
  StdForm f = ingest(prog);
  if (opts.equilibrate) equilibrate(f);

  const int n = f.n, p = f.p, m = f.m;
  const double bnorm = 1.0 + (p ? f.b.norm() : 0.0);
  const double hnorm = 1.0 + f.h.norm();
  const double cnorm = 1.0 + f.c.norm();

  ConicSolution out;
  out.x = Eigen::VectorXd::Zero(n);

  auto finish = [&](SolveStatus st, const State& st8, int iters) {
    out.status = st;
    out.iterations = iters;
    const double t = std::max(st8.tau, 1e-300);
    Eigen::VectorXd xs = st8.x / t;
    out.x = f.col_scale.cwiseProduct(xs);
    out.objective = f.obj_scale * f.c.dot(xs) + f.c0;
    Eigen::VectorXd ry = p ? (mat_vec(f.A, xs, p) - f.b) : Eigen::VectorXd();
    Eigen::VectorXd rz = mat_vec(f.G, xs, m) + st8.s / t - f.h;
    out.primal_residual =
        std::max(p ? ry.norm() / bnorm : 0.0, rz.norm() / hnorm);
    Eigen::VectorXd rd = mat_tvec(f.G, st8.z / t, n) + f.c;
    if (p) rd += mat_tvec(f.A, st8.y / t, n);
    out.dual_residual = rd.norm() / cnorm;
    const double pobj = f.c.dot(xs);
    const double dobj = -(f.h.dot(st8.z) + (p ? f.b.dot(st8.y) : 0.0)) / t;
    out.gap = std::abs(pobj - dobj) / std::max({1.0, std::abs(pobj), std::abs(dobj)});
    return out;
  };

  // ---- initial point (identity scaling) ----
  State st;
  Kkt kkt(f);
  kkt.factor(nullptr);
  if (!kkt.ok) throw std::runtime_error("conic solve: initial factorization failed");
  Eigen::VectorXd dx, dy, dz;
  kkt.solve(Eigen::VectorXd::Zero(n), p ? f.b : Eigen::VectorXd(), f.h, dx, dy, dz);
  st.x = dx;
  st.y = dy;
  st.s = -dz;
  push_into_cone(f, st.s);
  kkt.solve(-f.c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), dx, dy, dz);
  st.z = dz;
  push_into_cone(f, st.z);
  st.tau = 1;
  st.kappa = 1;

  const Eigen::VectorXd e_all = cone_identity(f);
  const double deg1 = f.degree + 1.0;

  std::vector<Scaling> sc(f.cones.size());
  for (std::size_t k = 0; k < f.cones.size(); ++k) {
    sc[k].kind = f.cones[k].kind;
    sc[k].dim = f.cones[k].dim;
    sc[k].order = f.cones[k].order;
  }

  auto per_cone = [&](auto&& fn) {
    for (std::size_t k = 0; k < f.cones.size(); ++k)
      fn(f.cones[k], sc[k]);
  };

  int stall = 0;
  State best = st;
  double best_merit = kInf;
  int best_age = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    // residuals of the embedding
    Eigen::VectorXd rx = -(mat_tvec(f.G, st.z, n) + f.c * st.tau);
    if (p) rx -= mat_tvec(f.A, st.y, n);
    Eigen::VectorXd ry = p ? (f.b * st.tau - mat_vec(f.A, st.x, p)).eval()
                           : Eigen::VectorXd();
    Eigen::VectorXd rz = f.h * st.tau - mat_vec(f.G, st.x, m) - st.s;
    const double rtau = -(st.kappa + f.c.dot(st.x) + f.h.dot(st.z) +
                          (p ? f.b.dot(st.y) : 0.0));

    const double gap = st.s.dot(st.z);
    const double mu = (gap + st.tau * st.kappa) / deg1;

    // convergence measures of the de-homogenized point
    const double pres = std::max(p ? ry.norm() / bnorm : 0.0,
                                 rz.norm() / hnorm) / st.tau;
    const double dres = rx.norm() / cnorm / st.tau;
    const double pobj = f.c.dot(st.x) / st.tau;
    const double dobj =
        -(f.h.dot(st.z) + (p ? f.b.dot(st.y) : 0.0)) / st.tau;
    const double relgap =
        std::abs(pobj - dobj) / std::max({1.0, std::abs(pobj), std::abs(dobj)});

    if (std::getenv("SRBEAM_IPM_DEBUG"))
      std::fprintf(stderr,
                   "it=%3d mu=%9.2e pres=%9.2e dres=%9.2e relgap=%9.2e tau=%9.2e kappa=%9.2e\n",
                   it, mu, pres, dres, relgap, st.tau, st.kappa);

    if (pres <= opts.tol && dres <= opts.tol && relgap <= opts.tol)
      return finish(SolveStatus::optimal, st, it);

    const double merit = std::max({pres, dres, relgap});
    if (!std::isfinite(merit) || !std::isfinite(mu)) break;
    if (merit < best_merit) {
      best_merit = merit;
      best = st;
      best_age = 0;
    } else if (++best_age >= 12) {
      break;  // no progress on the residuals, stop chasing complementarity
    }

    // infeasibility certificates
    const double by_hz = (p ? f.b.dot(st.y) : 0.0) + f.h.dot(st.z);
    if (by_hz < 0) {
      Eigen::VectorXd dres_cert = mat_tvec(f.G, st.z, n);
      if (p) dres_cert += mat_tvec(f.A, st.y, n);
      if (dres_cert.norm() / cnorm <= opts.tol * (-by_hz)) {
        State cert = st;
        cert.tau = 1;  // report the certificate direction as-is
        finish(SolveStatus::infeasible, cert, it);
        out.x.setZero();
        return out;
      }
    }
    const double cx = f.c.dot(st.x);
    if (cx < 0) {
      const double prim_cert =
          std::max(p ? mat_vec(f.A, st.x, p).norm() / bnorm : 0.0,
                   (mat_vec(f.G, st.x, m) + st.s).norm() / hnorm);
      if (prim_cert <= opts.tol * (-cx)) {
        State cert = st;
        cert.tau = 1;
        finish(SolveStatus::unbounded, cert, it);
        out.x = f.col_scale.cwiseProduct(st.x / (-cx));
        return out;
      }
    }

    // scalings and factorization
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      s.compute(st.s.segment(seg.offset, seg.dim),
                st.z.segment(seg.offset, seg.dim));
    });
    kkt.factor(&sc);
    if (!kkt.ok) break;

    Eigen::VectorXd x1, y1, z1;
    kkt.solve(-f.c, p ? f.b : Eigen::VectorXd(), f.h, x1, y1, z1);
    const double den =
        -st.kappa / st.tau + f.c.dot(x1) + f.h.dot(z1) + (p ? f.b.dot(y1) : 0.0);

    Eigen::VectorXd lam_all(m), eta(m);
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      lam_all.segment(seg.offset, seg.dim) = s.lam;
    });

    auto direction = [&](const Eigen::VectorXd& eta_in, double eta_tau,
                         double shift, Eigen::VectorXd& ddx,
                         Eigen::VectorXd& ddy, Eigen::VectorXd& ddz,
                         Eigen::VectorXd& dds, double& ddtau, double& ddkappa) {
      // shift in [0,1): solve with d = (1-shift)*residuals
      Eigen::VectorXd u(m);
      per_cone([&](const ConeSeg& seg, Scaling& s) {
        u.segment(seg.offset, seg.dim) =
            s.jdiv_lam(eta_in.segment(seg.offset, seg.dim));
      });
      Eigen::VectorXd wtu(m);
      per_cone([&](const ConeSeg& seg, Scaling& s) {
        wtu.segment(seg.offset, seg.dim) = s.WT(u.segment(seg.offset, seg.dim));
      });
      const double f1 = 1.0 - shift;
      Eigen::VectorXd x2, y2, z2;
      kkt.solve(f1 * rx, p ? (f1 * ry).eval() : Eigen::VectorXd(),
                f1 * rz - wtu, x2, y2, z2);
      ddtau = (f1 * rtau - eta_tau / st.tau -
               (f.c.dot(x2) + f.h.dot(z2) + (p ? f.b.dot(y2) : 0.0))) /
              den;
      ddx = x2 + ddtau * x1;
      ddy = p ? (y2 + ddtau * y1).eval() : Eigen::VectorXd();
      ddz = z2 + ddtau * z1;
      dds = wtu - kkt.apply_w2(ddz);
      ddkappa = (eta_tau - st.kappa * ddtau) / st.tau;

      if (opts.self_check) {
        Eigen::VectorXd n1 = mat_tvec(f.G, ddz, n) + f.c * ddtau;
        if (p) n1 += mat_tvec(f.A, ddy, n);
        Eigen::VectorXd n3 =
            dds + mat_vec(f.G, ddx, m) - f.h * ddtau - f1 * rz * (-1.0);
        // N1: A'dy + G'dz + c dtau = f1*rx ; N3: ds + G dx - h dtau = f1*rz
        const double e1 = (n1 - f1 * rx).norm();
        const double e3 =
            (dds + mat_vec(f.G, ddx, m) - f.h * ddtau - f1 * rz).norm();
        (void)n3;
        const double scale = 1.0 + lam_all.norm();
        if (e1 > 1e-6 * scale || e3 > 1e-6 * scale)
          throw std::logic_error("conic solve: Newton system check failed");
      }
    };

    // affine direction: eta = -lam o lam, eta_tau = -tau*kappa
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      eta.segment(seg.offset, seg.dim) = -s.jprod(s.lam, s.lam);
    });
    Eigen::VectorXd dxa, dya, dza, dsa;
    double dtaua, dkappaa;
    direction(eta, -st.tau * st.kappa, 0.0, dxa, dya, dza, dsa, dtaua, dkappaa);

    // scaled affine directions and the step to the boundary
    Eigen::VectorXd dsa_sc(m), dza_sc(m);
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      dsa_sc.segment(seg.offset, seg.dim) =
          s.WinvT(dsa.segment(seg.offset, seg.dim));
      dza_sc.segment(seg.offset, seg.dim) =
          s.W(dza.segment(seg.offset, seg.dim));
    });
    double alpha_aff = 1.0;
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      alpha_aff = std::min(alpha_aff,
                           s.max_step(dsa_sc.segment(seg.offset, seg.dim)));
      alpha_aff = std::min(alpha_aff,
                           s.max_step(dza_sc.segment(seg.offset, seg.dim)));
    });
    if (dtaua < 0) alpha_aff = std::min(alpha_aff, -st.tau / dtaua);
    if (dkappaa < 0) alpha_aff = std::min(alpha_aff, -st.kappa / dkappaa);

    const double mu_aff =
        ((st.s + alpha_aff * dsa).dot(st.z + alpha_aff * dza) +
         (st.tau + alpha_aff * dtaua) * (st.kappa + alpha_aff * dkappaa)) /
        deg1;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, sigma);

    // combined direction with Mehrotra correction
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      eta.segment(seg.offset, seg.dim) =
          -s.jprod(s.lam, s.lam) -
          s.jprod(dsa_sc.segment(seg.offset, seg.dim),
                  dza_sc.segment(seg.offset, seg.dim)) +
          sigma * mu * s.identity();
    });
    const double eta_tau = -st.tau * st.kappa - dtaua * dkappaa + sigma * mu;
    Eigen::VectorXd dxc, dyc, dzc, dsc;
    double dtauc, dkappac;
    direction(eta, eta_tau, sigma, dxc, dyc, dzc, dsc, dtauc, dkappac);

    Eigen::VectorXd dsc_sc(m), dzc_sc(m);
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      dsc_sc.segment(seg.offset, seg.dim) =
          s.WinvT(dsc.segment(seg.offset, seg.dim));
      dzc_sc.segment(seg.offset, seg.dim) =
          s.W(dzc.segment(seg.offset, seg.dim));
    });
    double amax = kInf;
    per_cone([&](const ConeSeg& seg, Scaling& s) {
      amax = std::min(amax, s.max_step(dsc_sc.segment(seg.offset, seg.dim)));
      amax = std::min(amax, s.max_step(dzc_sc.segment(seg.offset, seg.dim)));
    });
    if (dtauc < 0) amax = std::min(amax, -st.tau / dtauc);
    if (dkappac < 0) amax = std::min(amax, -st.kappa / dkappac);

    if (amax < 1e-3) {
      // corrector overshoots near a degenerate face; retry as a pure
      // centering step
      per_cone([&](const ConeSeg& seg, Scaling& s) {
        eta.segment(seg.offset, seg.dim) =
            -s.jprod(s.lam, s.lam) + mu * s.identity();
      });
      direction(eta, -st.tau * st.kappa + mu, 1.0, dxc, dyc, dzc, dsc, dtauc,
                dkappac);
      per_cone([&](const ConeSeg& seg, Scaling& s) {
        dsc_sc.segment(seg.offset, seg.dim) =
            s.WinvT(dsc.segment(seg.offset, seg.dim));
        dzc_sc.segment(seg.offset, seg.dim) =
            s.W(dzc.segment(seg.offset, seg.dim));
      });
      amax = kInf;
      per_cone([&](const ConeSeg& seg, Scaling& s) {
        amax = std::min(amax, s.max_step(dsc_sc.segment(seg.offset, seg.dim)));
        amax = std::min(amax, s.max_step(dzc_sc.segment(seg.offset, seg.dim)));
      });
      if (dtauc < 0) amax = std::min(amax, -st.tau / dtauc);
      if (dkappac < 0) amax = std::min(amax, -st.kappa / dkappac);
    }
    const double alpha = std::min(1.0, opts.step_fraction * amax);

    if (!(alpha > 1e-10)) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }

    st.x += alpha * dxc;
    if (p) st.y += alpha * dyc;
    st.z += alpha * dzc;
    st.s += alpha * dsc;
    st.tau += alpha * dtauc;
    st.kappa += alpha * dkappac;
    out.iterations = it + 1;
  }
  // report the best iterate seen; optimal only if it meets the tolerance
  const SolveStatus st_final =
      best_merit <= opts.tol ? SolveStatus::optimal : SolveStatus::max_iter;
  return finish(st_final, best, out.iterations);
}

}  // namespace srbeam::conic

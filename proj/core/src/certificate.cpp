#include "ppmsdp/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppmsdp/error.hpp"
#include "ppmsdp/linalg.hpp"
#include "ppmsdp/thresholds.hpp"

namespace ppm {

CertificateInputs CertificateInputs::from_params(const PlantedPartitionParams& params) {
  const RegimeConstants rc = regime_constants(params);
  return {rc.omega, params.p(), params.q(), std::nullopt};
}

namespace {

struct Context {
  int n;
  int r;
  std::vector<int> sizes;
  std::vector<int> comm;
  Eigen::MatrixXd E;       // n x r
  Eigen::MatrixXd Etot;    // r x r
  std::vector<int> min_other;  // min_{j != i} s_j
};

Context make_context(const Graph& g, const PartitionLabels& truth) {
  const int n = g.num_vertices();
  if (truth.num_vertices() != n) throw ParameterError("certificate: labels and graph disagree on n");
  if (truth.num_communities() < 2) throw ParameterError("certificate: need r >= 2");
  if (n < 3) throw ParameterError("certificate: need n >= 3");
  Context ctx{n, truth.num_communities(), truth.sizes(), truth.labels(),
              vertex_community_edges(g, truth), community_edge_totals(g, truth), {}};
  for (int i = 0; i < ctx.r; ++i) {
    int m = std::numeric_limits<int>::max();
    for (int j = 0; j < ctx.r; ++j) {
      if (j != i) m = std::min(m, ctx.sizes[static_cast<std::size_t>(j)]);
    }
    ctx.min_other.push_back(m);
  }
  return ctx;
}

double log_ratio_term(int n) {
  const double l = std::log(static_cast<double>(n));
  return l / std::log(l);
}

struct Pass {
  Eigen::VectorXd alpha, beta, alpha_bar, beta_bar, kappa, gamma_prime, delta;
};

Pass run_pass(const Context& ctx, const CertificateInputs& in, double c, double eps1, double eps2) {
  Pass ps;
  const double w = in.omega;
  ps.alpha.resize(ctx.n);
  ps.beta.resize(ctx.n);
  for (int v = 0; v < ctx.n; ++v) {
    const int i = ctx.comm[static_cast<std::size_t>(v)];
    const double si = ctx.sizes[static_cast<std::size_t>(i)];
    ps.alpha(v) = w * (si - 1.0) - ctx.E(v, i) + eps1;
    double b = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ctx.r; ++j) {
      if (j != i) b = std::min(b, w * ctx.sizes[static_cast<std::size_t>(j)] - ctx.E(v, j));
    }
    ps.beta(v) = b - eps2;
  }
  ps.alpha_bar.resize(ctx.r);
  ps.beta_bar.resize(ctx.r);
  ps.kappa.resize(ctx.r);
  for (int i = 0; i < ctx.r; ++i) {
    const double si = ctx.sizes[static_cast<std::size_t>(i)];
    ps.alpha_bar(i) = (w - in.p) * si * (si - 1.0) + si * eps1;
    ps.beta_bar(i) = (w - in.q) * si * ctx.min_other[static_cast<std::size_t>(i)] - si * eps2;
    const double den = ps.beta_bar(i) - ps.alpha_bar(i);
    ps.kappa(i) = den > 0.0 ? std::clamp((c - ps.alpha_bar(i)) / den, 0.0, 1.0) : 0.5;
  }
  ps.gamma_prime.resize(ctx.n);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(ctx.r);
  for (int v = 0; v < ctx.n; ++v) {
    const int i = ctx.comm[static_cast<std::size_t>(v)];
    const double a = ps.alpha(v);
    const double b = ps.beta(v);
    ps.gamma_prime(v) = a <= b ? (1.0 - ps.kappa(i)) * a + ps.kappa(i) * b : 0.5 * (a + b);
    sums(i) += ps.gamma_prime(v);
  }
  ps.delta.resize(ctx.r);
  for (int i = 0; i < ctx.r; ++i) ps.delta(i) = (c - sums(i)) / ctx.sizes[static_cast<std::size_t>(i)];
  return ps;
}

double default_c(const Context& ctx, const CertificateInputs& in) {
  std::vector<int> s = ctx.sizes;
  std::sort(s.begin(), s.end());
  return 0.5 * (in.omega - in.q) * s[0] * s[1];
}

struct Resolved {
  Pass pass;
  double c, eps1, eps2;
};

Resolved resolve(const Context& ctx, const CertificateInputs& in) {
  const double c = in.c ? *in.c : default_c(ctx, in);
  const double l = log_ratio_term(ctx.n);
  const Pass first = run_pass(ctx, in, c, in.omega + l, 1.0);
  const double dmax = first.delta.cwiseAbs().maxCoeff();
  const double eps1 = dmax + in.omega + l;
  const double eps2 = dmax + 1.0;
  return {run_pass(ctx, in, c, eps1, eps2), c, eps1, eps2};
}

double pair_product(int a, int b) { return static_cast<double>(a) * static_cast<double>(b); }

}  // namespace

DualCertificate build_certificate(const Graph& g, const PartitionLabels& truth,
                                  const CertificateInputs& inputs) {
  const Context ctx = make_context(g, truth);
  Resolved res = resolve(ctx, inputs);
  const double w = inputs.omega;

  DualCertificate cert;
  cert.n = ctx.n;
  cert.r = ctx.r;
  cert.omega = w;
  cert.p = inputs.p;
  cert.q = inputs.q;
  cert.c = res.c;
  cert.eps1 = res.eps1;
  cert.eps2 = res.eps2;
  cert.sizes = ctx.sizes;
  cert.community = ctx.comm;
  cert.alpha = std::move(res.pass.alpha);
  cert.beta = std::move(res.pass.beta);
  cert.alpha_bar = std::move(res.pass.alpha_bar);
  cert.beta_bar = std::move(res.pass.beta_bar);
  cert.kappa = std::move(res.pass.kappa);
  cert.delta = std::move(res.pass.delta);
  cert.gamma_prime = std::move(res.pass.gamma_prime);

  cert.gamma.resize(ctx.n);
  cert.nu.resize(ctx.n);
  cert.R = Eigen::MatrixXd::Zero(ctx.n, ctx.r);
  for (int v = 0; v < ctx.n; ++v) {
    const int i = ctx.comm[static_cast<std::size_t>(v)];
    cert.gamma(v) = cert.gamma_prime(v) + cert.delta(i);
    cert.nu(v) = ctx.E(v, i) - w * ctx.sizes[static_cast<std::size_t>(i)] + cert.gamma(v);
    for (int j = 0; j < ctx.r; ++j) {
      if (j != i) cert.R(v, j) = w * ctx.sizes[static_cast<std::size_t>(j)] - ctx.E(v, j) - cert.gamma(v);
    }
  }

  cert.T = Eigen::MatrixXd::Zero(ctx.r, ctx.r);
  for (int i = 0; i < ctx.r; ++i) {
    for (int j = 0; j < ctx.r; ++j) {
      if (i == j) continue;
      const double sij = pair_product(ctx.sizes[static_cast<std::size_t>(i)], ctx.sizes[static_cast<std::size_t>(j)]);
      cert.T(i, j) = w * sij - ctx.Etot(std::min(i, j), std::max(i, j)) - cert.c;
      if (!(cert.T(i, j) > 0.0) && cert.construction_ok) {
        cert.construction_ok = false;
        cert.construction_failure = "T(" + std::to_string(std::min(i, j)) + "," +
                                    std::to_string(std::max(i, j)) + ") = " +
                                    std::to_string(cert.T(i, j)) + " is not positive";
      }
    }
  }

  cert.Gamma = Eigen::MatrixXd::Zero(ctx.n, ctx.n);
  for (int v = 0; v < ctx.n; ++v) {
    const int j = ctx.comm[static_cast<std::size_t>(v)];
    for (int u = 0; u < ctx.n; ++u) {
      const int i = ctx.comm[static_cast<std::size_t>(u)];
      if (i == j || !(cert.T(i, j) > 0.0)) continue;
      cert.Gamma(u, v) = cert.R(u, j) * cert.R(v, i) / cert.T(i, j);
    }
  }

  const Eigen::MatrixXd adj = g.adjacency();
  cert.Lambda = -adj - cert.Gamma;
  cert.Lambda.array() += w;
  cert.Lambda.diagonal() += cert.nu;
  return cert;
}

DualCertificate build_certificate(const Graph& g, const PartitionLabels& truth,
                                  const PlantedPartitionParams& params) {
  return build_certificate(g, truth, CertificateInputs::from_params(params));
}

Eigen::MatrixXd complement_basis(const PartitionLabels& truth) {
  const int n = truth.num_vertices();
  const int r = truth.num_communities();
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n - r + 1);
  int col = 0;
  double inv_sum = 0.0;
  for (int i = 0; i < r; ++i) {
    const std::vector<int> mem = truth.members(i);
    for (std::size_t k = 1; k < mem.size(); ++k) {
      const double kk = static_cast<double>(k);
      const double scale = 1.0 / std::sqrt(kk * (kk + 1.0));
      for (std::size_t t = 0; t < k; ++t) basis(mem[t], col) = scale;
      basis(mem[k], col) = -kk * scale;
      ++col;
    }
    inv_sum += 1.0 / static_cast<double>(mem.size());
  }
  const double norm = std::sqrt(inv_sum);
  for (int v = 0; v < n; ++v) basis(v, col) = 1.0 / (truth.sizes()[static_cast<std::size_t>(truth[v])] * norm);
  return basis;
}

namespace {

Eigen::MatrixXd indicator(const PartitionLabels& truth) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(truth.num_vertices(), truth.num_communities());
  for (int v = 0; v < truth.num_vertices(); ++v) m(v, truth[v]) = 1.0;
  return m;
}

}  // namespace

CertificateReport verify_certificate(const Graph& g, const PartitionLabels& truth,
                                     const DualCertificate& cert) {
  CertificateReport rep;
  const int n = g.num_vertices();
  const int r = truth.num_communities();
  if (cert.n != n || truth.num_vertices() != n || cert.r != r || cert.Lambda.rows() != n ||
      cert.Gamma.rows() != n || cert.nu.size() != n) {
    rep.construction_failure = "certificate does not match graph and labels";
    return rep;
  }
  rep.construction_ok = cert.construction_ok;
  rep.construction_failure = cert.construction_failure;

  rep.interval_margin = (cert.beta - cert.alpha).minCoeff();
  rep.intervals_nonempty = rep.interval_margin >= 0.0;
  rep.nu_min = cert.nu.minCoeff();
  rep.nu_reference = log_ratio_term(n);

  const Eigen::MatrixXd adj = g.adjacency();
  Eigen::MatrixXd expected = -adj - cert.Gamma;
  expected.array() += cert.omega;
  expected.diagonal() += cert.nu;
  const double part_scale = std::max({1.0, cert.nu.cwiseAbs().maxCoeff(), cert.Gamma.cwiseAbs().maxCoeff(),
                                      std::abs(cert.omega)});
  rep.lambda_residual = (cert.Lambda - expected).cwiseAbs().maxCoeff();
  rep.lambda_consistent = rep.lambda_residual <= 1e-10 * part_scale;

  rep.R_min = std::numeric_limits<double>::infinity();
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < r; ++j) {
      if (j != truth[v]) rep.R_min = std::min(rep.R_min, cert.R(v, j));
    }
  }
  rep.R_positive = rep.R_min > 0.0;

  rep.gamma_symmetric = (cert.Gamma - cert.Gamma.transpose()).cwiseAbs().maxCoeff() <=
                        1e-12 * std::max(1.0, cert.Gamma.cwiseAbs().maxCoeff());
  rep.gamma_diagonal_blocks_zero = true;
  rep.gamma_off_block_min = std::numeric_limits<double>::infinity();
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (truth[u] == truth[v]) {
        if (cert.Gamma(u, v) != 0.0) rep.gamma_diagonal_blocks_zero = false;
      } else {
        rep.gamma_off_block_min = std::min(rep.gamma_off_block_min, cert.Gamma(u, v));
      }
    }
  }
  rep.gamma_off_blocks_positive = rep.gamma_off_block_min > 0.0;

  const Eigen::MatrixXd cols = cert.Lambda * indicator(truth);
  const double lambda_inf = cert.Lambda.cwiseAbs().rowwise().sum().maxCoeff();
  rep.kernel_residual = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      rep.kernel_residual = std::max(rep.kernel_residual, (cols.col(i) - cols.col(j)).cwiseAbs().maxCoeff());
    }
  }
  rep.kernel_tolerance = 1e-8 * (1.0 + lambda_inf);
  rep.kernel_ok = rep.kernel_residual <= rep.kernel_tolerance;

  const Eigen::MatrixXd sym = 0.5 * (cert.Lambda + cert.Lambda.transpose());
  const SymmetricEigen full = eigh(sym);
  rep.lambda_norm = std::max(std::abs(full.values(0)), std::abs(full.values(n - 1)));
  const Eigen::MatrixXd basis = complement_basis(truth);
  const Eigen::MatrixXd reduced = basis.transpose() * sym * basis;
  rep.psd_margin = min_eigenvalue(0.5 * (reduced + reduced.transpose()));
  rep.psd_tolerance = 1e-8 * rep.lambda_norm;
  rep.psd_ok = rep.psd_margin > rep.psd_tolerance;

  const double off = 1.0 / (r - 1);
  const Eigen::MatrixXd etot = community_edge_totals(g, truth);
  double a_x = 0.0;
  double j_x = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const double sij = pair_product(truth.sizes()[static_cast<std::size_t>(i)], truth.sizes()[static_cast<std::size_t>(j)]);
      a_x += i == j ? etot(i, j) : -off * etot(i, j);
      j_x += i == j ? sij : -off * sij;
    }
  }
  rep.primal_objective = a_x - cert.omega * j_x;
  rep.dual_objective = cert.nu.sum() + off * cert.Gamma.sum();
  rep.slackness_gap = std::abs(rep.primal_objective - rep.dual_objective);
  rep.slackness_tolerance = 1e-6 * std::max(1.0, n * std::log(static_cast<double>(n)));
  rep.slackness_ok = rep.slackness_gap <= rep.slackness_tolerance;

  rep.verified = rep.construction_ok && rep.lambda_consistent && rep.R_positive && rep.gamma_symmetric &&
                 rep.gamma_diagonal_blocks_zero && rep.gamma_off_blocks_positive && rep.kernel_ok &&
                 rep.psd_ok && rep.slackness_ok;
  return rep;
}

namespace {

IdentityCheck make_check(std::string name, double lhs, double rhs, double scale, double tol = 1e-9) {
  IdentityCheck chk;
  chk.name = std::move(name);
  chk.lhs = lhs;
  chk.rhs = rhs;
  chk.error = std::abs(lhs - rhs) / std::max(scale, std::numeric_limits<double>::min());
  chk.tolerance = tol;
  chk.pass = chk.error <= tol;
  return chk;
}

// Worst entry of a vector identity, relative to the largest |rhs|.
IdentityCheck vector_check(std::string name, const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs) {
  Eigen::Index worst = 0;
  (lhs - rhs).cwiseAbs().maxCoeff(&worst);
  return make_check(std::move(name), lhs(worst), rhs(worst), rhs.cwiseAbs().maxCoeff());
}

}  // namespace

std::vector<IdentityCheck> algebraic_identity_suite(const DualCertificate& cert, const Graph& g,
                                                    const PartitionLabels& truth) {
  const int n = g.num_vertices();
  const int r = truth.num_communities();
  if (cert.n != n || cert.r != r || truth.num_vertices() != n) {
    throw ParameterError("identity suite: certificate does not match graph and labels");
  }
  const auto& s = truth.sizes();
  double inv_sum = 0.0;
  for (int si : s) inv_sum += 1.0 / si;
  std::vector<IdentityCheck> out;

  Eigen::VectorXd y_prime(n);
  for (int v = 0; v < n; ++v) y_prime(v) = 1.0 / s[static_cast<std::size_t>(truth[v])];
  const Eigen::VectorXd y = y_prime / y_prime.norm();
  out.push_back(make_check("y^T Lambda y = c sum 1/s_i", y.dot(cert.Lambda * y), cert.c * inv_sum,
                           std::abs(cert.c * inv_sum)));

  out.push_back(vector_check("(Lambda y')_v = gamma_v sum 1/s_i", cert.Lambda * y_prime, cert.gamma * inv_sum));

  Eigen::VectorXd gamma_sums = Eigen::VectorXd::Zero(r);
  for (int v = 0; v < n; ++v) gamma_sums(truth[v]) += cert.gamma(v);
  out.push_back(vector_check("sum_{u in S_i} gamma_u = c", gamma_sums, Eigen::VectorXd::Constant(r, cert.c)));

  const Eigen::MatrixXd adj = g.adjacency();
  Eigen::VectorXd nu_lhs(n);
  Eigen::VectorXd nu_rhs(n);
  for (int v = 0; v < n; ++v) {
    const int i = truth[v];
    double e_vi = 0.0;
    for (int u : g.neighbors(v)) e_vi += truth[u] == i ? 1.0 : 0.0;
    nu_lhs(v) = cert.nu(v);
    nu_rhs(v) = e_vi - cert.omega * s[static_cast<std::size_t>(i)] + cert.gamma(v);
  }
  out.push_back(vector_check("nu_u = E(u,i) - omega s_i + gamma_u", nu_lhs, nu_rhs));

  {
    const int pairs = r * (r - 1);
    Eigen::VectorXd t_formula(pairs);
    Eigen::VectorXd t_rows(pairs);
    Eigen::VectorXd t_cols(pairs);
    const Eigen::MatrixXd etot = community_edge_totals(g, truth);
    int k = 0;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        if (i == j) continue;
        double rows = 0.0;
        double cols = 0.0;
        for (int v = 0; v < n; ++v) {
          if (truth[v] == i) rows += cert.R(v, j);
          if (truth[v] == j) cols += cert.R(v, i);
        }
        t_formula(k) = cert.omega * s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] - etot(i, j) - cert.c;
        t_rows(k) = rows;
        t_cols(k) = cols;
        ++k;
      }
    }
    out.push_back(vector_check("sum_{u in S_i} R_uj = omega s_i s_j - E(i,j) - c", t_rows, t_formula));
    out.push_back(vector_check("sum_{u in S_i} R_uj = sum_{v in S_j} R_vi", t_rows, t_cols));
  }

  Eigen::VectorXd row_lhs(n * (r - 1));
  Eigen::VectorXd row_rhs(n * (r - 1));
  {
    const Eigen::MatrixXd block_sums = cert.Gamma * indicator(truth);
    int k = 0;
    for (int v = 0; v < n; ++v) {
      for (int j = 0; j < r; ++j) {
        if (j == truth[v]) continue;
        row_lhs(k) = block_sums(v, j);
        row_rhs(k) = cert.R(v, j);
        ++k;
      }
    }
  }
  out.push_back(vector_check("sum_{v in S_j} Gamma_uv = R_uj", row_lhs, row_rhs));

  double worst_ratio = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      const std::vector<int> mi = truth.members(i);
      const std::vector<int> mj = truth.members(j);
      Eigen::MatrixXd block(mi.size(), mj.size());
      for (std::size_t a = 0; a < mi.size(); ++a) {
        for (std::size_t b = 0; b < mj.size(); ++b) block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cert.Gamma(mi[a], mj[b]);
      }
      if (block.rows() < 2 || block.cols() < 2) continue;
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
      const Eigen::VectorXd sv = svd.singularValues();
      if (sv(0) > 0.0) worst_ratio = std::max(worst_ratio, sv(1) / sv(0));
    }
  }
  out.push_back(make_check("Gamma off-diagonal blocks have rank one", worst_ratio, 0.0, 1.0));
  return out;
}

IntervalMargins interval_margins(const Graph& g, const PartitionLabels& truth,
                                 const CertificateInputs& inputs) {
  const Context ctx = make_context(g, truth);
  Resolved res = resolve(ctx, inputs);
  IntervalMargins out;
  out.alpha = std::move(res.pass.alpha);
  out.beta = std::move(res.pass.beta);
  out.margin = out.beta - out.alpha;
  Eigen::Index arg = 0;
  out.min_margin = out.margin.minCoeff(&arg);
  out.argmin = static_cast<int>(arg);
  out.eps1 = res.eps1;
  out.eps2 = res.eps2;
  return out;
}

IntervalMargins interval_margins(const Graph& g, const PartitionLabels& truth,
                                 const PlantedPartitionParams& params) {
  return interval_margins(g, truth, CertificateInputs::from_params(params));
}

}  // namespace ppm

#include <cmath>

#include "doctest.h"
#include "ppmsdp/certificate.hpp"
#include "ppmsdp/error.hpp"
#include "ppmsdp/linalg.hpp"
#include "ppmsdp/oracle.hpp"
#include "ppmsdp/sdp.hpp"
#include "ppmsdp/thresholds.hpp"
#include "test_support.hpp"

using namespace ppm;

namespace {

// D = (sqrt p - sqrt q)^2 / 2 for two equal communities.
double p_tilde_for(double divergence, double q_tilde) {
  return std::pow(std::sqrt(2 * divergence) + std::sqrt(q_tilde), 2);
}

}  // namespace

TEST_CASE("two disjoint K4 cliques") {
  const Graph g = test::disjoint_cliques({4, 4});
  const PartitionLabels truth = PartitionLabels::from_sizes(std::vector<int>{4, 4});
  const DualCertificate cert = build_certificate(g, truth, CertificateInputs{0.5, 1 - 1e-9, 1e-9, std::nullopt});
  const Eigen::MatrixXd e = vertex_community_edges(g, truth);
  for (int v = 0; v < 8; ++v) {
    CHECK(e(v, truth[v]) == 3);
    CHECK(e(v, 1 - truth[v]) == 0);
  }
  for (int v = 1; v < 4; ++v) {
    CHECK(cert.gamma_prime(v) == doctest::Approx(cert.gamma_prime(0)).epsilon(1e-14));
    CHECK(cert.gamma_prime(4 + v) == doctest::Approx(cert.gamma_prime(4)).epsilon(1e-14));
  }
  CHECK(cert.delta(0) == doctest::Approx(cert.delta(1)).epsilon(1e-12));
  Eigen::VectorXd diff(8);
  diff << 1, 1, 1, 1, -1, -1, -1, -1;
  CHECK((cert.Lambda * diff).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("construction identities hold to machine precision") {
  const auto prm = test::params(200, {0.5, 0.3, 0.2}, 25, 3);
  const PlantedSample s = sample_ppm(prm, 4);
  const DualCertificate cert = build_certificate(s.graph, s.truth, prm);
  REQUIRE(cert.construction_ok);
  const int n = 200, r = 3;
  const Eigen::MatrixXd e = vertex_community_edges(s.graph, s.truth);
  const Eigen::MatrixXd et = community_edge_totals(s.graph, s.truth);

  // Lambda assembled from its parts.
  Eigen::MatrixXd lambda = -s.graph.adjacency() - cert.Gamma;
  lambda.array() += cert.omega;
  lambda.diagonal() += cert.nu;
  CHECK((lambda - cert.Lambda).cwiseAbs().maxCoeff() < 1e-10 * (1 + cert.Lambda.cwiseAbs().maxCoeff()));

  Eigen::VectorXd gamma_sum = Eigen::VectorXd::Zero(r);
  for (int v = 0; v < n; ++v) {
    const int i = s.truth[v];
    gamma_sum(i) += cert.gamma(v);
    CHECK(cert.nu(v) == doctest::Approx(e(v, i) - cert.omega * cert.sizes[i] + cert.gamma(v)).epsilon(1e-12));
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      CHECK(cert.R(v, j) == doctest::Approx(cert.omega * cert.sizes[j] - e(v, j) - cert.gamma(v)).epsilon(1e-12));
    }
  }
  for (int i = 0; i < r; ++i) CHECK(gamma_sum(i) == doctest::Approx(cert.c).epsilon(1e-12));

  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (i == j) continue;
      const double t = cert.omega * cert.sizes[i] * cert.sizes[j] - et(i, j) - cert.c;
      CHECK(cert.T(i, j) == doctest::Approx(t).epsilon(1e-12));
      double ri = 0, rj = 0;
      for (int u : s.truth.members(i)) ri += cert.R(u, j);
      for (int v : s.truth.members(j)) rj += cert.R(v, i);
      CHECK(ri == doctest::Approx(rj).epsilon(1e-12));
      CHECK(ri == doctest::Approx(t).epsilon(1e-12));
    }
  }

  // Gamma rows restricted to a block sum to R.
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < r; ++j) {
      double row = 0;
      for (int u : s.truth.members(j)) row += cert.Gamma(v, u);
      CHECK(row == doctest::Approx(s.truth[v] == j ? 0.0 : cert.R(v, j)).epsilon(1e-12).scale(1.0));
    }
  }

  // Off-diagonal blocks have rank one.
  const auto m0 = s.truth.members(0), m1 = s.truth.members(1);
  Eigen::MatrixXd block(m0.size(), m1.size());
  for (std::size_t a = 0; a < m0.size(); ++a) {
    for (std::size_t b = 0; b < m1.size(); ++b) block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cert.Gamma(m0[a], m1[b]);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  CHECK(svd.singularValues()(1) < 1e-9 * svd.singularValues()(0));

  for (const IdentityCheck& chk : algebraic_identity_suite(cert, s.graph, s.truth)) {
    CAPTURE(chk.name);
    CHECK(chk.pass);
    CHECK(chk.error < 1e-9);
  }
}

TEST_CASE("quadratic form identities checked independently") {
  const auto prm = test::params(200, {0.6, 0.4}, 20, 3);
  const PlantedSample s = sample_ppm(prm, 9);
  const DualCertificate cert = build_certificate(s.graph, s.truth, prm);
  Eigen::VectorXd yp(200);
  double inv_sum = 0;
  for (int sz : cert.sizes) inv_sum += 1.0 / sz;
  for (int v = 0; v < 200; ++v) yp(v) = 1.0 / cert.sizes[static_cast<std::size_t>(s.truth[v])];
  CHECK(yp.squaredNorm() == doctest::Approx(inv_sum).epsilon(1e-12));
  const Eigen::VectorXd y = yp.normalized();
  CHECK(y.dot(cert.Lambda * y) == doctest::Approx(cert.c * inv_sum).epsilon(1e-9));
  const Eigen::VectorXd ly = cert.Lambda * yp;
  for (int v = 0; v < 200; ++v) CHECK(ly(v) == doctest::Approx(cert.gamma(v) * inv_sum).epsilon(1e-9));
}

TEST_CASE("complement basis is orthonormal and orthogonal to community differences") {
  const PartitionLabels truth({0, 1, 2, 0, 1, 2, 2, 0, 0}, 3);
  const Eigen::MatrixXd p = complement_basis(truth);
  CHECK(p.rows() == 9);
  CHECK(p.cols() == 9 - 3 + 1);
  CHECK((p.transpose() * p - Eigen::MatrixXd::Identity(p.cols(), p.cols())).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(9);
      for (int v : truth.members(i)) d(v) = 1;
      for (int v : truth.members(j)) d(v) = -1;
      CHECK((p.transpose() * d).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("certificate verifies in most seeds at divergence two") {
  const auto prm = test::params(200, {0.5, 0.5}, p_tilde_for(2.0, 2.0), 2.0);
  CHECK(feasibility_report(prm).min_value == doctest::Approx(2.0).epsilon(1e-12));
  int verified = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PlantedSample s = sample_ppm(prm, seed);
    const CertificateReport rep = verify_certificate(s.graph, s.truth, build_certificate(s.graph, s.truth, prm));
    verified += rep.verified ? 1 : 0;
    if (rep.verified) {
      CHECK(rep.slackness_gap < 1e-6 * 200 * std::log(200.0));
      CHECK(rep.kernel_ok);
      CHECK(rep.psd_margin > 0);
    }
  }
  CHECK(verified >= 18);
}

TEST_CASE("omega below q breaks the certificate without throwing") {
  const auto prm = test::params(200, {0.5, 0.5}, 14, 2);
  const PlantedSample s = sample_ppm(prm, 3);
  const CertificateInputs in{prm.q() / 2, prm.p(), prm.q(), std::nullopt};
  const DualCertificate cert = build_certificate(s.graph, s.truth, in);
  const CertificateReport rep = verify_certificate(s.graph, s.truth, cert);
  CHECK_FALSE(rep.verified);
  CHECK((!rep.construction_ok || !rep.R_positive));
}

TEST_CASE("injected faults are detected") {
  const auto prm = test::params(150, {0.5, 0.5}, 20, 2);
  const PlantedSample s = sample_ppm(prm, 7);
  const DualCertificate good = build_certificate(s.graph, s.truth, prm);
  REQUIRE(verify_certificate(s.graph, s.truth, good).verified);

  DualCertificate neg = good;
  neg.Gamma(0, 149) = neg.Gamma(149, 0) = -1.0;
  neg.Lambda(0, 149) = neg.Lambda(149, 0) = good.Lambda(0, 149) - (-1.0 - good.Gamma(0, 149));
  const CertificateReport rn = verify_certificate(s.graph, s.truth, neg);
  CHECK_FALSE(rn.gamma_off_blocks_positive);
  CHECK_FALSE(rn.verified);

  DualCertificate bump = good;
  bump.nu(3) += 1.0;
  bump.Lambda(3, 3) += 1.0;
  const CertificateReport rb = verify_certificate(s.graph, s.truth, bump);
  CHECK_FALSE(rb.kernel_ok);
  CHECK_FALSE(rb.verified);

  DualCertificate diag = good;
  diag.Gamma(0, 1) = diag.Gamma(1, 0) = 0.5;
  CHECK_FALSE(verify_certificate(s.graph, s.truth, diag).gamma_diagonal_blocks_zero);
}

TEST_CASE("builder rejects malformed inputs") {
  const Graph g = test::disjoint_cliques({3, 3});
  CHECK_THROWS_AS(build_certificate(g, PartitionLabels({0, 0, 0, 0, 0, 0}, 1), CertificateInputs{0.5, 0.9, 0.1, {}}),
                  ParameterError);
  CHECK_THROWS_AS(build_certificate(g, PartitionLabels::from_sizes(std::vector<int>{2, 2}), CertificateInputs{0.5, 0.9, 0.1, {}}),
                  ParameterError);
}

TEST_CASE("interval margins on a complete-within graph") {
  const std::vector<int> sizes{6, 5, 4};
  const Graph g = test::disjoint_cliques(sizes);
  const PartitionLabels truth = PartitionLabels::from_sizes(sizes);
  const CertificateInputs in{0.4, 0.9, 0.05, std::nullopt};
  const IntervalMargins m = interval_margins(g, truth, in);
  for (int v = 0; v < 15; ++v) {
    const int i = truth[v];
    int smin = 1 << 30;
    for (int j = 0; j < 3; ++j) {
      if (j != i) smin = std::min(smin, sizes[static_cast<std::size_t>(j)]);
    }
    const int si = sizes[static_cast<std::size_t>(i)];
    const double expected = in.omega * smin - in.omega * (si - 1) + (si - 1) - m.eps1 - m.eps2;
    CHECK(m.margin(v) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("interval margins track the divergence") {
  const auto weak = test::params(300, {0.5, 0.5}, p_tilde_for(0.5, 2.0), 2.0);
  const auto strong = test::params(300, {0.5, 0.5}, p_tilde_for(3.0, 2.0), 2.0);
  int weak_negative = 0, strong_positive = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PlantedSample a = sample_ppm(weak, seed);
    weak_negative += interval_margins(a.graph, a.truth, weak).min_margin < 0 ? 1 : 0;
    const PlantedSample b = sample_ppm(strong, seed);
    strong_positive += interval_margins(b.graph, b.truth, strong).min_margin > 0 ? 1 : 0;
  }
  CHECK(weak_negative >= 10);
  CHECK(strong_positive >= 19);
}

TEST_CASE("interval centres bracket c at strong parameters") {
  for (int n : {100, 200, 400}) {
    const auto prm = test::params(n, {0.5, 0.5}, 12, 1);
    const PlantedSample s = sample_ppm(prm, 1);
    const DualCertificate cert = build_certificate(s.graph, s.truth, prm);
    for (int i = 0; i < 2; ++i) {
      CAPTURE(n);
      CHECK(cert.alpha_bar(i) < 0);
      CHECK(cert.c > 0);
      CHECK(cert.c < cert.beta_bar(i));
    }
  }
}

TEST_CASE("a verified certificate agrees with the solver") {
  const auto prm = test::params(200, {0.5, 0.3, 0.2}, 25, 2);
  const double omega = regime_constants(prm).omega;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const PlantedSample s = sample_ppm(prm, seed);
    const CertificateReport rep = verify_certificate(s.graph, s.truth, build_certificate(s.graph, s.truth, prm));
    if (!rep.verified) continue;
    ++checked;
    const SdpSolution sol = solve(build_unknown_sizes(s.graph, 3, omega));
    REQUIRE(sol.converged);
    const RoundResult rr = round_to_partition(sol.X, 3);
    REQUIRE(rr.ok());
    CHECK(same_partition(*rr.labels, s.truth));
    const double truth_obj = objective_value(s.graph, centered_partition_matrix(s.truth), omega);
    CHECK(std::abs(sol.objective - truth_obj) <= 1e-4 * std::max(1.0, std::abs(truth_obj)));
    CHECK(rep.primal_objective == doctest::Approx(truth_obj).epsilon(1e-12));
  }
  CHECK(checked >= 2);
}

TEST_CASE("verified tiny instances have a strictly maximal truth") {
  SplitMix64 rng(55);
  int verified = 0;
  for (int k = 0; k < 60; ++k) {
    const int n = 8 + static_cast<int>(rng.below(5));
    const int r = 2 + static_cast<int>(rng.below(2));
    const PartitionLabels truth = test::random_labels(rng, n, r);
    const double p = 0.9, q = 0.05;
    const Graph g = sample_planted_partition(truth, p, q, rng());
    const CertificateInputs in{compute_omega(p, q), p, q, std::nullopt};
    if (truth.num_communities() < 2) continue;
    const CertificateReport rep = verify_certificate(g, truth, build_certificate(g, truth, in));
    if (!rep.verified) continue;
    ++verified;
    const MleResult mle = mle_unknown_sizes(g, r, in.omega);
    CHECK(mle.is_unique);
    CHECK(same_partition(mle.best, truth));
  }
  MESSAGE("verified tiny instances: " << verified);
}

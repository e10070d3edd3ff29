#include "graphext/airy.hpp"

#include <cmath>

namespace graphext {

namespace {

constexpr int kB = 3;  // trace block size

Index trace_cols(const MetricGraphSpec& g) { return 3 * Index(g.point_count()); }

// Selector rows picking components (point, comp) of the canonical trace.
RealMatrix selector(const MetricGraphSpec& g,
                    const std::vector<std::pair<int, int>>& entries) {
  RealMatrix s = RealMatrix::Zero(Index(entries.size()), trace_cols(g));
  for (Index r = 0; r < Index(entries.size()); ++r)
    s(r, entries[r].first * kB + entries[r].second) = 1.0;
  return s;
}

RealMatrix block_selector(const MetricGraphSpec& g, const std::vector<int>& points) {
  std::vector<std::pair<int, int>> entries;
  for (int p : points)
    for (int c = 0; c < kB; ++c) entries.emplace_back(p, c);
  return selector(g, entries);
}

RealMatrix block_diag(const std::vector<RealMatrix>& blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  RealMatrix d = RealMatrix::Zero(n, n);
  Index at = 0;
  for (const auto& b : blocks) {
    d.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return d;
}

// Replication matrix C^m -> C^{copies*m}.
RealMatrix replicate(Index m, int copies) {
  RealMatrix r = RealMatrix::Zero(m * copies, m);
  for (int c = 0; c < copies; ++c) r.block(Index(c) * m, 0, m, m).setIdentity();
  return r;
}

Complex bracket(const RealMatrix& B, const Vector& du, const Vector& dv) {
  return dv.dot(B.cast<Complex>() * du);  // (B du | dv), dot conjugates dv
}

Vector point_block(const TraceVector& t, int p) {
  return t.values.segment(Index(p) * kB, kB);
}

}  // namespace

RealMatrix b_block(Real alpha, Real beta) {
  if (alpha == 0.0) throw std::invalid_argument("degenerate Airy edge");
  RealMatrix b(3, 3);
  b << beta, 0, alpha, 0, -alpha, 0, alpha, 0, 0;
  return b;
}

const char* to_string(AiryFrameKind k) {
  switch (k) {
    case AiryFrameKind::EvenPaired: return "even_paired";
    case AiryFrameKind::Replicated: return "replicated";
    default: return "derivative_split";
  }
}

AiryFrame build_frame(const MetricGraphSpec& g, AiryFrameKind kind) {
  g.require_airy_coefficients();
  const int N = g.N();
  switch (kind) {
    case AiryFrameKind::EvenPaired: {
      if (N % 2 != 0) throw std::invalid_argument("frame inapplicable: N must be even");
      for (int j = 1; j <= N; ++j) {
        const bool odd = j % 2 == 1;
        if ((odd && !(g.alpha(j) > 0)) || (!odd && !(g.alpha(j) < 0)))
          throw std::invalid_argument("frame inapplicable: need alpha > 0 on odd and < 0 on even half-lines");
      }
      std::vector<RealMatrix> plus{b_block(g.alpha(0), g.beta(0))};
      std::vector<RealMatrix> minus{b_block(g.alpha(0), g.beta(0))};
      std::vector<int> in_pts{0}, out_pts{1};
      for (int j = 1; j <= N; ++j) {
        if (j % 2 == 1) {
          plus.push_back(b_block(g.alpha(j), g.beta(j)));
          in_pts.push_back(1 + j);
        } else {
          minus.push_back(-b_block(g.alpha(j), g.beta(j)));
          out_pts.push_back(1 + j);
        }
      }
      return AiryFrame{kind, g, IndefiniteForm(block_diag(plus)),
                       IndefiniteForm(block_diag(minus)),
                       block_selector(g, in_pts), block_selector(g, out_pts),
                       {}, {}, {}, {}, {}};
    }
    case AiryFrameKind::Replicated: {
      std::vector<RealMatrix> c1{b_block(g.alpha(0), g.beta(0))};
      std::vector<int> in_pts{0};
      for (int j = 1; j <= N; ++j) {
        c1.push_back(b_block(g.alpha(j), g.beta(j)));
        in_pts.push_back(1 + j);
      }
      std::vector<RealMatrix> c0(N + 1, b_block(g.alpha(0), g.beta(0)) / Real(N + 1));
      RealMatrix out = replicate(3, N + 1) * block_selector(g, {1});
      return AiryFrame{kind, g, IndefiniteForm(block_diag(c1)),
                       IndefiniteForm(block_diag(c0)),
                       block_selector(g, in_pts), out, {}, {}, {}, {}, {}};
    }
    case AiryFrameKind::DerivativeSplit:
    default: {
      RealVector aplus(N + 1);
      aplus(0) = g.alpha(0);
      for (int j = 1; j <= N; ++j) aplus(j) = g.alpha(j);
      RealMatrix dplus = aplus.asDiagonal();
      RealMatrix dminus =
          (g.alpha(0) / Real(N + 1)) * RealMatrix::Identity(N + 1, N + 1);

      std::vector<std::pair<int, int>> in_first{{0, 1}};
      for (int j = 1; j <= N; ++j) in_first.emplace_back(1 + j, 1);
      RealMatrix s_in = selector(g, in_first);
      RealMatrix s_out = replicate(1, N + 1) * selector(g, {{1, 1}});

      std::vector<std::pair<int, int>> vals{{0, 0}, {1, 0}}, firsts{{0, 1}, {1, 1}},
          seconds{{0, 2}, {1, 2}};
      for (int j = 1; j <= N; ++j) {
        vals.emplace_back(1 + j, 0);
        firsts.emplace_back(1 + j, 1);
        seconds.emplace_back(1 + j, 2);
      }
      RealVector da(N + 2), db(N + 2);
      da(0) = g.alpha(0);
      da(1) = -g.alpha(0);
      db(0) = g.beta(0);
      db(1) = -g.beta(0);
      for (int j = 1; j <= N; ++j) {
        da(1 + j) = g.alpha(j);
        db(1 + j) = g.beta(j);
      }
      return AiryFrame{kind, g, IndefiniteForm(dplus), IndefiniteForm(dminus),
                       s_in, s_out, selector(g, vals), selector(g, firsts),
                       selector(g, seconds), RealMatrix(da.asDiagonal()),
                       RealMatrix(db.asDiagonal())};
    }
  }
}

Complex boundary_form_airy(const TraceVector& U, const TraceVector& V,
                           const MetricGraphSpec& g) {
  if (U.order != OperatorOrder::Airy3 || V.order != OperatorOrder::Airy3)
    throw std::invalid_argument("boundary_form_airy: Airy3 traces required");
  if (U.values.size() != trace_cols(g) || V.values.size() != trace_cols(g))
    throw std::invalid_argument("boundary_form_airy: trace length mismatch");
  const RealMatrix b0 = b_block(g.alpha(0), g.beta(0));
  Complex form = bracket(b0, point_block(U, 0), point_block(V, 0)) -
                 bracket(b0, point_block(U, 1), point_block(V, 1));
  for (int j = 1; j <= g.N(); ++j)
    form += bracket(b_block(g.alpha(j), g.beta(j)), point_block(U, 1 + j),
                    point_block(V, 1 + j));
  return form;
}

Complex boundary_form_airy_split(const TraceVector& U, const TraceVector& V,
                                 const MetricGraphSpec& g) {
  const AiryFrame fr = build_frame(g, AiryFrameKind::DerivativeSplit);
  auto pick = [&](const RealMatrix& sel, const TraceVector& t) {
    return Vector(sel.cast<Complex>() * t.values);
  };
  const Vector u = pick(fr.value_selector, U), v = pick(fr.value_selector, V);
  const Vector u1 = pick(fr.dfirst_selector, U), v1 = pick(fr.dfirst_selector, V);
  const Vector u2 = pick(fr.dsecond_selector, U), v2 = pick(fr.dsecond_selector, V);
  const Matrix da = fr.d_alpha.cast<Complex>(), db = fr.d_beta.cast<Complex>();
  return v.dot(db * u) + v.dot(da * u2) + v2.dot(da * u) - v1.dot(da * u1);
}

Matrix constraint_matrix(const AiryExtensionSpec& spec) {
  if (const auto* mc = std::get_if<MatrixCoupling>(&spec.coupling)) {
    const AiryFrame fr = build_frame(spec.graph, mc->frame);
    if (mc->L.rows() != fr.output_selector.rows() || mc->L.cols() != fr.input_selector.rows())
      throw std::invalid_argument("constraint_matrix: coupling matrix does not fit the frame");
    return mc->L * fr.input_selector.cast<Complex>() -
           fr.output_selector.cast<Complex>();
  }
  const auto& mx = std::get<MixedCoupling>(spec.coupling);
  const AiryFrame fr = build_frame(spec.graph, AiryFrameKind::DerivativeSplit);
  const Index npts = spec.graph.point_count();
  if (mx.Y.rows() != npts) throw std::invalid_argument("constraint_matrix: Y basis rows must be N+2");
  if (mx.L.rows() != npts - 1 || mx.L.cols() != npts - 1)
    throw std::invalid_argument("constraint_matrix: coupling matrix must be (N+1) square");
  Eigen::HouseholderQR<Matrix> qr(mx.Y);
  Matrix qfull = qr.householderQ();
  Matrix qy = qfull.leftCols(mx.Y.cols());
  Matrix qperp = qfull.rightCols(npts - mx.Y.cols());

  const Matrix v = fr.value_selector.cast<Complex>();
  const Matrix v2 = fr.dsecond_selector.cast<Complex>();
  const Matrix da = fr.d_alpha.cast<Complex>(), db = fr.d_beta.cast<Complex>();

  Matrix rows(npts - mx.Y.cols() + mx.Y.cols() + (npts - 1), trace_cols(spec.graph));
  Index at = 0;
  rows.middleRows(at, qperp.cols()) = qperp.adjoint() * v;  // U in Y
  at += qperp.cols();
  rows.middleRows(at, qy.cols()) = qy.adjoint() * (da * v2 + 0.5 * db * v);  // in Y^perp
  at += qy.cols();
  rows.middleRows(at, npts - 1) =
      mx.L * fr.input_selector.cast<Complex>() - fr.output_selector.cast<Complex>();
  return rows;
}

namespace {

// Largest eigenvalue of Herm(L^* Hc L - Hd) restricted to {x : Lx in range(R)}
// (forward) or of Herm((L#)^* Hd L# - Hc) restricted to range(R) (adjoint).
struct ReplicatedChecks {
  Real forward_restricted;
  Real adjoint_restricted;
  Real forward_full;
};

ReplicatedChecks replicated_contraction_eigenvalues(const FramedOperator& op,
                                                    const RealMatrix& rep) {
  Matrix diff = op.L.adjoint() * op.codomain_form.matrix() * op.L - op.domain_form.matrix();
  diff = Matrix(0.5 * (diff + diff.adjoint()));
  // preimage {x : Lx in range(rep)} = ker(Pperp L)
  Matrix repc = rep.cast<Complex>();
  Eigen::HouseholderQR<Matrix> qr(repc);
  Matrix q = qr.householderQ() * Matrix::Identity(repc.rows(), repc.cols());
  Matrix pperp = Matrix::Identity(repc.rows(), repc.rows()) - q * q.adjoint();
  Matrix pre = null_space(Matrix(pperp * op.L));

  const FramedOperator sharp = krein_adjoint(op);
  Matrix diff_sharp =
      sharp.L.adjoint() * sharp.codomain_form.matrix() * sharp.L - sharp.domain_form.matrix();
  diff_sharp = Matrix(0.5 * (diff_sharp + diff_sharp.adjoint()));

  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return ReplicatedChecks{restricted_max_eigenvalue(diff, pre),
                          restricted_max_eigenvalue(diff_sharp, repc),
                          es.eigenvalues().maxCoeff()};
}

}  // namespace

ClassificationReport classify_airy(const AiryExtensionSpec& spec, Real tol_unitary,
                                   Real tol_psd) {
  ClassificationReport rep;
  rep.tol_unitary = tol_unitary;
  rep.tol_psd = tol_psd;

  if (const auto* mc = std::get_if<MatrixCoupling>(&spec.coupling)) {
    AiryFrame fr = build_frame(spec.graph, mc->frame);
    rep.frame = to_string(fr.kind);
    if (fr.kind == AiryFrameKind::EvenPaired) {
      FramedOperator op(mc->L, fr.domain_form, fr.codomain_form);
      const UnitaryCheck uc = is_krein_unitary(op, tol_unitary);
      rep.certificates.push_back({"gram_residual", uc.residual, tol_unitary, uc.unitary});
      rep.verdict = uc.unitary ? Verdict::SkewSelfAdjoint : Verdict::Neither;
      return rep;
    }
    if (fr.kind == AiryFrameKind::Replicated) {
      FramedOperator op(mc->L, fr.domain_form, fr.codomain_form);
      const RealMatrix rep_basis =
          replicate(3, spec.graph.N() + 1) / std::sqrt(Real(spec.graph.N() + 1));
      const ReplicatedChecks ev = replicated_contraction_eigenvalues(op, rep_basis);
      const Real thr_f = tol_psd * (1.0 + fr.domain_form.operator_norm());
      const Real thr_a = tol_psd * (1.0 + fr.codomain_form.operator_norm());
      rep.certificates.push_back(
          {"forward_restricted_max_eig", ev.forward_restricted, thr_f, ev.forward_restricted <= thr_f});
      rep.certificates.push_back(
          {"adjoint_restricted_max_eig", ev.adjoint_restricted, thr_a, ev.adjoint_restricted <= thr_a});
      rep.certificates.push_back(
          {"forward_full_max_eig", ev.forward_full, thr_f, ev.forward_full <= thr_f});
      const bool ok = ev.forward_restricted <= thr_f && ev.adjoint_restricted <= thr_a;
      rep.verdict = ok ? Verdict::ContractionGenerator : Verdict::Neither;
      return rep;
    }
    // Pure first-derivative coupling in the derivative-separating frame.
    FramedOperator op(mc->L, fr.domain_form, fr.codomain_form);
    const ContractionCheck fwd = is_krein_contraction(op, tol_psd);
    const ContractionCheck adj = is_krein_contraction(krein_adjoint(op), tol_psd);
    rep.certificates.push_back({"forward_max_eig", fwd.max_eigenvalue,
                                tol_psd * (1 + fr.domain_form.operator_norm()), fwd.contraction});
    rep.certificates.push_back({"adjoint_max_eig", adj.max_eigenvalue,
                                tol_psd * (1 + fr.codomain_form.operator_norm()), adj.contraction});
    rep.verdict = fwd.contraction && adj.contraction ? Verdict::ContractionGenerator
                                                     : Verdict::Neither;
    return rep;
  }

  const auto& mx = std::get<MixedCoupling>(spec.coupling);
  AiryFrame fr = build_frame(spec.graph, AiryFrameKind::DerivativeSplit);
  rep.frame = to_string(fr.kind);
  FramedOperator op(mx.L, fr.domain_form, fr.codomain_form);
  const ContractionCheck fwd = is_krein_contraction(op, tol_psd);
  const ContractionCheck adj = is_krein_contraction(krein_adjoint(op), tol_psd);
  rep.certificates.push_back({"forward_max_eig", fwd.max_eigenvalue,
                              tol_psd * (1 + fr.domain_form.operator_norm()), fwd.contraction});
  rep.certificates.push_back({"adjoint_max_eig", adj.max_eigenvalue,
                              tol_psd * (1 + fr.codomain_form.operator_norm()), adj.contraction});
  rep.verdict =
      fwd.contraction && adj.contraction ? Verdict::ContractionGenerator : Verdict::Neither;
  return rep;
}

MembershipResult domain_membership_airy(const AiryExtensionSpec& spec,
                                        const TraceVector& U, Real tol) {
  const Matrix c = constraint_matrix(spec);
  if (U.values.size() != c.cols())
    throw std::invalid_argument("domain_membership_airy: trace length mismatch");
  const Real residual = (c * U.values).lpNorm<Eigen::Infinity>();
  const Real scale = 1.0 + U.values.lpNorm<Eigen::Infinity>();
  return MembershipResult{residual <= tol * scale, residual};
}

namespace {

std::vector<Complex> cubic_roots(Real alpha, Real beta, Real constant) {
  // roots of alpha x^3 + beta x + constant as eigenvalues of the companion
  // matrix of x^3 + c1 x + c0, last column (-c0, -c1, -c2)
  RealMatrix comp = RealMatrix::Zero(3, 3);
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  comp(0, 2) = -(constant / alpha);
  comp(1, 2) = -(beta / alpha);
  Eigen::EigenSolver<RealMatrix> es(comp);
  std::vector<Complex> roots;
  for (Index i = 0; i < 3; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

}  // namespace

DeficiencyReport airy_deficiency(const MetricGraphSpec& g) {
  g.require_airy_coefficients();
  DeficiencyReport rep;
  rep.d_minus = 3;  // loop: every exponential is square integrable
  rep.d_plus = 3;
  rep.roots_minus.push_back(cubic_roots(g.alpha(0), g.beta(0), -1.0));
  rep.roots_plus.push_back(cubic_roots(g.alpha(0), g.beta(0), +1.0));
  for (int j = 1; j <= g.N(); ++j) {
    for (int sign = 0; sign < 2; ++sign) {
      const Real constant = sign == 0 ? -1.0 : +1.0;
      auto roots = cubic_roots(g.alpha(j), g.beta(j), constant);
      int decaying = 0;
      for (const Complex& r : roots) {
        if (std::abs(r.real()) < 1e-10)
          throw std::invalid_argument("boundary-case coefficients");
        if (r.real() < 0) ++decaying;
      }
      if (sign == 0) {
        rep.roots_minus.push_back(roots);
        rep.d_minus += decaying;
      } else {
        rep.roots_plus.push_back(roots);
        rep.d_plus += decaying;
      }
    }
  }
  return rep;
}

// --- factories ---------------------------------------------------------------

MetricGraphSpec paired_sign_graph(int k, Real a, Real L) {
  std::vector<EdgeCoefficients> coeff{{a, a}};
  for (int j = 1; j <= 2 * k; ++j) {
    const Real s = (j % 2 == 1) ? a : -a;
    coeff.push_back({s, s});
  }
  return MetricGraphSpec(Topology::LoopingEdge, L, 2 * k, std::move(coeff));
}

Matrix delta_z_block(Real z) {
  Matrix d(3, 3);
  d << 1, 0, 0, z, 1, 0, z * z / 2, z, 1;
  return d;
}

AiryExtensionSpec airy_delta_spec(const MetricGraphSpec& graph, Real z) {
  const int k = graph.N() / 2;
  Matrix L = Matrix::Zero(3 * (k + 1), 3 * (k + 1));
  for (int b = 0; b <= k; ++b) L.block(3 * b, 3 * b, 3, 3) = delta_z_block(z);
  return AiryExtensionSpec{graph, MatrixCoupling{AiryFrameKind::EvenPaired, L},
                           +1, "airy_delta_z", false};
}

AiryExtensionSpec airy_delta_exchange_spec(const MetricGraphSpec& graph, Real z, Real m) {
  if (graph.N() != 2) throw std::invalid_argument("airy_delta_exchange_spec: needs N = 2");
  Matrix L = Matrix::Zero(6, 6);
  L.block(0, 0, 3, 3) = delta_z_block(z);
  L.block(3, 3, 3, 3) = delta_z_block(z);
  L(2, 3) = m;
  L(5, 0) = -m;
  return AiryExtensionSpec{graph, MatrixCoupling{AiryFrameKind::EvenPaired, L},
                           +1, "airy_delta_exchange", false};
}

AiryExtensionSpec airy_derivative_swap_spec(const MetricGraphSpec& graph, Real m1, Real m2) {
  if (graph.N() != 2) throw std::invalid_argument("airy_derivative_swap_spec: needs N = 2");
  Matrix L(6, 6);
  L << 1, 0, 0, 0, 0, 0,
       0, 0, 0, m1, 1, 0,
       0, 0, 1, m2, 0, 0,
       0, 0, 0, 1, 0, 0,
       0, 1, 0, 0, 0, 0,
       -m2, 0, 0, m1 * m1 / 2, m1, 1;
  return AiryExtensionSpec{graph, MatrixCoupling{AiryFrameKind::EvenPaired, L},
                           +1, "airy_derivative_swap", false};
}

AiryExtensionSpec airy_four_parameter_spec(const MetricGraphSpec& graph, Real m1,
                                           Real m2, Real m3, Real m4) {
  if (graph.N() != 2) throw std::invalid_argument("airy_four_parameter_spec: needs N = 2");
  Matrix L(6, 6);
  L << 1, 0, 0, 0, 0, 0,
       m1, 0, 0, m2, 1, 0,
       (m1 * m1 + 1) / 2, 1, 1, m3, m1, 0,
       0, 0, 0, 1, 0, 0,
       1, 1, 0, m4, 0, 0,
       m4 - m3 + m1 * m2, m4, 0, (m2 * m2 + m4 * m4) / 2, m2, 1;
  return AiryExtensionSpec{graph, MatrixCoupling{AiryFrameKind::EvenPaired, L},
                           +1, "airy_four_parameter", false};
}

bool tadpole_delta_contraction_condition(Real m1, Real m2, Real m3, Real m4, Real a) {
  return a < 0 && m4 <= 1.5 && 4 * m1 - (m2 * m2 + m3 * m3) <= 2.0;
}

AiryExtensionSpec tadpole_delta_contraction_spec(Real m1, Real m2, Real m3, Real m4,
                                                 Real a, Real L) {
  MetricGraphSpec graph(Topology::Tadpole, L, 1, {{a, a}, {a, a}});
  Matrix M(6, 6);
  M << 1, 0, 0, 0, 0, 0,
       (m2 + m3) / 2, 1, 0, 1, 0, 0,
       m1, m2 + m3, 2, m2, 0, 0,
       0, 0, 0, 1, 0, 0,
       (m2 + m3) / 2, 1, 0, 1, 0, 0,
       m3, 2, 0, m4, 0, 2;
  AiryExtensionSpec spec{graph, MatrixCoupling{AiryFrameKind::Replicated, M},
                         +1, "tadpole_delta_contraction", false};
  spec.expected_non_contraction = !tadpole_delta_contraction_condition(m1, m2, m3, m4, a);
  return spec;
}

Matrix derivative_split_coupling(Real m1, Real m2) {
  Matrix L(2, 2);
  L << m1, m2, m2, -m1;
  return L;
}

bool derivative_split_contraction_condition(Real m1, Real m2) {
  return m1 * m1 + m2 * m2 <= 2.0 && m2 * m2 * (m1 * m1 + 1.0) <= 2.0;
}

AiryExtensionSpec tadpole_mixed_spec(const MetricGraphSpec& graph, Real z, Matrix L) {
  if (graph.N() != 1) throw std::invalid_argument("tadpole_mixed_spec: needs N = 1");
  Matrix Y(3, 1);
  Y << 1, 1, z;
  return AiryExtensionSpec{graph, MixedCoupling{Y, std::move(L)}, +1,
                           "tadpole_mixed", false};
}

}  // namespace graphext

#include "graphext/schrodinger.hpp"

#include <cmath>
#include <random>

namespace graphext {

namespace {

constexpr int kB = 2;

Index trace_cols(const MetricGraphSpec& g) { return kB * Index(g.point_count()); }

RealMatrix selector(const MetricGraphSpec& g,
                    const std::vector<std::pair<int, int>>& entries) {
  RealMatrix s = RealMatrix::Zero(Index(entries.size()), trace_cols(g));
  for (Index r = 0; r < Index(entries.size()); ++r)
    s(r, entries[r].first * kB + entries[r].second) = 1.0;
  return s;
}

RealMatrix replicate(Index m, int copies) {
  RealMatrix r = RealMatrix::Zero(m * copies, m);
  for (int c = 0; c < copies; ++c) r.block(Index(c) * m, 0, m, m).setIdentity();
  return r;
}

Vector point_block(const TraceVector& t, int p) {
  return t.values.segment(Index(p) * kB, kB);
}

Complex p0_pair(const Vector& du, const Vector& dv) {
  // (P0 du | dv) = u' conj(v) - u conj(v')
  return du(1) * std::conj(dv(0)) - du(0) * std::conj(dv(1));
}

}  // namespace

SchrodingerFrame build_schrodinger_frame(const MetricGraphSpec& g) {
  const int N = g.N();
  RealMatrix p0(2, 2);
  p0 << 0, 1, -1, 0;
  RealMatrix pp = RealMatrix::Zero(2 * (N + 1), 2 * (N + 1));
  for (int b = 0; b <= N; ++b) pp.block(2 * b, 2 * b, 2, 2) = p0;

  RealVector q(N + 2);
  q(0) = 1;
  q(1) = -1;
  for (int j = 1; j <= N; ++j) q(1 + j) = 1;

  std::vector<std::pair<int, int>> in_pts{{0, 0}, {0, 1}};
  for (int j = 1; j <= N; ++j) {
    in_pts.emplace_back(1 + j, 0);
    in_pts.emplace_back(1 + j, 1);
  }
  std::vector<std::pair<int, int>> vals{{0, 0}, {1, 0}}, firsts{{0, 1}, {1, 1}};
  for (int j = 1; j <= N; ++j) {
    vals.emplace_back(1 + j, 0);
    firsts.emplace_back(1 + j, 1);
  }
  RealMatrix out = replicate(2, N + 1) * selector(g, {{1, 0}, {1, 1}});
  return SchrodingerFrame{g,
                          pp,
                          pp / Real(N + 1),
                          RealMatrix(q.asDiagonal()),
                          selector(g, in_pts),
                          out,
                          selector(g, vals),
                          selector(g, firsts)};
}

Complex boundary_form_schrodinger(const TraceVector& U, const TraceVector& V,
                                  const MetricGraphSpec& g) {
  if (U.order != OperatorOrder::Schrodinger2 || V.order != OperatorOrder::Schrodinger2)
    throw std::invalid_argument("boundary_form_schrodinger: Schrodinger2 traces required");
  if (U.values.size() != trace_cols(g) || V.values.size() != trace_cols(g))
    throw std::invalid_argument("boundary_form_schrodinger: trace length mismatch");
  Complex form = p0_pair(point_block(U, 0), point_block(V, 0)) -
                 p0_pair(point_block(U, 1), point_block(V, 1));
  for (int j = 1; j <= g.N(); ++j)
    form += p0_pair(point_block(U, 1 + j), point_block(V, 1 + j));
  return form;
}

Complex boundary_form_schrodinger_q(const TraceVector& U, const TraceVector& V,
                                    const MetricGraphSpec& g) {
  const SchrodingerFrame fr = build_schrodinger_frame(g);
  const Matrix vsel = fr.value_selector.cast<Complex>();
  const Matrix dsel = fr.dfirst_selector.cast<Complex>();
  const Matrix q = fr.Q.cast<Complex>();
  const Vector u = vsel * U.values, u1 = dsel * U.values;
  const Vector v = vsel * V.values, v1 = dsel * V.values;
  return v.dot(q * u1) - Vector(q * v1).dot(u);
}

Matrix constraint_matrix(const SchrodingerExtensionSpec& spec) {
  const SchrodingerFrame fr = build_schrodinger_frame(spec.graph);
  if (const auto* mc = std::get_if<SchrodingerMatrixCoupling>(&spec.coupling)) {
    if (mc->L.rows() != fr.input_selector.rows() || mc->L.cols() != fr.input_selector.rows())
      throw std::invalid_argument("constraint_matrix: coupling matrix must be 2(N+1) square");
    return mc->L * fr.input_selector.cast<Complex>() - fr.output_selector.cast<Complex>();
  }
  const auto& sc = std::get<SubspaceCoupling>(spec.coupling);
  const Index npts = spec.graph.point_count();
  if (sc.Y.rows() != npts)
    throw std::invalid_argument("constraint_matrix: Y basis rows must be N+2");
  Eigen::HouseholderQR<Matrix> qr(sc.Y);
  Matrix qfull = qr.householderQ();
  Matrix qy = qfull.leftCols(sc.Y.cols());
  Matrix qperp = qfull.rightCols(npts - sc.Y.cols());
  Matrix rows(npts, trace_cols(spec.graph));
  rows.topRows(qperp.cols()) = qperp.adjoint() * fr.value_selector.cast<Complex>();
  rows.bottomRows(qy.cols()) =
      qy.adjoint() * fr.Q.cast<Complex>() * fr.dfirst_selector.cast<Complex>();
  return rows;
}

ClassificationReport classify_schrodinger(const SchrodingerExtensionSpec& spec,
                                          Real tol_unitary) {
  ClassificationReport rep;
  rep.tol_unitary = tol_unitary;
  const SchrodingerFrame fr = build_schrodinger_frame(spec.graph);
  if (const auto* mc = std::get_if<SchrodingerMatrixCoupling>(&spec.coupling)) {
    rep.frame = "matrix";
    FramedOperator op(mc->L, fr.plus_form(), fr.minus_form());
    const UnitaryCheck uc = is_krein_unitary(op, tol_unitary);
    rep.certificates.push_back({"gram_residual", uc.residual, tol_unitary, uc.unitary});
    rep.verdict = uc.unitary ? Verdict::SelfAdjoint : Verdict::Neither;
    return rep;
  }
  rep.frame = "subspace";
  // Self-adjoint for every closed subspace; certify by sampling domain traces
  // and checking the boundary form vanishes on them.
  const Matrix c = constraint_matrix(spec);
  const Matrix kernel = null_space(c);
  Real worst = 0;
  std::mt19937_64 rng(0xC0FFEE);
  std::normal_distribution<Real> gauss;
  for (int t = 0; t < 16; ++t) {
    Vector a(kernel.cols()), b(kernel.cols());
    for (Index i = 0; i < kernel.cols(); ++i) {
      a(i) = Complex(gauss(rng), gauss(rng));
      b(i) = Complex(gauss(rng), gauss(rng));
    }
    TraceVector U{OperatorOrder::Schrodinger2, kernel * a};
    TraceVector V{OperatorOrder::Schrodinger2, kernel * b};
    worst = std::max(worst, std::abs(boundary_form_schrodinger(U, V, spec.graph)));
  }
  rep.certificates.push_back({"sampled_form_vanishing", worst, 1e-10, worst <= 1e-10});
  rep.verdict = Verdict::SelfAdjoint;
  return rep;
}

MembershipResult domain_membership_schrodinger(const SchrodingerExtensionSpec& spec,
                                               const TraceVector& U, Real tol) {
  const Matrix c = constraint_matrix(spec);
  if (U.values.size() != c.cols())
    throw std::invalid_argument("domain_membership_schrodinger: trace length mismatch");
  const Real residual = (c * U.values).lpNorm<Eigen::Infinity>();
  const Real scale = 1.0 + U.values.lpNorm<Eigen::Infinity>();
  return MembershipResult{residual <= tol * scale, residual};
}

DeficiencyReport schrodinger_deficiency(const MetricGraphSpec& g) {
  DeficiencyReport rep;
  rep.d_minus = 2 + g.N();
  rep.d_plus = 2 + g.N();
  const Real s = 1.0 / std::sqrt(2.0);
  // r^2 = -/+ i: r = +/- (1 - i)/sqrt(2) resp. +/- (1 + i)/sqrt(2)
  const std::vector<Complex> minus_roots{Complex(s, -s), Complex(-s, s)};
  const std::vector<Complex> plus_roots{Complex(s, s), Complex(-s, -s)};
  for (int e = 0; e <= g.N(); ++e) {
    rep.roots_minus.push_back(minus_roots);
    rep.roots_plus.push_back(plus_roots);
  }
  return rep;
}

Matrix delta_block_coupling(int N, const RealMatrix& m) {
  if (m.rows() != N + 1 || m.cols() != N + 1)
    throw std::invalid_argument("delta_block_coupling: m must be (N+1) square");
  if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm()))
    throw std::invalid_argument("delta_block_coupling: m must be symmetric");
  Matrix L = Matrix::Zero(2 * (N + 1), 2 * (N + 1));
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      if (i == j) {
        L(2 * i, 2 * j) = 1;
        L(2 * i + 1, 2 * j) = m(i, i);
        L(2 * i + 1, 2 * j + 1) = N + 1;
      } else {
        L(2 * i + 1, 2 * j) = m(i, j);
      }
    }
  return L;
}

namespace {

Index rank_of(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const Real cut = 1e-10 * std::max<Real>(1.0, s(0));
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

Matrix stack_rows(const Matrix& a, const Matrix& b) {
  Matrix s(a.rows() + b.rows(), a.cols());
  s << a, b;
  return s;
}

}  // namespace

DznReport dzn_equivalence(int N, const RealMatrix& m) {
  DznReport rep;
  rep.Z = m.sum() / Real(N + 1);

  MetricGraphSpec graph = MetricGraphSpec::with_unit_coefficients(
      N == 1 ? Topology::Tadpole : Topology::LoopingEdge, 1.0, N);
  SchrodingerExtensionSpec spec{graph, SchrodingerMatrixCoupling{delta_block_coupling(N, m)}, "delta_block"};
  const Matrix a = constraint_matrix(spec);

  // delta-type constraint rows: continuity plus the derivative jump with Z.
  auto delta_rows = [&](Real Z) {
    Matrix b = Matrix::Zero(N + 2, a.cols());
    const auto idx = [&](int p, int c) { return Index(p) * 2 + c; };
    for (int p = 1; p <= N + 1; ++p) {  // phi(-L) = phi(L) = psi_j(L)
      b(p - 1, idx(0, 0)) = 1;
      b(p - 1, idx(p, 0)) = -1;
    }
    // phi'(L) - phi'(-L) = sum psi_j'(L) + Z phi(L)
    b(N + 1, idx(1, 1)) = 1;
    b(N + 1, idx(0, 1)) = -1;
    for (int j = 1; j <= N; ++j) b(N + 1, idx(1 + j, 1)) = -1;
    b(N + 1, idx(1, 0)) = -Z;
    return b;
  };

  const Matrix b = delta_rows(rep.Z);
  rep.rank_coupling = rank_of(a);
  rep.rank_delta = rank_of(b);
  rep.rank_stacked = rank_of(stack_rows(a, b));
  const bool implied = rep.rank_stacked == rep.rank_coupling;
  // Z is pinned: with any other constant the jump row must leave the row space.
  const bool unique = rank_of(stack_rows(a, delta_rows(rep.Z + 1.0))) > rep.rank_coupling;
  rep.sets_equal = implied && rep.rank_delta == rep.rank_coupling;
  rep.ok = implied && unique;
  rep.message = rep.ok
                    ? (rep.sets_equal ? "delta-type set equals the coupling set"
                                      : "delta-type constraints implied with unique Z; "
                                        "coupling set is a strict subset")
                    : "rank mismatch: delta-type constraints not implied";
  return rep;
}

SchrodingerExtensionSpec schrodinger_delta_spec(const MetricGraphSpec& graph,
                                                const RealMatrix& m) {
  return SchrodingerExtensionSpec{
      graph, SchrodingerMatrixCoupling{delta_block_coupling(graph.N(), m)},
      "schrodinger_delta"};
}

SchrodingerExtensionSpec schrodinger_delta_prime_spec(const MetricGraphSpec& graph,
                                                      Real m1, Real m2, Real m3, Real m4) {
  if (graph.N() != 1) throw std::invalid_argument("schrodinger_delta_prime_spec: needs N = 1");
  if (m1 == 0.0) throw std::invalid_argument("schrodinger_delta_prime_spec: m1 must be nonzero");
  Matrix L(4, 4);
  L << m1, m2, 0, 0,
       0, 2 / m1, 0, m3,
       -m1 * m3, -m2 * m3, 2, m4,
       0, 0, 0, 1;
  return SchrodingerExtensionSpec{graph, SchrodingerMatrixCoupling{L}, "schrodinger_delta_prime"};
}

SchrodingerExtensionSpec schrodinger_subspace_spec(const MetricGraphSpec& graph, Matrix Y) {
  return SchrodingerExtensionSpec{graph, SubspaceCoupling{std::move(Y)}, "schrodinger_subspace"};
}

SchrodingerExtensionSpec tshape_delta_prime_spec(const MetricGraphSpec& graph, Real m4) {
  if (graph.topology() != Topology::TShaped || graph.N() != 1)
    throw std::invalid_argument("tshape_delta_prime_spec: needs a T-shaped graph with N = 1");
  Matrix L(4, 4);
  L << 1, 0, 0, 0,
       0, 2, 0, 1,
       -1, 0, 2, m4,
       0, 0, 0, 1;
  SchrodingerExtensionSpec spec{graph, SchrodingerMatrixCoupling{L}, "tshape_delta_prime"};
  return spec;
}

SchrodingerExtensionSpec tshape_derivative_continuity_spec(const MetricGraphSpec& graph,
                                                           const std::vector<Real>& m) {
  if (graph.topology() != Topology::TShaped)
    throw std::invalid_argument("tshape_derivative_continuity_spec: needs a T-shaped graph");
  const int N = graph.N();
  Matrix L;
  if (N == 1) {
    if (m.size() != 3) throw std::invalid_argument("need (m1, m2, m3) for N = 1");
    L.resize(4, 4);
    L << 2, m[0], 0, m[1],
         0, 1, 0, 0,
         0, m[1], 2, m[2],
         0, 0, 0, 1;
  } else if (N == 2) {
    if (m.size() != 6) throw std::invalid_argument("need (m1..m6) for N = 2");
    L.resize(6, 6);
    L << 3, m[0], 0, m[1], 0, m[2],
         0, 1, 0, 0, 0, 0,
         0, m[1], 3, m[3], 0, m[4],
         0, 0, 0, 1, 0, 0,
         0, m[2], 0, m[4], 3, m[5],
         0, 0, 0, 0, 0, 1;
  } else {
    throw std::invalid_argument("tshape_derivative_continuity_spec: N must be 1 or 2");
  }
  return SchrodingerExtensionSpec{graph, SchrodingerMatrixCoupling{L},
                                  "tshape_derivative_continuity"};
}

Real tshape_aggregate_coupling(int N, const std::vector<Real>& m) {
  if (N == 1) return (m.at(0) + 2 * m.at(1) + m.at(2)) / 2.0;
  if (N == 2)
    return (m.at(0) + m.at(3) + m.at(5) + 2 * (m.at(1) + m.at(2) + m.at(4))) / 3.0;
  throw std::invalid_argument("tshape_aggregate_coupling: N must be 1 or 2");
}

}  // namespace graphext

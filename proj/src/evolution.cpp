#include "graphext/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/SparseLU>

#include "graphext/fd_stencils.hpp"

namespace graphext {

SbpOperator sbp24_operator(Index n, Real h) {
  if (n < 9) throw std::invalid_argument("sbp24_operator: need at least 9 nodes");
  SbpOperator op;
  op.weights = RealVector::Constant(n, h);
  const Real hw[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
  for (int i = 0; i < 4; ++i) {
    op.weights(i) = hw[i] * h;
    op.weights(n - 1 - i) = hw[i] * h;
  }
  const Real bnd[4][6] = {
      {-24.0 / 17, 59.0 / 34, -4.0 / 17, -3.0 / 34, 0, 0},
      {-0.5, 0, 0.5, 0, 0, 0},
      {4.0 / 43, -59.0 / 86, 0, 59.0 / 86, -4.0 / 43, 0},
      {3.0 / 98, 0, -59.0 / 98, 0, 32.0 / 49, -4.0 / 49}};
  std::vector<Eigen::Triplet<Real>> trip;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) {
      if (bnd[i][j] != 0) {
        trip.emplace_back(i, j, bnd[i][j] / h);
        trip.emplace_back(n - 1 - i, n - 1 - j, -bnd[i][j] / h);
      }
    }
  const Real c[2] = {2.0 / 3, -1.0 / 12};
  for (Index i = 4; i < n - 4; ++i)
    for (int k = 1; k <= 2; ++k) {
      trip.emplace_back(i, i + k, c[k - 1] / h);
      trip.emplace_back(i, i - k, -c[k - 1] / h);
    }
  op.d1.resize(n, n);
  op.d1.setFromTriplets(trip.begin(), trip.end());
  return op;
}

namespace {

struct GridLayout {
  std::vector<Index> offsets;
  std::vector<Index> sizes;
  Index total = 0;
};

GridLayout make_layout(const MetricGraphSpec& g, Real h, Real R) {
  GridLayout lay;
  const Index n0 = static_cast<Index>(std::lround(g.edge0_length() / h)) + 1;
  const Index nj = static_cast<Index>(std::lround(R / h)) + 1;
  lay.sizes.push_back(n0);
  for (int j = 0; j < g.N(); ++j) lay.sizes.push_back(nj);
  lay.offsets.push_back(0);
  for (size_t e = 1; e < lay.sizes.size(); ++e)
    lay.offsets.push_back(lay.offsets[e - 1] + lay.sizes[e - 1]);
  lay.total = lay.offsets.back() + lay.sizes.back();
  return lay;
}

using Triplets = std::vector<Eigen::Triplet<Real>>;

void add_block(Triplets& trip, const SparseRealMatrix& block, Index off, Real scale = 1.0) {
  for (Index k = 0; k < block.outerSize(); ++k)
    for (SparseRealMatrix::InnerIterator it(block, k); it; ++it)
      trip.emplace_back(off + it.row(), off + it.col(), scale * it.value());
}

// Dense row (on one edge) appended as a sparse row of the full-grid matrix.
void add_row(std::vector<Eigen::Triplet<Complex>>& trip, Index row,
             const RealVector& coeffs, Index off, Complex scale = Complex(1, 0)) {
  for (Index i = 0; i < coeffs.size(); ++i)
    if (coeffs(i) != 0.0) trip.emplace_back(row, off + i, scale * coeffs(i));
}

struct TraceOperators {
  // rows of the canonical-trace extraction operator, indexed by trace entry
  std::vector<RealVector> rows;   // dense within one edge
  std::vector<Index> row_edge;    // owning edge
  std::vector<std::vector<RealVector>> far_rows;      // per half-line
  std::vector<Index> far_edge;
};

// Canonical trace extraction for the evolution grid. Airy uses the SBP
// traces (u, D1 u, D1^2 u at the boundary node) so the discrete energy
// identity reproduces the boundary form exactly; Schrodinger uses 4th-order
// one-sided stencils.
TraceOperators make_trace_ops(const MetricGraphSpec& g, const GridLayout& lay, Real h,
                              OperatorOrder order,
                              const std::vector<SbpOperator>* sbp) {
  TraceOperators ops;
  const int block = trace_block_size(order);
  auto edge_trace_rows = [&](Index edge, bool left) {
    const Index n = lay.sizes[edge];
    std::vector<RealVector> rows;
    RealVector val = RealVector::Zero(n);
    val(left ? 0 : n - 1) = 1.0;
    rows.push_back(val);
    if (order == OperatorOrder::Airy3) {
      const SparseRealMatrix& d1 = (*sbp)[edge].d1;
      const Index r = left ? 0 : n - 1;
      rows.push_back(RealVector(d1.row(r).transpose()));
      SparseRealMatrix d2 = d1 * d1;
      rows.push_back(RealVector(d2.row(r).transpose()));
    } else {
      const int npts = 5;
      RealVector w = one_sided_weights(1, npts, h, left);
      RealVector row = RealVector::Zero(n);
      for (int i = 0; i < npts; ++i) row(left ? i : n - npts + i) = w(i);
      rows.push_back(row);
    }
    return rows;
  };
  auto push_point = [&](Index edge, bool left) {
    auto rows = edge_trace_rows(edge, left);
    for (int c = 0; c < block; ++c) {
      ops.rows.push_back(rows[c]);
      ops.row_edge.push_back(edge);
    }
  };
  push_point(0, true);
  push_point(0, false);
  for (int j = 1; j <= g.N(); ++j) push_point(j, true);
  for (int j = 1; j <= g.N(); ++j) {
    ops.far_rows.push_back(edge_trace_rows(j, false));
    ops.far_edge.push_back(j);
  }
  return ops;
}

SparseMatrix constraint_system(const MetricGraphSpec& g, const GridLayout& lay,
                               const Matrix& spec_rows, const TraceOperators& tr) {
  std::vector<Eigen::Triplet<Complex>> trip;
  Index row = 0;
  for (Index r = 0; r < spec_rows.rows(); ++r, ++row) {
    for (Index t = 0; t < spec_rows.cols(); ++t) {
      const Complex w = spec_rows(r, t);
      if (w == Complex(0, 0)) continue;
      add_row(trip, row, tr.rows[t], lay.offsets[tr.row_edge[t]], w);
    }
  }
  for (size_t f = 0; f < tr.far_rows.size(); ++f)
    for (const RealVector& fr : tr.far_rows[f])
      add_row(trip, row++, fr, lay.offsets[tr.far_edge[f]]);
  SparseMatrix b(row, lay.total);
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

// Reduce the full-grid operator to the constraint kernel. The constraints
// touch only a cluster of columns near the boundaries; the kernel basis is
// the identity off the cluster plus a dense local kernel inside it.
void reduce_generator(DiscreteGenerator& gen, const SparseRealMatrix& G,
                      const RealVector& W, const SparseMatrix& B) {
  const Index total = W.size();
  std::set<Index> support;
  for (Index k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it)
      if (std::abs(it.value()) > 0) support.insert(it.col());
  std::vector<Index> cluster(support.begin(), support.end());
  std::vector<Index> col_of(total, -1);
  for (size_t i = 0; i < cluster.size(); ++i) col_of[cluster[i]] = Index(i);

  Matrix bloc = Matrix::Zero(B.rows(), Index(cluster.size()));
  for (Index k = 0; k < B.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(B, k); it; ++it)
      bloc(it.row(), col_of[it.col()]) = it.value();

  Matrix kernel = null_space(bloc);
  // W-orthonormalize the local kernel columns.
  RealVector wloc(cluster.size());
  for (size_t i = 0; i < cluster.size(); ++i) wloc(Index(i)) = W(cluster[i]);
  Matrix scaled = wloc.cwiseSqrt().cast<Complex>().asDiagonal() * kernel;
  Eigen::HouseholderQR<Matrix> qr(scaled);
  Matrix q = qr.householderQ() * Matrix::Identity(scaled.rows(), kernel.cols());
  kernel = wloc.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * q;

  const Index free_count = total - Index(cluster.size());
  const Index reduced = free_count + kernel.cols();
  std::vector<Eigen::Triplet<Complex>> ztrip;
  RealVector mass(reduced);
  Index next = 0;
  std::vector<Index> free_coord(total, -1);
  for (Index i = 0; i < total; ++i) {
    if (col_of[i] >= 0) continue;
    ztrip.emplace_back(i, next, Complex(1, 0));
    mass(next) = W(i);
    ++next;
  }
  for (Index c = 0; c < kernel.cols(); ++c, ++next) {
    for (size_t i = 0; i < cluster.size(); ++i)
      if (kernel(Index(i), c) != Complex(0, 0))
        ztrip.emplace_back(cluster[i], next, kernel(Index(i), c));
    mass(next) = 1.0;  // W-orthonormal columns
  }
  (void)free_coord;

  SparseMatrix Z(total, reduced);
  Z.setFromTriplets(ztrip.begin(), ztrip.end());

  SparseMatrix Gc = G.cast<Complex>();
  SparseMatrix WG = RealVector(W).cast<Complex>().asDiagonal() * Gc;
  gen.stiffness = Z.adjoint() * WG * Z;
  gen.basis = Z;
  gen.mass = mass;
  gen.grid_weights = W;
  gen.constraint_rows = B;
}

void symmetrize(DiscreteGenerator& gen) {
  SparseMatrix adj = SparseMatrix(gen.stiffness.adjoint());
  SparseMatrix diff = gen.stiffness - adj;
  const Real scale = std::max<Real>(1.0, gen.stiffness.norm());
  gen.hermiticity_defect = 0.5 * diff.norm() / scale;
  gen.stiffness = 0.5 * (gen.stiffness + adj);
  gen.symmetrized = true;
}

RealVector sbp_weights_or_trapezoid(const GridLayout& lay,
                                    const std::vector<SbpOperator>* sbp, Real h) {
  RealVector W(lay.total);
  for (size_t e = 0; e < lay.sizes.size(); ++e) {
    const Index n = lay.sizes[e], off = lay.offsets[e];
    if (sbp) {
      W.segment(off, n) = (*sbp)[e].weights;
    } else {
      W.segment(off, n).setConstant(h);
      W(off) = h / 2;
      W(off + n - 1) = h / 2;
    }
  }
  return W;
}

}  // namespace

DiscreteGenerator assemble(const AiryExtensionSpec& spec, Real h, Real R,
                           Real dissipation) {
  const MetricGraphSpec& g = spec.graph;
  if (h > g.L() / 64 + 1e-12) throw std::invalid_argument("assemble: need h <= L/64");
  GridLayout lay = make_layout(g, h, R);

  std::vector<SbpOperator> sbp;
  for (Index n : lay.sizes) sbp.push_back(sbp24_operator(n, h));

  Triplets gt;
  for (size_t e = 0; e < lay.sizes.size(); ++e) {
    const SparseRealMatrix& A = sbp[e].d1;
    SparseRealMatrix A3 = SparseRealMatrix(A * A) * A;
    add_block(gt, A3, lay.offsets[e], g.alpha(int(e)));
    add_block(gt, A, lay.offsets[e], g.beta(int(e)));
    if (dissipation > 0) {
      const Index n = lay.sizes[e];
      Triplets d3t;
      for (Index i = 2; i < n - 2; ++i) {
        const Real c[5] = {-0.5, 1.0, 0.0, -1.0, 0.5};
        for (int k = 0; k < 5; ++k)
          if (c[k] != 0) d3t.emplace_back(i, i - 2 + k, c[k] / (h * h * h));
      }
      SparseRealMatrix D3(n, n);
      D3.setFromTriplets(d3t.begin(), d3t.end());
      SparseRealMatrix WD3 = sbp[e].weights.asDiagonal() * D3;
      SparseRealMatrix diss = SparseRealMatrix(D3.transpose() * WD3);
      diss = sbp[e].weights.cwiseInverse().asDiagonal() * diss;
      add_block(gt, diss, lay.offsets[e], -dissipation * std::pow(h, 5));
    }
  }
  SparseRealMatrix G(lay.total, lay.total);
  G.setFromTriplets(gt.begin(), gt.end());

  const RealVector W = sbp_weights_or_trapezoid(lay, &sbp, h);
  TraceOperators tr = make_trace_ops(g, lay, h, OperatorOrder::Airy3, &sbp);
  const SparseMatrix B = constraint_system(g, lay, constraint_matrix(spec), tr);

  DiscreteGenerator gen;
  gen.h = h;
  gen.R = R;
  gen.edge0_xmin = -g.L();
  gen.order = OperatorOrder::Airy3;
  gen.time_factor = Complex(Real(spec.generator_sign), 0);
  gen.edge_offsets = lay.offsets;
  gen.edge_sizes = lay.sizes;
  reduce_generator(gen, G, W, B);
  return gen;
}

DiscreteGenerator assemble(const SchrodingerExtensionSpec& spec, Real h, Real R) {
  const MetricGraphSpec& g = spec.graph;
  if (h > g.L() / 64 + 1e-12) throw std::invalid_argument("assemble: need h <= L/64");
  GridLayout lay = make_layout(g, h, R);

  Triplets gt;
  for (size_t e = 0; e < lay.sizes.size(); ++e) {
    const Index n = lay.sizes[e], off = lay.offsets[e];
    // H = -d^2/dx^2: central rows, one-sided 2nd-order rows at the ends
    for (Index i = 0; i < n; ++i) {
      if (i >= 1 && i <= n - 2) {
        gt.emplace_back(off + i, off + i - 1, -1.0 / (h * h));
        gt.emplace_back(off + i, off + i, 2.0 / (h * h));
        gt.emplace_back(off + i, off + i + 1, -1.0 / (h * h));
      } else {
        const bool left = i == 0;
        const RealVector w = one_sided_weights(2, 4, h, left);
        for (int k = 0; k < 4; ++k) {
          const Index col = left ? k : n - 4 + k;
          gt.emplace_back(off + i, off + col, -w(k));
        }
      }
    }
  }
  SparseRealMatrix G(lay.total, lay.total);
  G.setFromTriplets(gt.begin(), gt.end());

  const RealVector W = sbp_weights_or_trapezoid(lay, nullptr, h);
  TraceOperators tr = make_trace_ops(g, lay, h, OperatorOrder::Schrodinger2, nullptr);
  const SparseMatrix B = constraint_system(g, lay, constraint_matrix(spec), tr);

  DiscreteGenerator gen;
  gen.h = h;
  gen.R = R;
  gen.edge0_xmin = -g.L();
  gen.order = OperatorOrder::Schrodinger2;
  gen.time_factor = Complex(0, -1);  // u' = -i H u
  gen.edge_offsets = lay.offsets;
  gen.edge_sizes = lay.sizes;
  reduce_generator(gen, G, W, B);
  symmetrize(gen);
  return gen;
}

Real DiscreteGenerator::tail_mass_fraction(const Vector& coeffs) const {
  const Vector u = full_state(coeffs);
  Real total = 0, tail = 0;
  for (Index i = 0; i < u.size(); ++i) total += grid_weights(i) * std::norm(u(i));
  for (size_t e = 1; e < edge_sizes.size(); ++e) {
    const Index n = edge_sizes[e], off = edge_offsets[e];
    const Index start = off + (9 * n) / 10;
    for (Index i = start; i < off + n; ++i) tail += grid_weights(i) * std::norm(u(i));
  }
  return total > 0 ? tail / total : 0.0;
}

struct Stepper::Impl {
  Eigen::SparseLU<SparseMatrix> lu;
  SparseMatrix rhs;
};

Stepper::Stepper(const DiscreteGenerator& gen, Real dt, Scheme scheme)
    : impl_(std::make_shared<Impl>()), dt_(dt) {
  if (scheme == Scheme::CrankNicolson && gen.order == OperatorOrder::Airy3)
    throw std::invalid_argument("Stepper: Crank-Nicolson is the Schrodinger scheme");
  if (scheme == Scheme::ImplicitMidpoint && gen.order == OperatorOrder::Schrodinger2)
    throw std::invalid_argument("Stepper: implicit midpoint is the Airy scheme");
  SparseMatrix massmat(gen.mass.size(), gen.mass.size());
  std::vector<Eigen::Triplet<Complex>> mt;
  for (Index i = 0; i < gen.mass.size(); ++i)
    mt.emplace_back(i, i, Complex(gen.mass(i), 0));
  massmat.setFromTriplets(mt.begin(), mt.end());
  const Complex z = gen.time_factor * Complex(dt / 2, 0);
  SparseMatrix lhs = massmat - z * gen.stiffness;
  impl_->rhs = massmat + z * gen.stiffness;
  impl_->lu.compute(lhs);
  if (impl_->lu.info() != Eigen::Success)
    throw std::runtime_error("Stepper: implicit solve factorization failed");
}

void Stepper::advance(Vector& coeffs) const {
  coeffs = impl_->lu.solve(impl_->rhs * coeffs);
}

Vector step(const DiscreteGenerator& gen, const Vector& coeffs, Real dt, Scheme scheme) {
  if (dt == 0) return coeffs;
  Stepper st(gen, dt, scheme);
  Vector next = coeffs;
  st.advance(next);
  return next;
}

namespace {

Vector initial_data(const DiscreteGenerator& gen, const Scenario& sc) {
  if (sc.initial != "gaussian")
    throw std::invalid_argument("simulate: unknown initial profile '" + sc.initial + "'");
  Vector u = Vector::Zero(gen.grid_weights.size());
  const Index n0 = gen.edge_sizes[0];
  for (Index i = 0; i < n0; ++i) {
    const Real x = gen.edge0_xmin + gen.h * i;
    const Real arg = (x - sc.center) / sc.width;
    u(i) = std::exp(-arg * arg);
  }
  return u;
}

std::pair<Real, int> resolve_dt(const DiscreteGenerator& gen, const Scenario& sc) {
  const Real cap = gen.order == OperatorOrder::Schrodinger2 ? gen.h
                                                            : sc.c_stab * gen.h * gen.h;
  Real dt = sc.dt;
  int steps = sc.steps;
  if (steps > 0) {
    dt = sc.T / steps;
  } else if (dt <= 0) {
    dt = cap;
    steps = std::max(1, int(std::ceil(sc.T / dt - 1e-12)));
    dt = sc.T / steps;
  } else {
    steps = std::max(1, int(std::ceil(sc.T / dt - 1e-12)));
    dt = sc.T / steps;
  }
  if (dt > cap * (1 + 1e-9))
    throw std::invalid_argument("simulate: dt exceeds the scheme's step cap");
  return {dt, steps};
}

}  // namespace

EvolutionReport simulate(const DiscreteGenerator& gen, const Scenario& scenario) {
  EvolutionReport rep;
  auto [dt, steps] = resolve_dt(gen, scenario);
  rep.dt = dt;
  rep.steps = steps;
  rep.reduced_dim = gen.reduced_dim();

  // W-orthogonal projection of the sampled data onto the constraint kernel.
  Vector u0 = initial_data(gen, scenario);
  Vector c = gen.basis.adjoint() * (gen.grid_weights.asDiagonal() * u0);
  for (Index i = 0; i < c.size(); ++i) c(i) /= gen.mass(i);

  const Scheme scheme = gen.order == OperatorOrder::Schrodinger2
                            ? Scheme::CrankNicolson
                            : Scheme::ImplicitMidpoint;
  Stepper st(gen, dt, scheme);

  const Real n0 = gen.norm(c);
  Real prev = n0;
  rep.times.push_back(0);
  rep.norms.push_back(n0);
  rep.boundary_residuals.push_back(gen.boundary_residual(c));
  rep.tail_masses.push_back(gen.tail_mass_fraction(c));
  for (int k = 1; k <= steps; ++k) {
    st.advance(c);
    const Real nn = gen.norm(c);
    rep.times.push_back(k * dt);
    rep.norms.push_back(nn);
    rep.boundary_residuals.push_back(gen.boundary_residual(c));
    const Real tail = gen.tail_mass_fraction(c);
    rep.tail_masses.push_back(tail);
    rep.norm_drift = std::max(rep.norm_drift, std::abs(nn / n0 - 1.0));
    rep.max_step_growth = std::max(rep.max_step_growth, nn / prev - 1.0);
    prev = nn;
    if (tail > 1e-10) rep.horizon_exceeded = true;
  }
  return rep;
}

namespace {

template <typename Spec>
CertifyResult certify_impl(const Spec& spec, const Scenario& scenario,
                           const CertifyOptions& opts, bool airy) {
  CertifyResult res;
  if constexpr (std::is_same_v<Spec, AiryExtensionSpec>)
    res.classification = classify_airy(spec);
  else
    res.classification = classify_schrodinger(spec);

  auto run = [&](Real h) {
    DiscreteGenerator gen = [&] {
      if constexpr (std::is_same_v<Spec, AiryExtensionSpec>)
        return assemble(spec, h, scenario.R, scenario.dissipation);
      else
        return assemble(spec, h, scenario.R);
    }();
    Scenario sc = scenario;
    sc.h = h;
    return simulate(gen, sc);
  };
  res.report = run(scenario.h);

  if (res.report.horizon_exceeded) {
    res.verdict_consistency = false;
    res.detail = "horizon exceeded";
    return res;
  }

  const Verdict v = res.classification.verdict;
  if (v == Verdict::SkewSelfAdjoint || v == Verdict::SelfAdjoint) {
    bool ok = res.report.norm_drift <= opts.tol_unitary_drift;
    res.detail = "unitary drift " + std::to_string(res.report.norm_drift);
    if (airy && opts.refine) {
      res.refined = run(scenario.h / 2);
      res.has_refined = true;
      if (res.report.norm_drift > opts.roundoff_floor) {
        res.refinement_ratio = res.refined.norm_drift / res.report.norm_drift;
        ok = ok && res.refinement_ratio <= opts.refinement_ratio_bound;
      } else {
        res.refinement_ratio = 0;  // both runs at the roundoff floor
      }
    }
    res.verdict_consistency = ok;
  } else if (v == Verdict::ContractionGenerator) {
    res.verdict_consistency = res.report.max_step_growth <= opts.tol_contraction_step;
    res.detail = "max step growth " + std::to_string(res.report.max_step_growth);
  } else {
    res.verdict_consistency = true;  // no dynamical claim to certify
    res.detail = "no claim for verdict 'neither'";
  }
  return res;
}

}  // namespace

CertifyResult certify(const AiryExtensionSpec& spec, const Scenario& scenario,
                      const CertifyOptions& opts) {
  return certify_impl(spec, scenario, opts, true);
}

CertifyResult certify(const SchrodingerExtensionSpec& spec, const Scenario& scenario,
                      const CertifyOptions& opts) {
  return certify_impl(spec, scenario, opts, false);
}

}  // namespace graphext

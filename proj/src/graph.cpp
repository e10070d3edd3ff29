#include "graphext/graph.hpp"

#include <cmath>

#include "graphext/fd_stencils.hpp"

namespace graphext {

namespace {

constexpr int kValueStencil = 1;
constexpr int kFirstStencil = 5;   // order 4 for f'
constexpr int kSecondStencil = 6;  // order 4 for f''

// One boundary trace block from a sampled edge.
void extract_block(const Vector& samples, Real h, bool left_end, int block,
                   Vector& out, Index offset) {
  const Index n = samples.size();
  out(offset) = left_end ? samples(0) : samples(n - 1);
  for (int m = 1; m < block; ++m) {
    const int npts = m == 1 ? kFirstStencil : kSecondStencil;
    const RealVector w = one_sided_weights(m, npts, h, left_end);
    Complex acc{0, 0};
    for (int i = 0; i < npts; ++i) {
      const Index idx = left_end ? i : n - npts + i;
      acc += w(i) * samples(idx);
    }
    out(offset + m) = acc;
  }
}

}  // namespace

TraceVector trace_of(const GridFunction& f, OperatorOrder order) {
  const int block = trace_block_size(order);
  const MetricGraphSpec& g = f.graph;
  if (static_cast<int>(f.halfline_samples.size()) != g.N())
    throw std::invalid_argument("trace_of: wrong number of half-line sample arrays");
  const Index min_pts = 7;
  if (f.loop_samples.size() < min_pts)
    throw std::invalid_argument("insufficient stencil");
  for (const Vector& s : f.halfline_samples)
    if (s.size() < min_pts) throw std::invalid_argument("insufficient stencil");

  TraceVector t = zero_trace(g, order);
  extract_block(f.loop_samples, f.h, true, block, t.values, 0);
  extract_block(f.loop_samples, f.h, false, block, t.values, block);
  for (int j = 0; j < g.N(); ++j)
    extract_block(f.halfline_samples[j], f.h, true, block, t.values,
                  static_cast<Index>(block) * (2 + j));
  return t;
}

Real cutoff_c3(Real u, int deriv) {
  if (u <= 0.5) return deriv == 0 ? 1.0 : 0.0;
  if (u >= 1.0) return 0.0;
  const Real v = 2.0 * (u - 0.5);  // transition variable in [0, 1]
  // S(v) = 35 v^4 - 84 v^5 + 70 v^6 - 20 v^7 rises 0 -> 1 with three flat
  // derivatives at both ends; the cutoff is 1 - S.
  const Real v2 = v * v, v3 = v2 * v, v4 = v3 * v;
  switch (deriv) {
    case 0:
      return 1.0 - (35 * v4 - 84 * v4 * v + 70 * v4 * v2 - 20 * v4 * v3);
    case 1:
      return -2.0 * (140 * v3 - 420 * v4 + 420 * v4 * v - 140 * v4 * v2);
    case 2:
      return -4.0 * (420 * v2 - 1680 * v3 + 2100 * v4 - 840 * v4 * v);
    case 3:
      return -8.0 * (840 * v - 5040 * v2 + 8400 * v3 - 4200 * v4);
    default:
      throw std::invalid_argument("cutoff_c3: derivative order above 3");
  }
}

SynthesizedFunction::SynthesizedFunction(MetricGraphSpec graph, TraceVector target)
    : graph_(std::move(graph)), target_(std::move(target)) {
  if (target_.values.size() != trace_length(graph_, target_.order))
    throw std::invalid_argument("synthesize_with_trace: trace length mismatch");
  support_ = graph_.L() / 2;
  const int block = trace_block_size(target_.order);
  auto taylor_of = [&](int p) {
    Vector c = Vector::Zero(3);
    for (int k = 0; k < block; ++k) c(k) = target_.at(p, k);
    return c;
  };
  patches_.push_back(Patch{0, -graph_.L(), +1.0, taylor_of(0)});
  patches_.push_back(Patch{0, graph_.edge0_x_max(), -1.0, taylor_of(1)});
  for (int j = 1; j <= graph_.N(); ++j)
    patches_.push_back(Patch{j, graph_.edge_x_min(j), +1.0, taylor_of(1 + j)});
}

Complex SynthesizedFunction::eval(int edge, Real x, int deriv) const {
  Complex acc{0, 0};
  for (const Patch& p : patches_) {
    if (p.edge != edge) continue;
    const Real t = p.into * (x - p.x0);  // distance into the edge
    if (t < 0 || t >= support_) continue;
    // Leibniz rule on poly(x) * chi(t/s); d/dx brings a factor p.into per
    // chi-derivative and nothing for the polynomial written in (x - x0).
    Complex sum{0, 0};
    for (int k = 0; k <= deriv; ++k) {
      const int pk = deriv - k;  // polynomial derivative order
      // d^pk/dx^pk of sum_m c_m (x-x0)^m / m!  evaluated at x
      Complex poly{0, 0};
      for (int m = pk; m < 3; ++m) {
        Real coeff = 1.0;
        for (int q = 1; q <= m - pk; ++q) coeff *= (x - p.x0) / Real(q);
        poly += p.taylor(m) * coeff;
      }
      Real chi = cutoff_c3(t / support_, k) / std::pow(support_, k);
      Real binom = 1.0;
      for (int q = 1; q <= k; ++q) binom = binom * Real(deriv - q + 1) / Real(q);
      sum += binom * poly * chi * std::pow(p.into, k);
    }
    acc += sum;
  }
  return acc;
}

GridFunction SynthesizedFunction::sample(Real h, Real halfline_length) const {
  GridFunction f{graph_, h, {}, {}};
  const Real len0 = graph_.edge0_length();
  const Index n0 = static_cast<Index>(std::lround(len0 / h)) + 1;
  f.loop_samples.resize(n0);
  for (Index i = 0; i < n0; ++i)
    f.loop_samples(i) = eval(0, -graph_.L() + h * i, 0);
  const Index nj = static_cast<Index>(std::lround(halfline_length / h)) + 1;
  for (int j = 1; j <= graph_.N(); ++j) {
    Vector s(nj);
    const Real x0 = graph_.edge_x_min(j);
    for (Index i = 0; i < nj; ++i) s(i) = eval(j, x0 + h * i, 0);
    f.halfline_samples.push_back(std::move(s));
  }
  return f;
}

SynthesizedFunction synthesize_with_trace(const MetricGraphSpec& graph,
                                          const TraceVector& target) {
  return SynthesizedFunction(graph, target);
}

}  // namespace graphext

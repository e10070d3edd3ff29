#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "graphext/types.hpp"

namespace graphext {

enum class Topology { LoopingEdge, Tadpole, TShaped };

enum class OperatorOrder { Airy3, Schrodinger2 };

/// Trace entries kept per boundary point: (f, f', f'') or (f, f').
inline int trace_block_size(OperatorOrder order) {
  return order == OperatorOrder::Airy3 ? 3 : 2;
}

struct EdgeCoefficients {
  Real alpha = 1.0;
  Real beta = 0.0;
};

/// A looping-edge, tadpole, or T-shaped metric graph: edge 0 is the loop
/// (interval [-L, L]) or, for TShaped, the internal edge [-L, 0]; edges
/// 1..N are half-lines attached at the vertex (x = L resp. x = 0).
class MetricGraphSpec {
 public:
  MetricGraphSpec(Topology topology, Real L, int N,
                  std::vector<EdgeCoefficients> coefficients)
      : topology_(topology), L_(L), N_(N), coefficients_(std::move(coefficients)) {
    if (!(L_ > 0)) throw std::invalid_argument("MetricGraphSpec: L must be positive");
    if (N_ < 1) throw std::invalid_argument("MetricGraphSpec: N must be at least 1");
    if (topology_ == Topology::Tadpole && N_ != 1)
      throw std::invalid_argument("MetricGraphSpec: tadpole forces N = 1");
    if (static_cast<int>(coefficients_.size()) != N_ + 1)
      throw std::invalid_argument("MetricGraphSpec: need N+1 coefficient pairs");
  }

  /// All alphas with unit coefficients; convenient default for Schrodinger use.
  static MetricGraphSpec with_unit_coefficients(Topology topology, Real L, int N) {
    return MetricGraphSpec(topology, L, N, std::vector<EdgeCoefficients>(N + 1, EdgeCoefficients{1.0, 0.0}));
  }

  Topology topology() const { return topology_; }
  Real L() const { return L_; }
  int N() const { return N_; }
  int edge_count() const { return N_ + 1; }
  /// Boundary points carrying traces: both ends of edge 0 plus one per half-line.
  int point_count() const { return N_ + 2; }
  const std::vector<EdgeCoefficients>& coefficients() const { return coefficients_; }
  Real alpha(int e) const { return coefficients_.at(e).alpha; }
  Real beta(int e) const { return coefficients_.at(e).beta; }

  /// Domain of edge e: [x_min, x_min + length]; half-lines report length < 0.
  Real edge_x_min(int e) const {
    if (e == 0) return -L_;
    return topology_ == Topology::TShaped ? 0.0 : L_;
  }
  Real edge0_x_max() const { return topology_ == Topology::TShaped ? 0.0 : L_; }
  Real edge0_length() const { return edge0_x_max() - (-L_); }

  void require_airy_coefficients() const {
    for (int e = 0; e <= N_; ++e)
      if (coefficients_[e].alpha == 0.0)
        throw std::invalid_argument("degenerate Airy edge: alpha must be nonzero");
  }

 private:
  Topology topology_;
  Real L_;
  int N_;
  std::vector<EdgeCoefficients> coefficients_;
};

/// Boundary values in the canonical ordering
///   (d phi(left end), d phi(vertex end), d psi_1(vertex), ..., d psi_N(vertex)),
/// each block (f, f', f'') for Airy3 or (f, f') for Schrodinger2.
struct TraceVector {
  OperatorOrder order = OperatorOrder::Airy3;
  Vector values;

  Index size() const { return values.size(); }
  /// Entry for boundary point block p (0 = edge-0 left end, 1 = edge-0 vertex
  /// end, 1+j = half-line j) and derivative component c.
  Complex& at(int p, int c) { return values(p * trace_block_size(order) + c); }
  Complex at(int p, int c) const { return values(p * trace_block_size(order) + c); }
};

inline Index trace_length(const MetricGraphSpec& g, OperatorOrder order) {
  return static_cast<Index>(g.point_count()) * trace_block_size(order);
}

inline TraceVector zero_trace(const MetricGraphSpec& g, OperatorOrder order) {
  return TraceVector{order, Vector::Zero(trace_length(g, order))};
}

/// Sampled function on a graph; all edges share the spacing h. The grid of
/// edge 0 covers [-L, L] (or [-L, 0]) including both endpoints; half-line
/// grids cover [vertex, vertex + R] including the vertex point.
struct GridFunction {
  MetricGraphSpec graph;
  Real h = 0;
  Vector loop_samples;
  std::vector<Vector> halfline_samples;
};

/// Extract boundary traces with 4th-order one-sided finite differences.
TraceVector trace_of(const GridFunction& f, OperatorOrder order);

/// Smooth compactly supported function manufactured to carry prescribed
/// traces: near each boundary point a Taylor polynomial times a plateaued
/// C^3 cutoff (identically 1 within s/2 of the point, 0 beyond s = L/2),
/// so the traces are exact and analytic derivatives are available.
class SynthesizedFunction {
 public:
  SynthesizedFunction(MetricGraphSpec graph, TraceVector target);

  /// k-th derivative (k <= 3) at coordinate x on edge e.
  Complex eval(int edge, Real x, int deriv) const;

  const MetricGraphSpec& graph() const { return graph_; }
  const TraceVector& target() const { return target_; }
  Real support_radius() const { return support_; }

  GridFunction sample(Real h, Real halfline_length) const;

 private:
  struct Patch {
    int edge;
    Real x0;        // anchor point
    Real into;      // +1 if the edge extends toward larger x from x0
    Vector taylor;  // coefficients c_k of sum c_k (x - x0)^k / k!
  };
  MetricGraphSpec graph_;
  TraceVector target_;
  Real support_;
  std::vector<Patch> patches_;
};

/// Build a function whose exact traces equal `target`.
SynthesizedFunction synthesize_with_trace(const MetricGraphSpec& graph,
                                          const TraceVector& target);

inline GridFunction synthesize_with_trace(const MetricGraphSpec& graph,
                                          const TraceVector& target, Real h,
                                          Real halfline_length) {
  return synthesize_with_trace(graph, target).sample(h, halfline_length);
}

/// Plateaued C^3 cutoff in the scaled variable u = distance / support:
/// 1 on [0, 1/2], septic smoothstep down to 0 on [1/2, 1], 0 beyond.
Real cutoff_c3(Real u, int deriv);

}  // namespace graphext

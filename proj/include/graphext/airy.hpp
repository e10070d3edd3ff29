#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphext/graph.hpp"
#include "graphext/krein.hpp"
#include "graphext/report.hpp"

namespace graphext {

/// The 3x3 boundary block of the Airy operator alpha d^3 + beta d:
/// [[beta, 0, alpha], [0, -alpha, 0], [alpha, 0, 0]].
RealMatrix b_block(Real alpha, Real beta);

enum class AiryFrameKind { EvenPaired, Replicated, DerivativeSplit };

const char* to_string(AiryFrameKind k);

/// A boundary frame for the Airy operator: two Krein forms plus selectors
/// mapping the canonical trace vector into frame coordinates. The coupling
/// condition of a matrix extension reads L * (input_selector * t) =
/// output_selector * t.
struct AiryFrame {
  AiryFrameKind kind;
  MetricGraphSpec graph;
  IndefiniteForm domain_form;
  IndefiniteForm codomain_form;
  RealMatrix input_selector;   // frame domain coords from canonical traces
  RealMatrix output_selector;  // frame codomain coords from canonical traces

  // DerivativeSplit auxiliaries (value/derivative vectors U, U', U'' in C^{N+2}
  // and the weight matrices of the split form).
  RealMatrix value_selector;
  RealMatrix dfirst_selector;
  RealMatrix dsecond_selector;
  RealMatrix d_alpha;
  RealMatrix d_beta;
};

AiryFrame build_frame(const MetricGraphSpec& graph, AiryFrameKind kind);

/// [A0* U, V] + [U, A0* V] evaluated from boundary traces:
/// (B0 dphi(-L)|dphi~(-L)) - (B0 dphi(L)|dphi~(L)) + sum_j (Bj dpsi_j|dpsi_j~).
Complex boundary_form_airy(const TraceVector& U, const TraceVector& V,
                           const MetricGraphSpec& graph);

/// The same form assembled from the derivative-separating split
/// (D_beta U|V) + (D_alpha U''|V) + (D_alpha U|V'') - (D_alpha U'|V').
Complex boundary_form_airy_split(const TraceVector& U, const TraceVector& V,
                                 const MetricGraphSpec& graph);

/// Coupling through a frame matrix: L maps the frame's input traces to its
/// output traces.
struct MatrixCoupling {
  AiryFrameKind frame;
  Matrix L;
};

/// Subspace-plus-derivative coupling in the derivative-separating frame:
/// U in Y, D_alpha U'' + (1/2) D_beta U in Y^perp, and L on first derivatives.
struct MixedCoupling {
  Matrix Y;  // basis columns of Y in C^{N+2}
  Matrix L;  // (N+1) x (N+1)
};

struct AiryExtensionSpec {
  MetricGraphSpec graph;
  std::variant<MatrixCoupling, MixedCoupling> coupling;
  int generator_sign = +1;  // +1 integrates u_t = alpha u''' + beta u'
  std::string label;
  /// Set by factories whose construction conditions are violated.
  bool expected_non_contraction = false;
};

/// Homogeneous linear constraints defining the extension's domain on the
/// canonical trace vector; members are exactly ker of this matrix.
Matrix constraint_matrix(const AiryExtensionSpec& spec);

ClassificationReport classify_airy(const AiryExtensionSpec& spec,
                                   Real tol_unitary = 1e-12, Real tol_psd = 1e-10);

struct MembershipResult {
  bool member = false;
  Real residual = 0;
};

/// Residual test of the domain constraints, relative tolerance tol*(1+|U|_inf).
MembershipResult domain_membership_airy(const AiryExtensionSpec& spec,
                                        const TraceVector& U, Real tol = 1e-9);

struct DeficiencyReport {
  int d_minus = 0;
  int d_plus = 0;
  // Characteristic roots per edge (edge 0 first); for Airy the roots of
  // alpha x^3 + beta x -/+ 1, for Schrodinger the exponents r with r^2 = -/+ i.
  std::vector<std::vector<Complex>> roots_minus;
  std::vector<std::vector<Complex>> roots_plus;
};

/// Deficiency indices of the free Airy operator: 3 per index from the loop
/// plus the count of decaying characteristic roots per half-line.
DeficiencyReport airy_deficiency(const MetricGraphSpec& graph);

// --- Worked coupling families -----------------------------------------------

/// Looping-edge graph with the paired sign pattern alpha = beta =
/// (a, a, -a, a, -a, ...) used by the even-paired examples.
MetricGraphSpec paired_sign_graph(int k, Real a = 1.0, Real L = 1.0);

/// delta-type pairwise coupling: block diagonal of delta_z =
/// [[1,0,0],[z,1,0],[z^2/2,z,1]] on the even-paired frame.
AiryExtensionSpec airy_delta_spec(const MetricGraphSpec& graph, Real z);
Matrix delta_z_block(Real z);

/// delta-type coupling with a cross-edge exchange parameter m (k = 1).
AiryExtensionSpec airy_delta_exchange_spec(const MetricGraphSpec& graph, Real z, Real m);

/// Two-parameter unitary family swapping derivative data between the loop
/// and the half-lines (k = 1).
AiryExtensionSpec airy_derivative_swap_spec(const MetricGraphSpec& graph, Real m1, Real m2);

/// Four-parameter unitary family keeping the loop continuity condition (k = 1).
AiryExtensionSpec airy_four_parameter_spec(const MetricGraphSpec& graph, Real m1,
                                           Real m2, Real m3, Real m4);

/// delta-type tadpole coupling in the replicated frame (contraction family).
/// Construction conditions: alpha0 < 0, m4 <= 3/2, 4 m1 - (m2^2 + m3^2) <= 2;
/// violating them only tags the spec as expected_non_contraction.
AiryExtensionSpec tadpole_delta_contraction_spec(Real m1, Real m2, Real m3, Real m4,
                                                 Real a = -1.0, Real L = 1.0);
bool tadpole_delta_contraction_condition(Real m1, Real m2, Real m3, Real m4, Real a);

/// 2x2 first-derivative coupling [[m1, m2], [m2, -m1]] normalized so the
/// Krein adjoint is again a contraction when
/// m1^2 + m2^2 <= 2 and m2^2 (m1^2 + 1) <= 2.
Matrix derivative_split_coupling(Real m1, Real m2);
bool derivative_split_contraction_condition(Real m1, Real m2);

/// Mixed extension on the tadpole: Y_z = span{(1,1,z)} with a 2x2 coupling.
AiryExtensionSpec tadpole_mixed_spec(const MetricGraphSpec& graph, Real z, Matrix L);

}  // namespace graphext

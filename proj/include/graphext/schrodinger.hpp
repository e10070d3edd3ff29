#pragma once

#include <string>
#include <variant>
#include <vector>

#include "graphext/airy.hpp"  // DeficiencyReport, shared report types
#include "graphext/graph.hpp"
#include "graphext/krein.hpp"
#include "graphext/report.hpp"

namespace graphext {

/// Boundary frame of -d^2/dx^2 on the graph: antisymmetric pairing blocks
/// P0 = [[0,1],[-1,0]] per boundary point, P_- = P_+/(N+1), and the signed
/// diagonal Q = diag(1,-1,1,...,1) of the value/derivative form.
struct SchrodingerFrame {
  MetricGraphSpec graph;
  RealMatrix P_plus;   // 2(N+1) square, block diagonal of P0
  RealMatrix P_minus;  // P_plus / (N+1)
  RealMatrix Q;        // (N+2) diagonal
  RealMatrix input_selector;   // (dphi(-L), dpsi(vertex)) from canonical traces
  RealMatrix output_selector;  // replicated dphi(vertex end)
  RealMatrix value_selector;   // U-vector (N+2)
  RealMatrix dfirst_selector;  // U'-vector (N+2)

  /// Hermitian Krein forms i P_+/- for use with the framed-operator kernel;
  /// the factor i drops out of every adjoint/Gram formula.
  IndefiniteForm plus_form() const { return IndefiniteForm(Matrix(Complex(0, 1) * P_plus.cast<Complex>())); }
  IndefiniteForm minus_form() const { return IndefiniteForm(Matrix(Complex(0, 1) * P_minus.cast<Complex>())); }
};

SchrodingerFrame build_schrodinger_frame(const MetricGraphSpec& graph);

/// [H0* U, V] - [U, H0* V] from boundary traces (P-form).
Complex boundary_form_schrodinger(const TraceVector& U, const TraceVector& V,
                                  const MetricGraphSpec& graph);

/// The same form as (Q U' | V) - (U | Q V').
Complex boundary_form_schrodinger_q(const TraceVector& U, const TraceVector& V,
                                    const MetricGraphSpec& graph);

struct SchrodingerMatrixCoupling {
  Matrix L;  // 2(N+1) square
};

struct SubspaceCoupling {
  Matrix Y;  // basis columns in C^{N+2}
};

struct SchrodingerExtensionSpec {
  MetricGraphSpec graph;
  std::variant<SchrodingerMatrixCoupling, SubspaceCoupling> coupling;
  std::string label;
};

Matrix constraint_matrix(const SchrodingerExtensionSpec& spec);

ClassificationReport classify_schrodinger(const SchrodingerExtensionSpec& spec,
                                          Real tol_unitary = 1e-12);

MembershipResult domain_membership_schrodinger(const SchrodingerExtensionSpec& spec,
                                               const TraceVector& U, Real tol = 1e-9);

/// Deficiency indices (2+N, 2+N) with the characteristic exponents.
DeficiencyReport schrodinger_deficiency(const MetricGraphSpec& graph);

struct DznReport {
  bool ok = false;       // coupling constraints imply the delta-type set with this Z
  Real Z = 0;            // (1/(N+1)) sum m_ij
  bool sets_equal = false;  // full solution-set equality (strictly stronger)
  Index rank_coupling = 0;
  Index rank_delta = 0;
  Index rank_stacked = 0;
  std::string message;
};

/// Compare the block-coupling extension built from the symmetric matrix m
/// against the delta-type domain with strength Z = (1/(N+1)) sum m_ij:
/// verifies that the delta-type constraints are exactly implied (rank of the
/// stacked system equals the coupling rank) and that Z is the unique constant
/// with that property; also reports whether the two sets coincide outright.
DznReport dzn_equivalence(int N, const RealMatrix& m);

/// Block coupling matrix with A_ii = [[1,0],[m_ii,N+1]], A_ij = [[0,0],[m_ij,0]].
Matrix delta_block_coupling(int N, const RealMatrix& m);

// --- worked families ---------------------------------------------------------

SchrodingerExtensionSpec schrodinger_delta_spec(const MetricGraphSpec& graph,
                                                const RealMatrix& m);

/// delta'-type family [[m1,m2,0,0],[0,2/m1,0,m3],[-m1 m3,-m2 m3,2,m4],[0,0,0,1]]
/// on the tadpole (m1 != 0).
SchrodingerExtensionSpec schrodinger_delta_prime_spec(const MetricGraphSpec& graph,
                                                      Real m1, Real m2, Real m3, Real m4);

SchrodingerExtensionSpec schrodinger_subspace_spec(const MetricGraphSpec& graph, Matrix Y);

/// T-shaped graph, one half-line: delta'-type conditions
/// psi'(0+)=phi'(0-), phi'(-L)=0, phi(0-)=phi(-L), phi(0-)-psi(0+)=(m4/2) psi'(0+).
SchrodingerExtensionSpec tshape_delta_prime_spec(const MetricGraphSpec& graph, Real m4);

/// T-shaped derivative-continuity family; N = 1 takes (m1,m2,m3), N = 2 takes
/// (m1..m6) in the order of the coupling rows.
SchrodingerExtensionSpec tshape_derivative_continuity_spec(const MetricGraphSpec& graph,
                                                           const std::vector<Real>& m);

/// Aggregate coupling constant Z in
/// phi(0-) - phi(-L) = sum_j psi_j(0+) + Z psi'(0+) for the family above.
Real tshape_aggregate_coupling(int N, const std::vector<Real>& m);

/// Extension of either operator.
using AnyExtensionSpec = std::variant<AiryExtensionSpec, SchrodingerExtensionSpec>;

}  // namespace graphext

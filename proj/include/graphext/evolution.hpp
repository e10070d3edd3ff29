#pragma once

#include <memory>
#include <string>
#include <vector>

#include "graphext/airy.hpp"
#include "graphext/schrodinger.hpp"

namespace graphext {

enum class Scheme { CrankNicolson, ImplicitMidpoint };

struct Scenario {
  std::string initial = "gaussian";
  Real center = -0.5;
  Real width = 0.1;
  Real T = 0.05;
  Real h = 1.0 / 256;
  Real R = 8.0;
  Scheme scheme = Scheme::CrankNicolson;
  Real dt = 0;        // 0: derive from the step caps
  int steps = 0;      // 0: derive from dt
  Real c_stab = 0.5;  // Airy step cap dt <= c_stab h^2
  Real dissipation = 0.2;
  unsigned long long seed = 0xC0FFEE;
};

/// Diagonal-norm SBP(2,4) first-derivative operator on n uniform nodes.
struct SbpOperator {
  RealVector weights;    // norm diagonal, includes the factor h
  SparseRealMatrix d1;
};
SbpOperator sbp24_operator(Index n, Real h);

/// Constraint-reduced spatial generator: dynamics c' = z M^{-1} S c with
/// diagonal mass M = Z*WZ and stiffness S = Z*WGZ on the constraint kernel Z.
struct DiscreteGenerator {
  SparseMatrix stiffness;
  RealVector mass;
  SparseMatrix basis;             // grid values from reduced coefficients
  SparseMatrix constraint_rows;   // full-grid constraint system (for residuals)
  RealVector grid_weights;
  std::vector<Index> edge_offsets;
  std::vector<Index> edge_sizes;
  Real h = 0;
  Real R = 0;
  Real edge0_xmin = 0;  // absolute coordinate of the first grid point
  Complex time_factor{1, 0};      // Airy: generator sign; Schrodinger: -i
  bool symmetrized = false;
  Real hermiticity_defect = 0;    // pre-symmetrization, relative
  OperatorOrder order = OperatorOrder::Airy3;

  Index reduced_dim() const { return mass.size(); }
  Vector full_state(const Vector& coeffs) const { return basis * coeffs; }
  Real norm(const Vector& coeffs) const {
    return std::sqrt(std::abs((coeffs.array().abs2() * mass.array()).sum()));
  }
  Real boundary_residual(const Vector& coeffs) const {
    if (constraint_rows.rows() == 0) return 0.0;
    return (constraint_rows * full_state(coeffs)).lpNorm<Eigen::Infinity>();
  }
  /// Mass fraction in the outermost 10% of each half-line.
  Real tail_mass_fraction(const Vector& coeffs) const;
};

DiscreteGenerator assemble(const AiryExtensionSpec& spec, Real h, Real R,
                           Real dissipation = 0.2);
DiscreteGenerator assemble(const SchrodingerExtensionSpec& spec, Real h, Real R);

/// One implicit step (Cayley form): (M - z dt/2 S) c+ = (M + z dt/2 S) c.
/// Factors once per (dt, scheme); reuse across steps.
class Stepper {
 public:
  Stepper(const DiscreteGenerator& gen, Real dt, Scheme scheme);
  void advance(Vector& coeffs) const;
  Real dt() const { return dt_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  Real dt_;
};

/// Single step; dt = 0 returns the state unchanged.
Vector step(const DiscreteGenerator& gen, const Vector& coeffs, Real dt, Scheme scheme);

struct EvolutionReport {
  std::vector<Real> times;
  std::vector<Real> norms;
  std::vector<Real> boundary_residuals;
  std::vector<Real> tail_masses;
  Real norm_drift = 0;       // max |norm(t)/norm(0) - 1|
  Real max_step_growth = 0;  // max over steps of norm ratio - 1
  bool horizon_exceeded = false;
  Real dt = 0;
  int steps = 0;
  Index reduced_dim = 0;
};

EvolutionReport simulate(const DiscreteGenerator& gen, const Scenario& scenario);

struct CertifyOptions {
  Real tol_unitary_drift = 1e-6;
  Real tol_contraction_step = 1e-8;
  Real refinement_ratio_bound = 0.35;
  bool refine = true;            // Airy: rerun at h/2 and compare drifts
  Real roundoff_floor = 1e-12;
};

struct CertifyResult {
  ClassificationReport classification;
  EvolutionReport report;
  EvolutionReport refined;       // Airy refinement run (empty otherwise)
  bool has_refined = false;
  Real refinement_ratio = 0;
  bool verdict_consistency = false;
  std::string detail;
};

CertifyResult certify(const AiryExtensionSpec& spec, const Scenario& scenario,
                      const CertifyOptions& opts = {});
CertifyResult certify(const SchrodingerExtensionSpec& spec, const Scenario& scenario,
                      const CertifyOptions& opts = {});

}  // namespace graphext

#pragma once

#include <string>
#include <vector>

#include "graphext/types.hpp"

namespace graphext {

enum class Verdict { SkewSelfAdjoint, SelfAdjoint, ContractionGenerator, Neither };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::SkewSelfAdjoint: return "skew_self_adjoint";
    case Verdict::SelfAdjoint: return "self_adjoint";
    case Verdict::ContractionGenerator: return "contraction_generator";
    default: return "neither";
  }
}

/// One numeric piece of evidence behind a verdict (a residual norm or an
/// extremal eigenvalue, with the threshold it was held against).
struct Certificate {
  std::string name;
  Real value = 0;
  Real threshold = 0;
  bool pass = false;
};

struct ClassificationReport {
  Verdict verdict = Verdict::Neither;
  std::string frame;
  std::vector<Certificate> certificates;
  Real tol_unitary = 1e-12;
  Real tol_psd = 1e-10;

  const Certificate* find(const std::string& name) const {
    for (const auto& c : certificates)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace graphext

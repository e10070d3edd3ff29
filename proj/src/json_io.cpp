#include "graphext/json_io.hpp"

#include <sstream>

namespace graphext {

namespace {

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a non-empty matrix (array of rows)");
  const Index rows = Index(j.size());
  const Index cols = Index(j.at(0).size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(size_t(r));
    if (Index(row.size()) != cols)
      throw std::invalid_argument("ragged matrix rows in JSON input");
    for (Index c = 0; c < cols; ++c) m(r, c) = Complex(row.at(size_t(c)).get<Real>(), 0);
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c).real());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

MetricGraphSpec graph_from_json(const Json& j) {
  const std::string topo = j.at("topology").get<std::string>();
  Topology t;
  if (topo == "looping_edge")
    t = Topology::LoopingEdge;
  else if (topo == "tadpole")
    t = Topology::Tadpole;
  else if (topo == "t_shaped")
    t = Topology::TShaped;
  else
    throw std::invalid_argument("unknown topology '" + topo + "'");
  const Real L = j.at("L").get<Real>();
  const int N = j.at("N").get<int>();
  std::vector<EdgeCoefficients> coeff;
  if (j.contains("coefficients")) {
    for (const auto& pair : j.at("coefficients"))
      coeff.push_back({pair.at(0).get<Real>(), pair.at(1).get<Real>()});
  } else {
    coeff.assign(size_t(N) + 1, EdgeCoefficients{1.0, 0.0});
  }
  return MetricGraphSpec(t, L, N, std::move(coeff));
}

Json graph_to_json(const MetricGraphSpec& g) {
  Json j;
  switch (g.topology()) {
    case Topology::LoopingEdge: j["topology"] = "looping_edge"; break;
    case Topology::Tadpole: j["topology"] = "tadpole"; break;
    case Topology::TShaped: j["topology"] = "t_shaped"; break;
  }
  j["L"] = g.L();
  j["N"] = g.N();
  Json coeff = Json::array();
  for (const auto& c : g.coefficients()) coeff.push_back(Json::array({c.alpha, c.beta}));
  j["coefficients"] = coeff;
  return j;
}

AnyExtensionSpec extension_from_json(const Json& j) {
  MetricGraphSpec graph = graph_from_json(j.at("graph"));
  const std::string op = j.value("operator", "airy");
  const std::string label = j.value("label", "");
  if (op == "schrodinger") {
    SchrodingerExtensionSpec spec{graph, SchrodingerMatrixCoupling{Matrix()}, label};
    if (j.contains("Y") && !j.at("Y").is_null())
      spec.coupling = SubspaceCoupling{matrix_from_json(j.at("Y"))};
    else
      spec.coupling = SchrodingerMatrixCoupling{matrix_from_json(j.at("L"))};
    return spec;
  }
  if (op != "airy") throw std::invalid_argument("unknown operator '" + op + "'");
  const std::string frame = j.value("frame", "even_paired");
  AiryExtensionSpec spec{graph, MatrixCoupling{AiryFrameKind::EvenPaired, Matrix()},
                         j.value("generator_sign", +1), label, false};
  if (j.contains("Y") && !j.at("Y").is_null()) {
    spec.coupling = MixedCoupling{matrix_from_json(j.at("Y")), matrix_from_json(j.at("L"))};
    return spec;
  }
  AiryFrameKind kind;
  if (frame == "even_paired")
    kind = AiryFrameKind::EvenPaired;
  else if (frame == "replicated")
    kind = AiryFrameKind::Replicated;
  else if (frame == "derivative_split")
    kind = AiryFrameKind::DerivativeSplit;
  else
    throw std::invalid_argument("unknown frame '" + frame + "'");
  spec.coupling = MatrixCoupling{kind, matrix_from_json(j.at("L"))};
  return spec;
}

Json extension_to_json(const AnyExtensionSpec& any) {
  Json j;
  if (const auto* airy = std::get_if<AiryExtensionSpec>(&any)) {
    j["operator"] = "airy";
    j["graph"] = graph_to_json(airy->graph);
    j["label"] = airy->label;
    j["generator_sign"] = airy->generator_sign;
    if (const auto* mc = std::get_if<MatrixCoupling>(&airy->coupling)) {
      j["frame"] = to_string(mc->frame);
      j["L"] = matrix_to_json(mc->L);
    } else {
      const auto& mx = std::get<MixedCoupling>(airy->coupling);
      j["frame"] = "derivative_split";
      j["Y"] = matrix_to_json(mx.Y);
      j["L"] = matrix_to_json(mx.L);
    }
    return j;
  }
  const auto& sch = std::get<SchrodingerExtensionSpec>(any);
  j["operator"] = "schrodinger";
  j["graph"] = graph_to_json(sch.graph);
  j["label"] = sch.label;
  if (const auto* mc = std::get_if<SchrodingerMatrixCoupling>(&sch.coupling))
    j["L"] = matrix_to_json(mc->L);
  else
    j["Y"] = matrix_to_json(std::get<SubspaceCoupling>(sch.coupling).Y);
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  sc.initial = j.value("initial", sc.initial);
  sc.center = j.value("center", sc.center);
  sc.width = j.value("width", sc.width);
  sc.T = j.value("T", sc.T);
  sc.h = j.value("h", sc.h);
  sc.R = j.value("R", sc.R);
  sc.dt = j.value("dt", sc.dt);
  sc.steps = j.value("steps", sc.steps);
  sc.c_stab = j.value("c_stab", sc.c_stab);
  sc.dissipation = j.value("dissipation", sc.dissipation);
  const std::string scheme = j.value("scheme", "cn");
  if (scheme == "cn")
    sc.scheme = Scheme::CrankNicolson;
  else if (scheme == "implicit_midpoint" || scheme == "im")
    sc.scheme = Scheme::ImplicitMidpoint;
  else
    throw std::invalid_argument("unknown scheme '" + scheme + "'");
  return sc;
}

Json report_to_json(const ClassificationReport& rep) {
  Json j;
  j["schema"] = "graphext-report/1";
  j["verdict"] = to_string(rep.verdict);
  j["frame"] = rep.frame;
  Json certs = Json::array();
  for (const auto& c : rep.certificates)
    certs.push_back({{"name", c.name},
                     {"value", c.value},
                     {"threshold", c.threshold},
                     {"pass", c.pass}});
  j["certificates"] = certs;
  j["tolerances"] = {{"unitary", rep.tol_unitary}, {"psd", rep.tol_psd}};
  return j;
}

Json report_to_json(const DeficiencyReport& rep) {
  Json j;
  j["schema"] = "graphext-report/1";
  j["d_minus"] = rep.d_minus;
  j["d_plus"] = rep.d_plus;
  auto roots = [](const std::vector<std::vector<Complex>>& rr) {
    Json out = Json::array();
    for (const auto& edge : rr) {
      Json e = Json::array();
      for (const Complex& r : edge) e.push_back(Json::array({r.real(), r.imag()}));
      out.push_back(e);
    }
    return out;
  };
  j["roots_minus"] = roots(rep.roots_minus);
  j["roots_plus"] = roots(rep.roots_plus);
  return j;
}

Json report_to_json(const EvolutionReport& rep) {
  Json j;
  j["schema"] = "graphext-report/1";
  j["norm_drift"] = rep.norm_drift;
  j["max_step_growth"] = rep.max_step_growth;
  j["horizon_exceeded"] = rep.horizon_exceeded;
  j["dt"] = rep.dt;
  j["steps"] = rep.steps;
  j["reduced_dim"] = rep.reduced_dim;
  j["final_norm"] = rep.norms.empty() ? 0.0 : rep.norms.back();
  j["final_tail_mass"] = rep.tail_masses.empty() ? 0.0 : rep.tail_masses.back();
  return j;
}

Json report_to_json(const CertifyResult& res) {
  Json j;
  j["schema"] = "graphext-report/1";
  j["classification"] = report_to_json(res.classification);
  j["evolution"] = report_to_json(res.report);
  if (res.has_refined) {
    j["evolution_refined"] = report_to_json(res.refined);
    j["refinement_ratio"] = res.refinement_ratio;
  }
  j["verdict_consistency"] = res.verdict_consistency;
  j["detail"] = res.detail;
  return j;
}

std::string evolution_csv(const EvolutionReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "t,norm,boundary_residual,tail_mass\n";
  for (size_t i = 0; i < rep.times.size(); ++i)
    out << rep.times[i] << ',' << rep.norms[i] << ',' << rep.boundary_residuals[i]
        << ',' << rep.tail_masses[i] << '\n';
  return out.str();
}

}  // namespace graphext

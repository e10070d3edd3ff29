#include "graphext/catalogue.hpp"

namespace graphext {

std::vector<CatalogueEntry> example_catalogue() {
  std::vector<CatalogueEntry> cat;

  // Airy, even-paired frame (unitary families)
  const MetricGraphSpec paired = paired_sign_graph(1);
  cat.push_back({"airy/delta_z", airy_delta_spec(paired, 1.0), Verdict::SkewSelfAdjoint});
  cat.push_back({"airy/delta_z_wide", airy_delta_spec(paired_sign_graph(2), -2.5),
                 Verdict::SkewSelfAdjoint});
  cat.push_back({"airy/delta_exchange", airy_delta_exchange_spec(paired, 1.0, 0.7),
                 Verdict::SkewSelfAdjoint});
  cat.push_back({"airy/derivative_swap", airy_derivative_swap_spec(paired, 0.4, -1.1),
                 Verdict::SkewSelfAdjoint});
  cat.push_back({"airy/four_parameter",
                 airy_four_parameter_spec(paired, 0.3, -0.8, 0.5, 1.2),
                 Verdict::SkewSelfAdjoint});

  // Airy, replicated frame (delta-type tadpole contraction family, pinned at
  // parameters satisfying both the construction conditions and the verified
  // semidefiniteness region).
  cat.push_back({"airy/tadpole_delta_contraction",
                 tadpole_delta_contraction_spec(0.5, 0.0, 0.0, 1.5),
                 Verdict::ContractionGenerator});

  // Airy, derivative-separating frame
  const MetricGraphSpec tad(Topology::Tadpole, 1.0, 1, {{1.0, 1.0}, {1.0, 1.0}});
  cat.push_back({"airy/mixed_y1",
                 tadpole_mixed_spec(tad, 1.0, derivative_split_coupling(1.0, 1.0)),
                 Verdict::ContractionGenerator});
  cat.push_back({"airy/mixed_y0",
                 tadpole_mixed_spec(tad, 0.0, derivative_split_coupling(1.0, 1.0)),
                 Verdict::ContractionGenerator});

  // Schrodinger on the looping edge / tadpole
  const MetricGraphSpec stad = MetricGraphSpec::with_unit_coefficients(Topology::Tadpole, 1.0, 1);
  RealMatrix m1(2, 2);
  m1 << 1.0, 0.5, 0.5, -1.0;
  cat.push_back({"schrodinger/delta_n1", schrodinger_delta_spec(stad, m1), Verdict::SelfAdjoint});
  const MetricGraphSpec sloop3 =
      MetricGraphSpec::with_unit_coefficients(Topology::LoopingEdge, 1.0, 3);
  RealMatrix m3(4, 4);
  m3 << 0.2, -0.4, 1.0, 0.3,
        -0.4, 0.0, 0.6, -1.2,
        1.0, 0.6, 0.8, 0.1,
        0.3, -1.2, 0.1, -0.7;
  cat.push_back({"schrodinger/delta_n3", schrodinger_delta_spec(sloop3, m3), Verdict::SelfAdjoint});
  cat.push_back({"schrodinger/delta_prime",
                 schrodinger_delta_prime_spec(stad, 1.0, 0.0, -1.0, 0.8),
                 Verdict::SelfAdjoint});
  Matrix y0(3, 1), ym(3, 1);
  y0 << 1, 1, 0;
  ym << 1, 0, -1;
  cat.push_back({"schrodinger/subspace_y0", schrodinger_subspace_spec(stad, y0),
                 Verdict::SelfAdjoint});
  cat.push_back({"schrodinger/subspace_terminal", schrodinger_subspace_spec(stad, ym),
                 Verdict::SelfAdjoint});

  // Schrodinger on T-shaped graphs
  const MetricGraphSpec t1 = MetricGraphSpec::with_unit_coefficients(Topology::TShaped, 1.0, 1);
  const MetricGraphSpec t2 = MetricGraphSpec::with_unit_coefficients(Topology::TShaped, 1.0, 2);
  cat.push_back({"schrodinger/tshape_delta_prime", tshape_delta_prime_spec(t1, 1.0),
                 Verdict::SelfAdjoint});
  cat.push_back({"schrodinger/tshape_n1",
                 tshape_derivative_continuity_spec(t1, {1.0, 0.0, 1.0}),
                 Verdict::SelfAdjoint});
  cat.push_back({"schrodinger/tshape_n2",
                 tshape_derivative_continuity_spec(t2, {0.4, -0.2, 0.9, 0.0, 1.1, -0.6}),
                 Verdict::SelfAdjoint});
  return cat;
}

CatalogueRun run_catalogue(Real tol_unitary, Real tol_psd) {
  CatalogueRun run;
  for (const CatalogueEntry& entry : example_catalogue()) {
    CatalogueRun::Item item;
    item.name = entry.name;
    item.expected = entry.expected;
    ClassificationReport rep;
    if (const auto* airy = std::get_if<AiryExtensionSpec>(&entry.spec))
      rep = classify_airy(*airy, tol_unitary, tol_psd);
    else
      rep = classify_schrodinger(std::get<SchrodingerExtensionSpec>(entry.spec), tol_unitary);
    item.got = rep.verdict;
    item.match = item.got == item.expected;
    item.certificates = rep.certificates;
    run.all_match = run.all_match && item.match;
    run.items.push_back(std::move(item));
  }
  return run;
}

}  // namespace graphext

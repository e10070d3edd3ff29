#pragma once

#include <string>
#include <vector>

#include "graphext/schrodinger.hpp"

namespace graphext {

/// One worked coupling with the verdict its classification must reproduce.
struct CatalogueEntry {
  std::string name;
  AnyExtensionSpec spec;
  Verdict expected;
};

/// Every worked coupling family, pinned at fixed parameters.
std::vector<CatalogueEntry> example_catalogue();

struct CatalogueRun {
  struct Item {
    std::string name;
    Verdict expected;
    Verdict got;
    bool match;
    std::vector<Certificate> certificates;
  };
  std::vector<Item> items;
  bool all_match = true;
};

CatalogueRun run_catalogue(Real tol_unitary = 1e-12, Real tol_psd = 1e-10);

}  // namespace graphext

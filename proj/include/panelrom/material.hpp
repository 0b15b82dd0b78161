#pragma once

#include "panelrom/error.hpp"
#include "panelrom/types.hpp"

namespace panelrom {

// Homogeneous isotropic St. Venant-Kirchhoff material.
struct Material {
  double youngs_modulus = 207000.0; // MPa
  double poisson_ratio = 0.288;     // -
  double density = 7.829e-6;        // kg/mm^3 (input convention)

  void validate() const {
    require(youngs_modulus > 0.0, ErrCode::invalid, "Young's modulus must be positive");
    require(poisson_ratio >= 0.0 && poisson_ratio < 0.5, ErrCode::invalid,
            "Poisson ratio must be in [0, 0.5)");
    require(density > 0.0, ErrCode::invalid, "density must be positive");
  }

  double lambda() const {
    return youngs_modulus * poisson_ratio /
           ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
  double mu() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
  // Density in the internal mass unit (tonne/mm^3).
  double rho_mass() const { return density * kKgToMassUnit; }
};

} // namespace panelrom

// Built-in scenarios (also exported as scenarios/*.json).
#pragma once

#include <string>
#include <vector>

#include "cslab/scenario.hpp"

namespace cslab {

struct BuiltinScenario {
  std::string name;
  std::string text;  // JSON
};

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all{
      {"kform_t3", R"json({
  "name": "kform_t3",
  "description": "Karoubi identity for band-limited affine 1- and 2-simplices on T^3, spectral derivatives",
  "chart": {"dim": 3, "resolution": 32, "derivative": "spectral"},
  "rank": 2,
  "seed": 20240611,
  "families": [
    {"name": "edge", "kind": "fourier_random", "simplex_dim": 1, "max_mode": 1, "amplitude": 4.0},
    {"name": "tri", "kind": "fourier_random", "simplex_dim": 2, "max_mode": 1, "amplitude": 4.0}
  ],
  "tasks": [
    {"kind": "kform", "family": "edge", "p": 2},
    {"kind": "kform", "family": "tri", "p": 2},
    {"kind": "kform", "family": "edge", "p": 1},
    {"kind": "tp", "family": "tri", "p": 2}
  ]
})json"},
      {"forms_t4", R"json({
  "name": "forms_t4",
  "description": "Degree-4 identities on T^4: Karoubi at r = 1, d(cs) = c_2, d(eta) = c_2(A1) - c_2(A0)",
  "chart": {"dim": 4, "resolution": 10, "derivative": "spectral"},
  "rank": 2,
  "seed": 77,
  "families": [
    {"name": "edge", "kind": "fourier_random", "simplex_dim": 1, "max_mode": 1, "amplitude": 8.0},
    {"name": "point", "kind": "fourier_random", "simplex_dim": 0, "max_mode": 1, "amplitude": 8.0}
  ],
  "tasks": [
    {"kind": "kform", "family": "edge", "p": 2},
    {"kind": "oform", "family": "point", "p": 2},
    {"kind": "oform", "family": "point", "p": 1},
    {"kind": "eta", "family": "edge", "p": 2},
    {"kind": "eta", "family": "edge", "p": 1}
  ]
})json"},
      {"oform_t3", R"json({
  "name": "oform_t3",
  "description": "Omega identity for band-limited affine 1-simplices on T^3, linear and bent contractions",
  "chart": {"dim": 3, "resolution": 32, "derivative": "spectral"},
  "rank": 2,
  "seed": 5151,
  "contraction": {"path": "linear"},
  "families": [
    {"name": "edge", "kind": "fourier_random", "simplex_dim": 1, "max_mode": 1, "amplitude": 4.0},
    {"name": "point", "kind": "fourier_random", "simplex_dim": 0, "max_mode": 1, "amplitude": 4.0}
  ],
  "tasks": [
    {"kind": "oform", "family": "edge", "p": 2},
    {"kind": "oform", "family": "edge", "p": 2, "contraction": {"path": "bent", "max_mode": 1, "amplitude": 2.0}},
    {"kind": "oform", "family": "point", "p": 2},
    {"kind": "omega", "family": "edge", "p": 2, "cycles": [{"axes": [0, 1]}, {"axes": [1, 2]}]}
  ]
})json"},
      {"rigidity_t3", R"json({
  "name": "rigidity_t3",
  "description": "Eta-forms of fiberwise-flat paths vanish for p = 2, 3; p = 1 eta is the trace difference",
  "chart": {"dim": 3, "resolution": 20, "derivative": "spectral"},
  "quadrature": {"closed_form_degree": 13},
  "rank": 3,
  "seed": 31337,
  "families": [
    {"name": "diag_pencil", "kind": "constant_pencil", "flat": true, "vertices": [
      [[[0.3, 0, 0], [0, -0.1, 0], [0, 0, 0.2]], [[0.5, 0, 0], [0, 0.4, 0], [0, 0, -0.3]], [[-0.2, 0, 0], [0, 0.1, 0], [0, 0, 0.6]]],
      [[[1.1, 0, 0], [0, 0.2, 0], [0, 0, -0.7]], [[0.1, 0, 0], [0, -0.5, 0], [0, 0, 0.9]], [[0.4, 0, 0], [0, 0.8, 0], [0, 0, -0.2]]]
    ]},
    {"name": "loop", "kind": "abelian_loop", "diagonal": [1, 2, [0, 1]],
     "offset": [0.2, -0.3, 0.1], "cosine": [[0.5], [0.1], [0.3]], "sine": [[0.2], [0.7], [-0.4]]},
    {"name": "orbit", "kind": "gauge_orbit", "simplex_dim": 1, "max_mode": 1, "amplitude": 0.5,
     "base": [[[0.3, 0, 0], [0, -0.2, 0], [0, 0, 0.1]], [[0.1, 0, 0], [0, 0.4, 0], [0, 0, 0]], [[-0.25, 0, 0], [0, 0, 0], [0, 0, 0.5]]]},
    {"name": "generic", "kind": "fourier_random", "simplex_dim": 1, "max_mode": 1, "amplitude": 4.0}
  ],
  "tasks": [
    {"kind": "eta", "family": "diag_pencil", "p": 2, "expect_zero": true},
    {"kind": "eta", "family": "diag_pencil", "p": 3, "expect_zero": true},
    {"kind": "eta", "family": "loop", "p": 2, "expect_zero": true},
    {"kind": "eta", "family": "loop", "p": 3, "expect_zero": true},
    {"kind": "eta", "family": "orbit", "p": 2, "expect_zero": true},
    {"kind": "eta", "family": "orbit", "p": 3, "expect_zero": true},
    {"kind": "eta", "family": "generic", "p": 1}
  ]
})json"},
      {"flat_vanishing", R"json({
  "name": "flat_vanishing",
  "description": "Chern density and TP vanish for r < p on abelian and gauge-orbit flat families (T^3)",
  "chart": {"dim": 3, "resolution": 20, "derivative": "spectral"},
  "quadrature": {"closed_form_degree": 13},
  "rank": 2,
  "seed": 4242,
  "families": [
    {"name": "loop", "kind": "abelian_loop", "diagonal": [1, -2],
     "offset": [0.2, -0.3, 0.1], "cosine": [[0.5], [0.1], [0.3]], "sine": [[0.2], [0.7], [-0.4]]},
    {"name": "orbit", "kind": "gauge_orbit", "simplex_dim": 1, "max_mode": 1, "amplitude": 0.5,
     "base": [[[0.3, 0], [0, -0.2]], [[0.1, 0], [0, 0.4]], [[-0.25, 0], [0, 0]]]}
  ],
  "tasks": [
    {"kind": "tp", "family": "loop", "p": 2, "expect_zero": true},
    {"kind": "tp", "family": "orbit", "p": 2, "expect_zero": true}
  ]
})json"},
      {"character_t3", R"json({
  "name": "character_t3",
  "description": "Coboundary identity of the character cochain on non-flat 1-simplices and pairings of a triangle cycle (T^3)",
  "chart": {"dim": 3, "resolution": 16, "derivative": "spectral"},
  "rank": 2,
  "seed": 90210,
  "families": [
    {"name": "e01", "kind": "fourier_random", "simplex_dim": 1, "max_mode": 1, "amplitude": 4.0},
    {"name": "pts", "kind": "fourier_random", "simplex_dim": 2, "max_mode": 1, "amplitude": 4.0}
  ],
  "chains": [
    {"name": "edge", "terms": [{"family": "e01", "coeff": 1}]},
    {"name": "triangle", "boundary_of": "pts"}
  ],
  "tasks": [
    {"kind": "coboundary", "chain": "edge", "p": 2, "cycle": {"axes": [0, 1, 2]}},
    {"kind": "coboundary", "chain": "edge", "p": 2, "cycle": {"axes": [0, 1, 2], "orientation": -1}},
    {"kind": "rho", "chain": "triangle", "p": 2, "cycles": [{"axes": [0, 1]}, {"axes": [0, 2]}, {"axes": [1, 2]}]}
  ]
})json"},
      {"flat_descent_t3", R"json({
  "name": "flat_descent_t3",
  "description": "Pairings of the boundary of a fiberwise-flat gauge-orbit 2-simplex vanish (T^3)",
  "chart": {"dim": 3, "resolution": 20, "derivative": "spectral"},
  "quadrature": {"closed_form_degree": 13},
  "rank": 2,
  "seed": 1618,
  "families": [
    {"name": "orbit", "kind": "gauge_orbit", "simplex_dim": 2, "max_mode": 1, "amplitude": 0.8,
     "base": [[[0.3, 0], [0, -0.2]], [[0.1, 0], [0, 0.4]], [[-0.25, 0], [0, 0]]]}
  ],
  "chains": [
    {"name": "boundary", "boundary_of": "orbit"}
  ],
  "tasks": [
    {"kind": "rho", "chain": "boundary", "p": 2, "expect_zero": true,
     "cycles": [{"axes": [0, 1]}, {"axes": [0, 2]}, {"axes": [1, 2]}]},
    {"kind": "rho_flat", "chain": "boundary", "p": 2, "expected": [0, 0, 0],
     "cycles": [{"axes": [0, 1]}, {"axes": [0, 2]}, {"axes": [1, 2]}]}
  ]
})json"},
      {"abelian_loop_t2", R"json({
  "name": "abelian_loop_t2",
  "description": "rho_flat of an abelian loop on T^2 against its closed form, and invariance under a large gauge transformation",
  "chart": {"dim": 2, "resolution": 8, "derivative": "spectral"},
  "rank": 2,
  "seed": 2,
  "families": [
    {"name": "loop", "kind": "abelian_loop", "diagonal": [1, 2],
     "offset": [0.3, -0.2], "cosine": [[0.5], [0]], "sine": [[0], [0.7]]},
    {"name": "loop_g", "kind": "large_gauge", "of": "loop", "windings": [1, -2], "axis": 0}
  ],
  "chains": [
    {"name": "sigma", "terms": [{"family": "loop", "coeff": 1}]},
    {"name": "sigma_g", "terms": [{"family": "loop_g", "coeff": 1}]}
  ],
  "tasks": [
    {"kind": "rho_flat", "chain": "sigma", "p": 2, "cycles": [{"axes": [0, 1]}],
     "expected": [-0.11140846016432673]},
    {"kind": "rho_flat", "chain": "sigma_g", "p": 2, "cycles": [{"axes": [0, 1]}], "reference": "sigma"}
  ]
})json"},
      {"large_gauge_t1", R"json({
  "name": "large_gauge_t1",
  "description": "The p = 1 Chern-Simons pairing on T^1 shifts by an integer under large gauge transformations",
  "chart": {"dim": 1, "resolution": 16, "derivative": "spectral"},
  "rank": 2,
  "seed": 11,
  "families": [
    {"name": "a", "kind": "fourier_random", "simplex_dim": 0, "max_mode": 2, "amplitude": 3.0},
    {"name": "a_g", "kind": "large_gauge", "of": "a", "windings": [3, -1], "axis": 0}
  ],
  "tasks": [
    {"kind": "omega", "family": "a_g", "p": 1, "cycles": [{"axes": [0]}], "reference": "a"}
  ]
})json"},
      {"convergence_fd2", R"json({
  "name": "convergence_fd2",
  "description": "Karoubi residual of an affine 2-simplex on T^3 with second-order differences (use with converge)",
  "chart": {"dim": 3, "resolution": 16, "derivative": "fd2"},
  "rank": 2,
  "seed": 20240611,
  "families": [
    {"name": "tri", "kind": "fourier_random", "simplex_dim": 2, "max_mode": 1, "amplitude": 4.0}
  ],
  "tasks": [
    {"kind": "kform", "family": "tri", "p": 2}
  ],
  "tolerances": {"kform": 1.0, "min_order": 1.9}
})json"},
  };
  return all;
}

inline const BuiltinScenario* find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace cslab

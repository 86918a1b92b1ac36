"""Symbolic and numeric checks of double-transgression identities.

Modules: exact_poly (exact polynomials and Groebner bases), cone_mult
(normal cones and multiplicities), cstar_action (weighted actions and graph
closures), chern_weil (metrics, curvature, superconnections), currents
(pairings, weak limits), grassmann_corr (subspace correspondences) and the
verifier package (scenario runner, CLI and HTTP service).
"""

__version__ = "0.1.0"

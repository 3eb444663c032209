"""ixspace: exact rational machinery for intersection-space duality.

Subpackages:
  qlinalg    exact linear algebra over Q (matrices, subspaces, Witt invariants)
  chain      finitely generated rational chain complexes and constructions
  simplicial ordered simplicial complexes, cup/cap products, duality checks
  sullivan   free CGAs, finite CDGAs, minimal models, the zeta criterion
  duality    cut-off degrees, truncation cones, obstruction and completion pipeline
  fixtures   deterministic example generators used by the CLI and the tests
  formats    the line-oriented text formats
  cli        command-line front end
"""

__version__ = "0.1.0"

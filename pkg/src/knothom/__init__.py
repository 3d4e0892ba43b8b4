"""Exact computational engine for tensor-product diagram algebras and
the categorified link invariants built from them.

Submodules, roughly bottom-up:

  qring     exact Laurent arithmetic in a scaled root of q, rational
            function scalars, Poincare series in (q, t)
  rootdata  symmetrizable Cartan data, weights, Weyl combinatorics
  uqrep     integrable representations at generic q, forms, R-matrices,
            ribbon scalars, cup/cap maps, tangle evaluation
  stendhal  the diagram algebras: straightening, blocks, corner checks
  modcat    graded right modules over computed blocks, standard modules,
            resolutions
  braidhom  braiding bimodules, tangle-to-functor pipeline, homology
  cli       command line front end
"""

__version__ = "0.1.0"

"""hmrkit: finite-dimensional models for real monopole Floer homology.

The package computes the algebraic skeleton of the theory: exact F2 and
integer linear algebra (:mod:`hmrkit.f2lin`), the three-flavor graded chain
complexes and their long exact sequence (:mod:`hmrkit.complexes`), the
blow-up Morse model of linear gradient flows (:mod:`hmrkit.morse_blowup`),
real-structure existence and enumeration from equivariant CW data
(:mod:`hmrkit.real_spinc`), index and grading arithmetic
(:mod:`hmrkit.index_grading`), and tower-module calculators for the worked
families of 3-manifolds (:mod:`hmrkit.seifert_hmr`).
"""

from . import errors

__version__ = "0.1.0"

__all__ = ["errors", "__version__"]

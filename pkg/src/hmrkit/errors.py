"""Exception hierarchy shared by all hmrkit modules.

Every error carries a stable ``code`` attribute so the CLI can emit
machine-readable error objects without string matching on messages.
"""

from __future__ import annotations


class HmrkitError(Exception):
    """Base class for all hmrkit errors."""

    code = "error"


class ShapeMismatch(HmrkitError):
    """Matrix or block dimensions are inconsistent."""

    code = "shape_mismatch"


class CompositionNonzero(HmrkitError):
    """A composite of differentials that must vanish does not."""

    code = "composition_nonzero"


class GradingViolation(HmrkitError):
    """A differential entry connects generators with the wrong grading gap."""

    code = "grading_violation"


class DegenerateSpectrum(HmrkitError):
    """Eigenvalues of a fiber matrix are not simple/zero-free within tolerance."""

    code = "degenerate_spectrum"


class StepTooLarge(HmrkitError):
    """ODE integration drifted off the unit sphere beyond tolerance."""

    code = "step_too_large"


class MalformedOrbitMap(HmrkitError):
    """Equivariant CW orbit data violates its structural invariants."""

    code = "malformed_orbit_map"


class NotChainMap(HmrkitError):
    """A cochain-level map fails to commute with the coboundaries."""

    code = "not_chain_map"


class NotCocycle(HmrkitError):
    """The supplied cochain is not closed."""

    code = "not_cocycle"


class NoRealStructure(HmrkitError):
    """No real structure exists for the given first Chern class."""

    code = "no_real_structure"


class NotDivisibleBy8(HmrkitError):
    """c1^2 - sigma is not divisible by 8; topological input is inconsistent."""

    code = "not_divisible_by_8"


class OddPairing(HmrkitError):
    """A cup-product pairing that must be even is odd."""

    code = "odd_pairing"


class NotCoprime(HmrkitError):
    """Integer parameters required to be coprime are not."""

    code = "not_coprime"


class UnknownFamily(HmrkitError):
    """The requested Brieskorn family is outside the supported table."""

    code = "unknown_family"


class AmbiguousDifferential(HmrkitError):
    """A differential cannot be pinned down; the group is undetermined."""

    code = "ambiguous_differential"

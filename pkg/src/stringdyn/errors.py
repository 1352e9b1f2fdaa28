"""Exception types shared across the package.

Unsolvable-but-legal situations (a preimage that does not exist, a verdict
outside rule coverage) are values, not exceptions; the classes here cover
contract violations, refused inputs and internal bug-signals.
"""

from __future__ import annotations


class StringdynError(Exception):
    """Base class for all package errors."""


class InputError(StringdynError):
    """Malformed user input. Carries a field path for CLI diagnostics."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class DimensionMismatch(StringdynError):
    """A vector or matrix shape disagrees with the ambient group."""


class AmbientMismatch(StringdynError):
    """Operands live over different ambient groups or backends."""


class BoundExhausted(StringdynError):
    """A stabilization loop overran its hard cap (bug-signal, not user error)."""


class CertificateFailure(StringdynError):
    """A computed object failed its own post-hoc certificate (bug-signal)."""


class VerdictMismatch(StringdynError):
    """Witnesses were requested for a verdict whose value is Zero."""


class PrefixTooShort(StringdynError):
    """The base pseudostring is too short for the requested derived family."""


class GarlandCheckFailed(StringdynError):
    """Two garland members collide on their verified prefixes (legal outcome).

    Carries the offending pair of indices; callers may fall back to a fan.
    """

    def __init__(self, k1: int, k2: int):
        self.pair = (k1, k2)
        super().__init__(f"garland prefixes {k1} and {k2} intersect")


class MultiplierExhaustion(StringdynError):
    """Not enough admissible fan multipliers below the search bound."""


class TorsionObstruction(StringdynError):
    """Ambient torsion meets the string's span, so scalar fans are unsound."""


class NoRepeatFound(StringdynError):
    """The forward orbit showed no repeat within the computed horizon."""


class PseudostringFailure(StringdynError):
    """Backward extension refused; ``reason`` is ``not_in_core`` or ``degenerate``."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class WindowTooSmall(StringdynError):
    """The window cannot contain paths of the requested depth."""


class NotFiniteToOne(StringdynError):
    """The self-map has an infinite fibre, so the direct-sum shift is undefined."""


class NotFinite(StringdynError):
    """A finite subgroup was required."""


class InfiniteIndex(StringdynError):
    """A finite-index subgroup was required."""


class AmbientInfinite(StringdynError):
    """Exhaustive enumeration was requested over an infinite group."""


class TrivialK(StringdynError):
    """Bernoulli shifts need a nontrivial coefficient group."""


class UnsupportedBackend(StringdynError):
    """The requested concrete backend does not exist."""

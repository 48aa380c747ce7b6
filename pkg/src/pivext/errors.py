"""Exception types shared across the package.

Every structural error names the first violating datum in its message so
failures are reproducible from the report alone.
"""

from __future__ import annotations


class PivextError(Exception):
    """Base class for all package errors."""


class NotClosed(PivextError):
    """Table entry out of range, or a product escapes the structure."""


class NotAssociative(PivextError):
    """Associativity fails; message names the first violating triple."""


class NoIdentity(PivextError):
    """No two-sided identity element exists."""


class NoInverse(PivextError):
    """Some element has no two-sided inverse."""


class UnsupportedParameter(PivextError):
    """Standard-family constructor called outside its supported range."""


class NotNormal(PivextError):
    """Subgroup is not normal; message names a conjugate that escapes."""


class NotAbelian(PivextError):
    """Operation requires an abelian group."""


class CoefficientMismatch(PivextError):
    """Cochain operands live over different groups or coefficients."""


class NotACocycle(PivextError):
    """Operation requires a cocycle; message names the failing tuple."""


class TooLarge(PivextError):
    """Input exceeds a documented size guard."""


class O1Obstructed(PivextError):
    """Second-stage computation requested while the first obstruction is nonzero."""


class SchemaError(PivextError):
    """Malformed problem input; message carries the field path."""


class UnknownGroup(PivextError):
    """Group specification does not resolve against the built-in catalog."""


class NotSymmetric(PivextError):
    """Bicharacter fails symmetry; message names a witness pair."""


class Degenerate(PivextError):
    """Bicharacter has a kernel; message names a witness element."""


class NotBiadditive(PivextError):
    """Bicharacter fails additivity in one slot."""

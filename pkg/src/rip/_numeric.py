"""Numeric contexts: exact rationals or floats, selected once per model.

Every quantity in a model lives in one of two modes.  In rational mode all
arithmetic is arbitrary-precision rational (gmpy2 when available, falling
back to :class:`fractions.Fraction`), comparisons are exact, and equalities
established by the solver are mathematical facts.  In float mode the same
code paths run on IEEE doubles and comparisons take explicit tolerances.

The :class:`ModeOps` object bundles the conversion and the comparisons so
that downstream code never branches on the mode by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import PreconditionError

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

NEG_INF = float("-inf")
POS_INF = float("inf")

try:
    from gmpy2 import mpq as _ratio

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _ratio = Fraction
    _HAVE_GMPY = False


def rat(numerator: Any, denominator: Any = 1):
    """Build an exact rational.

    Accepts ints, existing rationals, and strings in the forms ``"3"``,
    ``"-2/7"`` or ``"0.25"``.  Floats are converted exactly (binary value).
    Fractions are taken apart into plain ints first: gmpy2 refuses
    Fractions whose internals are mpz, which Fraction(mpq) quietly creates.
    """
    if isinstance(numerator, str):
        if denominator != 1:
            raise ValueError("string input takes no separate denominator")
        try:
            numerator = Fraction(numerator.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {numerator!r}") from exc
    if isinstance(numerator, Fraction):
        numerator = _ratio(int(numerator.numerator), int(numerator.denominator))
    if isinstance(denominator, Fraction):
        denominator = _ratio(int(denominator.numerator), int(denominator.denominator))
    if denominator == 1:
        return _ratio(numerator)
    return _ratio(numerator) / _ratio(denominator)


def is_neg_inf(x: Any) -> bool:
    return isinstance(x, float) and x == NEG_INF


def is_pos_inf(x: Any) -> bool:
    return isinstance(x, float) and x == POS_INF


def format_number(x: Any) -> str:
    """Render a number canonically: rationals as ``p/q`` or ``p``, floats via repr."""
    if isinstance(x, float):
        if x == NEG_INF:
            return "-inf"
        if x == POS_INF:
            return "inf"
        return repr(x)
    return str(x)


def parse_number(text: str, mode: str = RATIONAL):
    """Parse ``"p/q"``, integer, or decimal text into the mode's number type."""
    value = rat(text)
    return float(value) if mode == FLOAT else value


@dataclass(frozen=True)
class ModeOps:
    """Arithmetic context for one numeric mode.

    ``feas_tol`` guards solver feasibility comparisons, ``label_tol``
    quantises information-variable labels, and ``dual_tol`` is the slack
    allowed when checking duality gaps.  All three are zero in rational
    mode.
    """

    mode: str
    feas_tol: Any
    label_tol: Any
    dual_tol: Any

    def convert(self, x: Any):
        """Coerce a number into this mode, parsing strings along the way."""
        if isinstance(x, str):
            return parse_number(x, self.mode)
        if self.mode == FLOAT:
            return float(x)
        if isinstance(x, float):
            if x != x or x in (NEG_INF, POS_INF):
                raise PreconditionError("cannot convert a non-finite float to a rational")
            return rat(x)
        return rat(x)

    @property
    def zero(self):
        return 0.0 if self.mode == FLOAT else rat(0)

    @property
    def one(self):
        return 1.0 if self.mode == FLOAT else rat(1)

    def eq(self, a, b, tol=None) -> bool:
        t = self.feas_tol if tol is None else tol
        if t == 0:
            return a == b
        return abs(a - b) <= t

    def leq(self, a, b, tol=None) -> bool:
        t = self.feas_tol if tol is None else tol
        return a <= b + t

    def lt(self, a, b, tol=None) -> bool:
        """Strictly less, consistent with :meth:`eq` at the tolerance."""
        return a < b and not self.eq(a, b, tol)

    def is_zero(self, a, tol=None) -> bool:
        return self.eq(a, self.zero, tol)

    def nonneg(self, a, tol=None) -> bool:
        return self.leq(self.zero, a, tol)

    def pos(self, a, tol=None) -> bool:
        return self.lt(self.zero, a, tol)


RATIONAL_OPS = ModeOps(RATIONAL, feas_tol=0, label_tol=0, dual_tol=0)
FLOAT_OPS = ModeOps(FLOAT, feas_tol=1e-9, label_tol=1e-12, dual_tol=1e-7)


def get_ops(mode: str) -> ModeOps:
    if mode == RATIONAL:
        return RATIONAL_OPS
    if mode == FLOAT:
        return FLOAT_OPS
    raise PreconditionError(f"unknown numeric mode {mode!r}; expected one of {MODES}")

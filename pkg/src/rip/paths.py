"""Finite path spaces: grids, lattices, traded options, and enlargement.

A model lives on a finite set of price paths over a uniform time grid.
Each path records, at every grid index, the prices of ``n_assets`` base
assets and ``n_options`` dynamically traded options; all coordinates are
normalised to start at 1 and stay nonnegative.  Lattice constructors
enumerate independent multiplicative moves, and :func:`build_info_space`
adjoins option price coordinates to a base space so that an option can be
traded dynamically alongside the assets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from ._numeric import (
    FLOAT,
    ModeOps,
    RATIONAL,
    format_number,
    get_ops,
    rat,
)
from .errors import CapacityError, PreconditionError
from .payoff import Expr, constant_payoff, evaluate_payoff, parse_payoff, validate_payoff

PATH_CAP = 10**6

try:
    from gmpy2 import iroot as _iroot

    def _nth_root_exact(n: int, k: int) -> Optional[int]:
        root, exact = _iroot(n, k)
        return int(root) if exact else None

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def _nth_root_exact(n: int, k: int) -> Optional[int]:
        if n == 0:
            return 0
        root = round(n ** (1.0 / k))
        for cand in (root - 1, root, root + 1):
            if cand >= 0 and cand**k == n:
                return cand
        return None


@dataclass(frozen=True)
class TimeGrid:
    """A uniform grid with ``n_steps`` steps on ``[0, horizon]``."""

    n_steps: int
    horizon: Any = 1

    def __post_init__(self):
        if self.n_steps < 1:
            raise PreconditionError("a time grid needs at least one step")

    @property
    def indices(self) -> range:
        return range(self.n_steps + 1)

    def times(self, ops: ModeOps) -> tuple:
        h = ops.convert(self.horizon)
        return tuple(h * k / self.n_steps for k in self.indices)


@dataclass(frozen=True)
class Path:
    """One price trajectory: ``values[k][i-1]`` is coordinate ``i`` at index ``k``."""

    values: tuple

    @property
    def n_steps(self) -> int:
        return len(self.values) - 1

    @property
    def n_coords(self) -> int:
        return len(self.values[0])

    def coord(self, asset: int, k: int):
        """Coordinate ``asset`` (1-based) at grid index ``k``."""
        return self.values[k][asset - 1]

    def series(self, asset: int) -> tuple:
        return tuple(row[asset - 1] for row in self.values)

    def __str__(self) -> str:
        rows = []
        for row in self.values:
            rows.append("(" + ", ".join(format_number(x) for x in row) + ")")
        return " -> ".join(rows)


@dataclass(frozen=True)
class DynamicOption:
    """A traded option: terminal payoff on the base assets and a quoted price."""

    payoff: Expr
    price: Any
    name: str = ""


@dataclass(frozen=True)
class StaticOption:
    """A claim bought or sold only at time zero, at a quoted price."""

    payoff: Expr
    price: Any
    name: str = ""


@dataclass(frozen=True)
class StaticOptionBook:
    """The static instruments available at time zero.

    Slot 0 is always cash (payoff 1, price 1); ``options`` holds the rest.
    Positions in every slot may be long or short and any size.
    """

    options: tuple = ()

    @classmethod
    def cash_only(cls) -> "StaticOptionBook":
        return cls(())

    @classmethod
    def of(cls, *options: StaticOption) -> "StaticOptionBook":
        return cls(tuple(options))

    @property
    def size(self) -> int:
        return 1 + len(self.options)

    @property
    def is_cash_only(self) -> bool:
        return not self.options

    def prices(self, ops: ModeOps) -> list:
        return [ops.one] + [ops.convert(o.price) for o in self.options]

    def payoff_matrix(self, space: "PathSpace") -> list:
        """Per-instrument payoff vectors over the space's paths, cash first."""
        rows = [[space.ops.one] * len(space.paths)]
        for option in self.options:
            rows.append([space.claim_value(option.payoff, p) for p in range(len(space.paths))])
        return rows

    def describe(self) -> list:
        out = []
        for i, o in enumerate(self.options, start=1):
            out.append(
                {
                    "slot": i,
                    "name": o.name or f"static-{i}",
                    "price": format_number(o.price),
                }
            )
        return out


@dataclass(eq=False)
class PathSpace:
    """A finite family of distinct paths sharing one grid and numeric mode.

    Instances are immutable in practice and hashable by identity, which the
    partition caches rely on.  ``n_assets`` counts base assets and
    ``n_options`` the adjoined dynamically traded options; path rows have
    ``n_assets + n_options`` coordinates.
    """

    grid: TimeGrid
    n_assets: int
    n_options: int
    paths: tuple
    mode: str = RATIONAL
    dynamic_options: tuple = ()
    _claim_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.ops = get_ops(self.mode)
        if self.n_assets < 1:
            raise PreconditionError("a path space needs at least one asset")
        if len(self.dynamic_options) != self.n_options:
            raise PreconditionError("one dynamic option record per option coordinate")
        width = self.n_assets + self.n_options
        seen = set()
        for p, path in enumerate(self.paths):
            if len(path.values) != self.grid.n_steps + 1:
                raise PreconditionError(f"path {p} does not match the grid length")
            for row in path.values:
                if len(row) != width:
                    raise PreconditionError(f"path {p} does not have {width} coordinates")
                for x in row:
                    if x < 0:
                        raise PreconditionError(f"path {p} has a negative coordinate")
            if any(x != self.ops.one for x in path.values[0]):
                raise PreconditionError(f"path {p} does not start at 1 in every coordinate")
            if path.values in seen:
                raise PreconditionError(f"path {p} duplicates an earlier path")
            seen.add(path.values)
        if not self.paths:
            raise PreconditionError("a path space needs at least one path")
        self._verify_option_terminals()

    def _verify_option_terminals(self):
        last = self.grid.n_steps
        for j, option in enumerate(self.dynamic_options):
            coord = self.n_assets + 1 + j
            price = self.ops.convert(option.price)
            if not self.ops.pos(price):
                raise PreconditionError(f"dynamic option {j + 1} must have a positive price")
            for p, path in enumerate(self.paths):
                base = path.values[: last + 1]
                payoff = evaluate_payoff(option.payoff, [row[: self.n_assets] for row in base], self.ops)
                want = payoff / price
                if not self.ops.eq(path.coord(coord, last), want):
                    raise PreconditionError(
                        f"path {p}: option coordinate {coord} does not end at payoff/price"
                    )

    @property
    def n_coords(self) -> int:
        return self.n_assets + self.n_options

    @property
    def n_steps(self) -> int:
        return self.grid.n_steps

    def all_paths(self) -> tuple:
        return tuple(range(len(self.paths)))

    def claim_values(self, claim: Expr) -> tuple:
        """Evaluate a payoff on every path, cached per expression."""
        key = claim
        try:
            return self._claim_cache[key]
        except KeyError:
            pass
        except TypeError:
            key = None
        values = tuple(
            evaluate_payoff(claim, path.values, self.ops) for path in self.paths
        )
        if key is not None:
            self._claim_cache[key] = values
        return values

    def claim_value(self, claim: Expr, path_index: int):
        return self.claim_values(claim)[path_index]

    def describe(self) -> dict:
        return {
            "paths": len(self.paths),
            "steps": self.grid.n_steps,
            "assets": self.n_assets,
            "traded_options": self.n_options,
            "mode": self.mode,
        }


def _normalise_ratio_sets(ratios, n_assets: int, n_steps: int, ops: ModeOps) -> list:
    """Expand the accepted shorthand shapes into per-step, per-asset lists."""

    def is_number(x) -> bool:
        return isinstance(x, (int, str, float, Fraction)) or not isinstance(x, (list, tuple))

    if isinstance(ratios, (list, tuple)) and ratios and all(is_number(r) for r in ratios):
        one_set = list(ratios)
        full = [[one_set for _ in range(n_assets)] for _ in range(n_steps)]
    elif (
        isinstance(ratios, (list, tuple))
        and len(ratios) == n_steps
        and all(isinstance(r, (list, tuple)) and r and all(is_number(x) for x in r) for r in ratios)
    ):
        if n_assets != 1:
            raise PreconditionError(
                "per-step ratio lists need an inner per-asset level when n_assets > 1"
            )
        full = [[list(r)] for r in ratios]
    else:
        if not isinstance(ratios, (list, tuple)) or len(ratios) != n_steps:
            raise PreconditionError("expected one ratio set per step")
        full = []
        for t, per_asset in enumerate(ratios):
            if not isinstance(per_asset, (list, tuple)) or len(per_asset) != n_assets:
                raise PreconditionError(f"step {t}: expected one ratio set per asset")
            full.append([list(r) for r in per_asset])

    out = []
    for t, per_asset in enumerate(full):
        row = []
        for i, rset in enumerate(per_asset):
            vals = [ops.convert(x) for x in rset]
            if any(v <= 0 for v in vals):
                raise PreconditionError(f"step {t}, asset {i + 1}: ratios must be positive")
            if len(set(vals)) != len(vals):
                raise PreconditionError(f"step {t}, asset {i + 1}: duplicate ratio")
            row.append(vals)
        out.append(row)
    return out


def build_lattice(
    n_assets: int,
    n_steps: int,
    ratios,
    mode: str = RATIONAL,
    horizon: Any = 1,
) -> PathSpace:
    """Enumerate every path whose per-step moves multiply by listed ratios.

    ``ratios`` may be a flat list (one set, reused for every step of a
    single asset), a per-step list of sets (single asset), or a per-step
    list of per-asset sets.  Moves combine freely across steps and assets,
    so the space holds the full product; the size is checked against
    ``PATH_CAP`` before anything is enumerated.
    """
    ops = get_ops(mode)
    sets = _normalise_ratio_sets(ratios, n_assets, n_steps, ops)

    total = 1
    for per_asset in sets:
        for rset in per_asset:
            total *= len(rset)
    if total > PATH_CAP:
        raise CapacityError(f"lattice would hold {total} paths (cap {PATH_CAP})")

    start = tuple([ops.one] * n_assets)
    prefixes = [(start,)]
    for per_asset in sets:
        move_choices = [(ops.one,)]
        for rset in per_asset:
            move_choices = [m + (r,) for m in move_choices for r in rset]
        moves = [m[1:] for m in move_choices]
        grown = []
        for prefix in prefixes:
            last = prefix[-1]
            for move in moves:
                nxt = tuple(last[i] * move[i] for i in range(n_assets))
                grown.append(prefix + (nxt,))
        prefixes = grown

    paths = tuple(Path(values) for values in prefixes)
    return PathSpace(TimeGrid(n_steps, horizon), n_assets, 0, paths, mode)


def space_from_paths(
    values: Sequence[Sequence[Sequence[Any]]],
    n_assets: int,
    mode: str = RATIONAL,
    horizon: Any = 1,
    dynamic_options: tuple = (),
) -> PathSpace:
    """Build a space from explicit per-path coordinate rows."""
    if not values:
        raise PreconditionError("a path space needs at least one path")
    if len(values) > PATH_CAP:
        raise CapacityError(f"{len(values)} paths exceeds the cap {PATH_CAP}")
    ops = get_ops(mode)
    paths = tuple(
        Path(tuple(tuple(ops.convert(x) for x in row) for row in path)) for path in values
    )
    n_steps = len(paths[0].values) - 1
    if n_steps < 1:
        raise PreconditionError("paths need at least one step")
    n_options = len(dynamic_options)
    return PathSpace(
        TimeGrid(n_steps, horizon), n_assets, n_options, paths, mode, tuple(dynamic_options)
    )


def _prefix_groups(paths: Sequence[Path], t: int) -> list:
    groups: dict = {}
    for p, path in enumerate(paths):
        groups.setdefault(path.values[: t + 1], []).append(p)
    return sorted(groups.values(), key=lambda g: g[0])


def _geometric_interior(y, k: int, n: int, ops: ModeOps):
    """The value ``y ** (k/n)``, exact in rational mode or an error.

    ``k = 0`` is 1 even at ``y = 0``: the coordinate starts at the
    normalised quote and only then collapses.
    """
    if k == 0:
        return ops.one
    if ops.mode == FLOAT:
        return float(y) ** (k / n)
    value = Fraction(y)
    if value == 0:
        return ops.zero
    num = _nth_root_exact(value.numerator**k, n)
    den = _nth_root_exact(value.denominator**k, n)
    if num is None or den is None:
        raise PreconditionError(
            f"geometric interior value {format_number(value)}^({k}/{n}) is not rational; "
            "supply a reference measure or use float mode"
        )
    return rat(num, den)


def build_info_space(
    base: PathSpace,
    options: Sequence[DynamicOption],
    interior: str = "geometric",
    reference: Optional[Sequence[Any]] = None,
) -> PathSpace:
    """Adjoin traded-option price coordinates to a base asset space.

    Each option contributes one coordinate that starts at 1 and ends at
    ``payoff / price``.  Interior values are free in principle; this
    builder offers two concrete rules.  ``"geometric"`` interpolates each
    path's terminal value along a geometric curve, which keeps rational
    mode exact only when the needed roots exist.  ``"reference"`` takes
    conditional expectations of the terminal value under a caller-supplied
    probability weight vector on the base paths, which must price every
    option at 1 after normalisation and give positive mass to every
    prefix class.
    """
    if base.n_options:
        raise PreconditionError("options can only be adjoined to a pure asset space")
    if not options:
        raise PreconditionError("need at least one option to adjoin")
    ops = base.ops
    n = base.n_steps

    if interior == "reference":
        if reference is None:
            raise PreconditionError("interior='reference' needs a weight vector")
        weights = [ops.convert(w) for w in reference]
        if len(weights) != len(base.paths):
            raise PreconditionError("reference weights must cover every base path")
        if any(w < 0 for w in weights) or not ops.eq(sum(weights), ops.one):
            raise PreconditionError("reference weights must be a probability vector")
    elif interior == "geometric":
        weights = None
        if reference is not None:
            raise PreconditionError("reference weights only apply with interior='reference'")
    else:
        raise PreconditionError(f"unknown interior rule {interior!r}")

    columns = []  # per option: per path: per grid index
    for j, option in enumerate(options):
        validate_payoff(option.payoff, base.n_assets, n)
        price = ops.convert(option.price)
        if not ops.pos(price):
            raise PreconditionError(f"option {j + 1}: price must be positive")
        terminal = []
        for p in range(len(base.paths)):
            y = base.claim_value(option.payoff, p) / price
            if y < 0:
                raise PreconditionError(
                    f"option {j + 1}: payoff is negative on path {p}; "
                    "price coordinates cannot go negative"
                )
            terminal.append(y)
        if weights is None:
            col = [
                [_geometric_interior(terminal[p], k, n, ops) for k in range(n + 1)]
                for p in range(len(base.paths))
            ]
        else:
            expected = sum(w * y for w, y in zip(weights, terminal))
            if not ops.eq(expected, ops.one):
                raise PreconditionError(
                    f"option {j + 1}: reference measure prices it at "
                    f"{format_number(expected * price)}, quoted {format_number(price)}"
                )
            col = [[None] * (n + 1) for _ in range(len(base.paths))]
            for k in range(n + 1):
                for group in _prefix_groups(base.paths, k):
                    mass = sum(weights[p] for p in group)
                    if not ops.pos(mass):
                        raise PreconditionError(
                            "reference measure gives zero mass to a prefix class; "
                            "conditional values are undefined there"
                        )
                    value = sum(weights[p] * terminal[p] for p in group) / mass
                    for p in group:
                        col[p][k] = value
        columns.append(col)

    new_paths = []
    for p, path in enumerate(base.paths):
        rows = []
        for k, row in enumerate(path.values):
            rows.append(tuple(row) + tuple(columns[j][p][k] for j in range(len(options))))
        new_paths.append(tuple(rows))

    return space_from_paths(
        new_paths, base.n_assets, base.mode, base.grid.horizon, tuple(options)
    )


def sup_dist(a: Path, b: Path):
    """Uniform distance: the largest coordinate gap over all grid indices."""
    if len(a.values) != len(b.values) or a.n_coords != b.n_coords:
        raise PreconditionError("paths must share grid length and coordinate count")
    gaps = [
        abs(x - y) for row_a, row_b in zip(a.values, b.values) for x, y in zip(row_a, row_b)
    ]
    return max(gaps)


def fatten(space: PathSpace, subset: Iterable[int], radius) -> tuple:
    """All path indices within ``radius`` of ``subset`` in uniform distance."""
    eps = space.ops.convert(radius)
    if eps < 0:
        raise PreconditionError("fattening radius must be nonnegative")
    core = sorted(set(subset))
    if not core:
        raise PreconditionError("cannot fatten an empty set")
    for p in core:
        if not 0 <= p < len(space.paths):
            raise PreconditionError(f"path index {p} out of range")
    out = []
    for q in range(len(space.paths)):
        dist = min(sup_dist(space.paths[q], space.paths[p]) for p in core)
        if dist <= eps:
            out.append(q)
    return tuple(out)


def min_separation(space: PathSpace):
    """Smallest positive uniform distance between two paths, or None."""
    best = None
    for p in range(len(space.paths)):
        for q in range(p + 1, len(space.paths)):
            d = sup_dist(space.paths[p], space.paths[q])
            if d > 0 and (best is None or d < best):
                best = d
    return best


def parse_claim(text: str, space: PathSpace) -> Expr:
    """Parse payoff text and check it against a space's shape."""
    expr = parse_payoff(text)
    validate_payoff(expr, space.n_coords, space.n_steps)
    return expr


__all__ = [
    "PATH_CAP",
    "TimeGrid",
    "Path",
    "PathSpace",
    "DynamicOption",
    "StaticOption",
    "StaticOptionBook",
    "build_lattice",
    "space_from_paths",
    "build_info_space",
    "sup_dist",
    "fatten",
    "min_separation",
    "parse_claim",
    "constant_payoff",
]

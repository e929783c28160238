"""Superhedging: cheapest portfolios dominating a claim pathwise.

A hedge combines static positions in the option book (held from time zero)
with a self-financing dynamic strategy in all traded coordinates, whose
holdings at each grid index are constant on the atoms of the agent's
partition.  The superhedging value of a claim over a set of paths is the
least initial cost of such a portfolio whose terminal wealth dominates the
claim on every path of the set; it is one linear program per
initial-capital atom, and the value is ``-inf`` exactly when the program
is unbounded, in which case the improving direction is an arbitrage and is
kept as a witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

from ._numeric import NEG_INF, is_neg_inf
from .errors import InternalCheckError, PreconditionError, UndefinedHoldingError
from .information import (
    AtomTable,
    InfoStructure,
    VARIANT_DYNAMIC,
    VARIANT_NONE,
    atoms_at,
    check_scaling_form,
    f_atom,
    market_partition,
)
from .lp import LinearProgram, Optimal, Unbounded, solve_checked
from .paths import PathSpace, StaticOptionBook, fatten
from .payoff import Expr, validate_payoff


@dataclass
class Strategy:
    """Concrete portfolio: static positions plus atom-wise dynamic holdings.

    ``static`` has one position per book slot (cash first).  ``dynamic``
    maps ``(t, atom_paths)`` to a holdings tuple over all traded
    coordinates, valid from ``t`` to ``t + 1``.  An empty ``dynamic`` means
    no dynamic trading at all; a non-empty one must cover every atom it is
    ever asked about.
    """

    static: tuple
    dynamic: dict
    span: tuple = (0, 0)

    def cost(self, book: StaticOptionBook, ops) -> Any:
        prices = book.prices(ops)
        return sum((a * p for a, p in zip(self.static, prices)), ops.zero)


def _holding(dynamic: dict, t: int, path_index: int) -> Optional[tuple]:
    if not dynamic:
        return None
    for (kt, paths), holding in dynamic.items():
        if kt == t and path_index in paths:
            return holding
    raise UndefinedHoldingError(
        f"strategy defines no holding at t={t} on an atom containing path {path_index}"
    )


def gains(
    space: PathSpace,
    dynamic: Optional[dict],
    path_index: int,
    t_from: int,
    t_to: int,
) -> Any:
    """Trading gains of atom-wise holdings along one path over ``[t_from, t_to]``.

    ``dynamic`` is a ``(t, atom_paths) -> holdings`` map as in
    :class:`Strategy`; ``None`` or an empty map means hold nothing.  Asks
    for a holding at every ``t`` in ``[t_from, t_to)`` and raises
    :class:`UndefinedHoldingError` if a non-empty map misses one.
    """
    ops = space.ops
    if not 0 <= t_from <= t_to <= space.n_steps:
        raise PreconditionError(f"need 0 <= {t_from} <= {t_to} <= {space.n_steps}")
    if not 0 <= path_index < len(space.paths):
        raise PreconditionError(f"path index {path_index} out of range")
    if isinstance(dynamic, Strategy):
        dynamic = dynamic.dynamic
    total = ops.zero
    path = space.paths[path_index]
    for t in range(t_from, t_to):
        holding = _holding(dynamic, t, path_index) if dynamic else None
        if holding is None:
            continue
        row_now, row_next = path.values[t], path.values[t + 1]
        for i in range(space.n_coords):
            total = total + holding[i] * (row_next[i] - row_now[i])
    return total


@dataclass(frozen=True)
class ArbitrageRay:
    """A direction of strictly negative cost whose payout never falls short.

    Witnesses an unbounded hedge: adding it to any portfolio keeps every
    pathwise constraint and lowers the cost, so no cheapest portfolio
    exists.  Scaled so the static cost is exactly -1.
    """

    static: tuple
    dynamic: dict
    cost: Any


@dataclass(frozen=True)
class HedgeValue:
    """Outcome for one initial-capital atom: a value and its witness."""

    value: Any
    strategy: Optional[Strategy] = None
    ray: Optional[ArbitrageRay] = None
    pivots: int = 0

    @property
    def finite(self) -> bool:
        return not is_neg_inf(self.value)


@dataclass
class HedgeProblem:
    """One superhedging linear program and its variable layout."""

    space: PathSpace
    target: tuple
    claim_values: tuple  # aligned with target
    book: StaticOptionBook
    t_from: int
    dynamic_vars: tuple  # of (t, atom_paths, coord)
    lp: LinearProgram

    @property
    def n_static(self) -> int:
        return self.book.size


def build_hedge_problem(
    space: PathSpace,
    target: Sequence[int],
    info: InfoStructure,
    claim: Expr,
    book: StaticOptionBook,
    t_from: int = 0,
) -> HedgeProblem:
    """Assemble the cost-minimising program for one path set.

    Variables are the static positions (cash first) followed by one holding
    per ``(t, atom, coordinate)`` for atoms meeting the target; all are
    free.  One ``>=`` row per target path requires terminal wealth to
    dominate the claim there.
    """
    ops = space.ops
    target = tuple(sorted(set(target)))
    if not target:
        raise PreconditionError("cannot hedge over an empty path set")
    for p in target:
        if not 0 <= p < len(space.paths):
            raise PreconditionError(f"path index {p} out of range")
    validate_payoff(claim, space.n_coords, space.n_steps)
    all_claim = space.claim_values(claim)
    claim_values = tuple(all_claim[p] for p in target)
    payoff_rows = book.payoff_matrix(space)

    n = space.n_steps
    dynamic_vars = []
    for t in range(t_from, n):
        for atom in atoms_at(space, info, t):
            if any(p in target for p in atom.paths):
                for i in range(space.n_coords):
                    dynamic_vars.append((t, atom.paths, i))
    n_static = book.size
    n_vars = n_static + len(dynamic_vars)

    var_at = {key: n_static + k for k, key in enumerate(dynamic_vars)}
    rows = []
    for row_idx, p in enumerate(target):
        coeffs = [ops.zero] * n_vars
        for l in range(n_static):
            coeffs[l] = payoff_rows[l][p]
        path = space.paths[p]
        for t in range(t_from, n):
            key_atom = None
            for atom in atoms_at(space, info, t):
                if p in atom.paths:
                    key_atom = atom.paths
                    break
            row_now, row_next = path.values[t], path.values[t + 1]
            for i in range(space.n_coords):
                delta = row_next[i] - row_now[i]
                if delta != ops.zero:
                    coeffs[var_at[(t, key_atom, i)]] = delta
        rows.append((coeffs, ">=", claim_values[row_idx]))

    objective = list(book.prices(ops)) + [ops.zero] * len(dynamic_vars)
    lp = LinearProgram.build("min", objective, rows, ["free"] * n_vars)
    return HedgeProblem(space, target, claim_values, book, t_from, tuple(dynamic_vars), lp)


def extract_strategy(outcome, problem: HedgeProblem) -> Strategy:
    """Read a strategy off an optimal hedge solve and re-verify it pathwise.

    Checks, by direct evaluation, that the strategy's terminal wealth
    dominates the claim on every target path and that its cost matches the
    reported value; a failure raises :class:`InternalCheckError`.  Passing
    an unbounded or infeasible outcome is an error.
    """
    if not isinstance(outcome, Optimal):
        raise PreconditionError("only an optimal outcome carries a strategy")
    n_static = problem.n_static
    static = tuple(outcome.x[:n_static])
    dynamic: dict = {}
    for key, value in zip(problem.dynamic_vars, outcome.x[n_static:]):
        t, paths, i = key
        holding = dynamic.setdefault((t, paths), [problem.space.ops.zero] * problem.space.n_coords)
        holding[i] = value
    dynamic = {k: tuple(v) for k, v in dynamic.items()}
    strategy = Strategy(static, dynamic, (problem.t_from, problem.space.n_steps))

    space = problem.space
    ops = space.ops
    payoff_rows = problem.book.payoff_matrix(space)
    cost = strategy.cost(problem.book, ops)
    if not ops.eq(cost, outcome.value, ops.dual_tol):
        raise InternalCheckError("strategy cost does not match the solver value")
    for row_idx, p in enumerate(problem.target):
        wealth = sum(
            (static[l] * payoff_rows[l][p] for l in range(n_static)), ops.zero
        ) + gains(space, dynamic, p, problem.t_from, space.n_steps)
        if wealth < problem.claim_values[row_idx] - ops.dual_tol:
            raise InternalCheckError(
                f"extracted strategy fails to dominate the claim on path {p}"
            )
    return strategy


def _hedge_value(problem: HedgeProblem) -> HedgeValue:
    outcome = solve_checked(problem.lp, problem.space.ops)
    if isinstance(outcome, Optimal):
        strategy = extract_strategy(outcome, problem)
        return HedgeValue(outcome.value, strategy=strategy, pivots=outcome.pivots)
    if isinstance(outcome, Unbounded):
        ops = problem.space.ops
        n_static = problem.n_static
        d_static = list(outcome.ray[:n_static])
        d_dynamic: dict = {}
        for key, value in zip(problem.dynamic_vars, outcome.ray[n_static:]):
            t, paths, i = key
            holding = d_dynamic.setdefault((t, paths), [ops.zero] * problem.space.n_coords)
            holding[i] = value
        prices = problem.book.prices(ops)
        cost = sum((a * p for a, p in zip(d_static, prices)), ops.zero)
        if cost < 0:
            scale = -1 / cost
            d_static = [a * scale for a in d_static]
            d_dynamic = {k: [v * scale for v in h] for k, h in d_dynamic.items()}
            cost = -ops.one
        ray = ArbitrageRay(
            tuple(d_static),
            {k: tuple(h) for k, h in d_dynamic.items()},
            cost,
        )
        return HedgeValue(NEG_INF, ray=ray, pivots=outcome.pivots)
    raise InternalCheckError(
        "a superhedging program can never be infeasible; "
        "holding max-claim in cash always dominates"
    )


def superhedge(
    space: PathSpace,
    target: Optional[Iterable[int]],
    info: InfoStructure,
    claim: Expr,
    book: Optional[StaticOptionBook] = None,
) -> AtomTable:
    """Superhedging value per initial-capital atom meeting the target set.

    ``target`` is a set of path indices (``None`` for all paths).  Returns
    an :class:`AtomTable` of :class:`HedgeValue`; atoms of the
    initial-capital partition that miss the target are not listed.  The
    value on an atom is constant across its paths by construction, and is
    ``-inf`` with an arbitrage witness when the program is unbounded.
    """
    book = book or StaticOptionBook.cash_only()
    target_set = set(space.all_paths() if target is None else target)
    if not target_set:
        raise PreconditionError("cannot hedge over an empty path set")
    entries = []
    for atom in atoms_at(space, info, -1):
        meet = sorted(target_set.intersection(atom.paths))
        if not meet:
            continue
        problem = build_hedge_problem(space, meet, info, claim, book)
        entries.append((atom, _hedge_value(problem)))
    return AtomTable(entries)


def superhedge_interval(
    space: PathSpace,
    path_index: int,
    t_from: int,
    info: InfoStructure,
    claim: Expr,
) -> Any:
    """Cash-only superhedging value over the market atom at ``t_from``.

    The program runs on the paths indistinguishable from the given one up
    to ``t_from``, with trading only from ``t_from`` on.  At ``t_from = n``
    it degenerates to the claim's value on the path; at ``t_from = 0`` it
    is the plain superhedging value over the whole space.
    """
    atom = f_atom(space, path_index, t_from)
    problem = build_hedge_problem(
        space, atom.paths, info, claim, StaticOptionBook.cash_only(), t_from=t_from
    )
    return _hedge_value(problem).value


def interval_value_table(
    space: PathSpace, t_from: int, info: InfoStructure, claim: Expr
) -> AtomTable:
    """Interval superhedging values for every market atom at ``t_from``."""
    entries = []
    for atom in market_partition(space, t_from):
        problem = build_hedge_problem(
            space, atom.paths, info, claim, StaticOptionBook.cash_only(), t_from=t_from
        )
        entries.append((atom, _hedge_value(problem)))
    return AtomTable(entries)


@dataclass(frozen=True)
class DppDecomposition:
    """Direct value against the two-stage composition over one split index."""

    direct: Any
    composed: Any
    split: int
    inner: AtomTable

    @property
    def agree(self) -> bool:
        if is_neg_inf(self.direct) or is_neg_inf(self.composed):
            return is_neg_inf(self.direct) and is_neg_inf(self.composed)
        return self.direct == self.composed


def _check_dpp_info(space: PathSpace, info: InfoStructure, split: int) -> None:
    if info.variant not in (VARIANT_NONE, VARIANT_DYNAMIC):
        raise PreconditionError(
            "two-stage decomposition is defined for variants 'none' and 'dynamic'"
        )
    if info.variant == VARIANT_DYNAMIC:
        if info.arrival != split:
            raise PreconditionError(
                f"the split index ({split}) must equal the arrival index ({info.arrival})"
            )
        if not check_scaling_form(space, info.variable, split):
            raise PreconditionError(
                "the information variable must depend only on the renormalised tail "
                "for the decomposition to apply"
            )
    if not 0 <= split <= space.n_steps:
        raise PreconditionError(f"split index {split} outside grid 0..{space.n_steps}")


def dpp_superhedge(
    space: PathSpace, claim: Expr, split: int, info: InfoStructure
) -> DppDecomposition:
    """Compare direct superhedging with hedging into interval values at ``split``.

    The composed route superhedges, over ``[0, split]`` with market
    information, the table of cash-only interval values on ``[split, n]``;
    market atoms whose interval value is ``-inf`` impose no outer
    constraint (no finite capital is ever enough on them).  Cash-only
    throughout.
    """
    _check_dpp_info(space, info, split)
    direct = superhedge(space, None, info, claim).single().value

    inner = interval_value_table(space, split, info, claim)
    ops = space.ops
    finite_paths = []
    floor: dict = {}
    for atom, hv in inner:
        if hv.finite:
            for p in atom.paths:
                finite_paths.append(p)
                floor[p] = hv.value
    if not finite_paths:
        return DppDecomposition(direct, NEG_INF, split, inner)

    # outer program: cash plus market-adapted trading before the split
    n_static = 1
    dynamic_vars = []
    for t in range(split):
        for atom in atoms_at(space, info, t):
            if any(p in floor for p in atom.paths):
                for i in range(space.n_coords):
                    dynamic_vars.append((t, atom.paths, i))
    var_at = {key: n_static + k for k, key in enumerate(dynamic_vars)}
    rows = []
    for p in sorted(finite_paths):
        coeffs = [ops.zero] * (n_static + len(dynamic_vars))
        coeffs[0] = ops.one
        path = space.paths[p]
        for t in range(split):
            for atom in atoms_at(space, info, t):
                if p in atom.paths:
                    row_now, row_next = path.values[t], path.values[t + 1]
                    for i in range(space.n_coords):
                        delta = row_next[i] - row_now[i]
                        if delta != ops.zero:
                            coeffs[var_at[(t, atom.paths, i)]] = delta
                    break
        rows.append((coeffs, ">=", floor[p]))
    lp = LinearProgram.build(
        "min",
        [ops.one] + [ops.zero] * len(dynamic_vars),
        rows,
        ["free"] * (n_static + len(dynamic_vars)),
    )
    outcome = solve_checked(lp, ops)
    composed = outcome.value if isinstance(outcome, Optimal) else NEG_INF
    return DppDecomposition(direct, composed, split, inner)


def approx_superhedge(
    space: PathSpace,
    support: Iterable[int],
    radius,
    claim: Expr,
    book: Optional[StaticOptionBook] = None,
) -> Any:
    """Superhedging value over the fattened support.

    Fattens the given paths by ``radius`` in uniform distance and
    superhedges over the result with market information only.  At radius 0
    this is the plain value over the support; it is nondecreasing in the
    radius and saturates once the radius reaches the diameter of the space.
    """
    fat = fatten(space, support, radius)
    return superhedge(space, fat, InfoStructure.none(), claim, book).single().value


__all__ = [
    "Strategy",
    "ArbitrageRay",
    "HedgeValue",
    "HedgeProblem",
    "DppDecomposition",
    "gains",
    "build_hedge_problem",
    "extract_strategy",
    "superhedge",
    "superhedge_interval",
    "interval_value_table",
    "dpp_superhedge",
    "approx_superhedge",
]

"""Path spaces: lattices, explicit paths, adjoined options, and the metric."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rip import (
    CapacityError,
    DynamicOption,
    FLOAT,
    PreconditionError,
    build_info_space,
    build_lattice,
    fatten,
    min_separation,
    parse_claim,
    parse_payoff,
    rat,
    space_from_paths,
    sup_dist,
)


def test_lattice_sizes():
    assert len(build_lattice(1, 1, ["1/2", 1, 2]).paths) == 3
    assert len(build_lattice(1, 2, ["1/2", 1, 2]).paths) == 9
    assert len(build_lattice(1, 3, [2, "1/2"]).paths) == 8
    assert len(build_lattice(2, 1, ["1/2", 2]).paths) == 4


def test_lattice_paths_start_at_one_and_multiply(tri2):
    for path in tri2.paths:
        assert path.coord(1, 0) == 1
        for t in range(2):
            ratio = path.coord(1, t + 1) / path.coord(1, t)
            assert ratio in (rat(1, 2), rat(1), rat(2))


def test_per_step_ratio_sets():
    space = build_lattice(1, 2, [[2, 1], [3]])
    terminals = sorted(p.coord(1, 2) for p in space.paths)
    assert terminals == [3, 6]


def test_per_asset_ratio_sets():
    space = build_lattice(2, 1, [[[2, 1], [3, 1]]])
    points = {(p.coord(1, 1), p.coord(2, 1)) for p in space.paths}
    assert points == {(1, 1), (1, 3), (2, 1), (2, 3)}


@pytest.mark.parametrize("bad", [[], [0, 2], [-1, 2], [2, 2]])
def test_bad_ratio_sets_are_rejected(bad):
    with pytest.raises(PreconditionError):
        build_lattice(1, 1, bad)


def test_cap_refuses_oversized_lattices():
    with pytest.raises(CapacityError):
        build_lattice(1, 30, [1, 2, 3])


def test_space_from_paths_validates():
    good = [[(1,), (2,)], [(1,), (1,)]]
    space = space_from_paths(good, n_assets=1)
    assert len(space.paths) == 2
    with pytest.raises(PreconditionError):
        space_from_paths([[(2,), (2,)]], n_assets=1)
    with pytest.raises(PreconditionError):
        space_from_paths(good + [[(1,), (2,)]], n_assets=1)
    with pytest.raises(PreconditionError):
        space_from_paths([[(1,), (-1,)]], n_assets=1)


def test_claim_values_are_cached_per_expression(tri1, call_at_1):
    first = tri1.claim_values(call_at_1)
    assert tri1.claim_values(call_at_1) is first
    assert list(first) == [0, 0, 1]


class TestSupDist:
    def test_examples(self, tri1):
        down, flat, up = tri1.paths
        assert sup_dist(flat, up) == 1
        assert sup_dist(flat, down) == rat(1, 2)
        assert sup_dist(down, up) == rat(3, 2)

    def test_metric_properties(self, tri2):
        paths = tri2.paths
        for a in paths:
            assert sup_dist(a, a) == 0
        for a in paths[:4]:
            for b in paths[:4]:
                assert sup_dist(a, b) == sup_dist(b, a)
        a, b, c = paths[0], paths[4], paths[8]
        assert sup_dist(a, c) <= sup_dist(a, b) + sup_dist(b, c)


class TestFatten:
    def test_frozen_example(self, tri1):
        # around the flat path, radius 1/2 catches the down path too
        got = fatten(tri1, [1], rat(1, 2))
        assert got == (0, 1)

    def test_zero_radius_is_identity(self, tri1):
        assert fatten(tri1, [1], 0) == (1,)

    def test_monotone_in_radius(self, tri2):
        small = set(fatten(tri2, [4], rat(1, 4)))
        large = set(fatten(tri2, [4], rat(3, 4)))
        assert small <= large

    def test_rejects_bad_input(self, tri1):
        with pytest.raises(PreconditionError):
            fatten(tri1, [], rat(1))
        with pytest.raises(PreconditionError):
            fatten(tri1, [7], rat(1))
        with pytest.raises(PreconditionError):
            fatten(tri1, [1], rat(-1))


def test_min_separation(tri1):
    # distances: flat-down 1/2, flat-up 1, down-up 3/2
    assert min_separation(tri1) == rat(1, 2)


class TestInfoSpace:
    def test_geometric_interior_frozen_values(self, tri2):
        option = DynamicOption(parse_payoff("ind(S[1,T] >= 2)"), rat(4, 9), "digital")
        space = build_info_space(tri2, [option])
        assert space.n_coords == 2
        assert sorted(set(p.coord(2, 2) for p in space.paths)) == [0, rat(9, 4)]
        assert sorted(set(p.coord(2, 1) for p in space.paths)) == [0, rat(3, 2)]
        for path in space.paths:
            assert path.coord(2, 0) == 1

    def test_geometric_interior_refuses_irrational_roots(self, tri2):
        option = DynamicOption(parse_payoff("ind(S[1,T] >= 2)"), rat(1, 2), "digital")
        with pytest.raises(PreconditionError, match="reference measure|float mode"):
            build_info_space(tri2, [option])

    def test_float_mode_takes_real_roots(self):
        base = build_lattice(1, 2, [0.5, 1.0, 2.0], mode=FLOAT)
        option = DynamicOption(parse_payoff("ind(S[1,T] >= 2)"), 0.5, "digital")
        space = build_info_space(base, [option])
        values = sorted(set(p.coord(2, 1) for p in space.paths))
        assert values[0] == 0.0
        assert values[1] == pytest.approx(2.0 ** 0.5)

    def test_reference_interior_is_conditional_expectation(self, tri1):
        # uniform-ish weights pricing the flat digital at 1/3
        option = DynamicOption(parse_payoff("ind(S[1,T] == 1)"), rat(1, 3), "flat")
        weights = [rat(1, 3), rat(1, 3), rat(1, 3)]
        space = build_info_space(tri1, [option], interior="reference", reference=weights)
        assert all(p.coord(2, 0) == 1 for p in space.paths)
        assert sorted(p.coord(2, 1) for p in space.paths) == [0, 0, 3]

    def test_reference_interior_requires_exact_pricing(self, tri1):
        option = DynamicOption(parse_payoff("ind(S[1,T] == 1)"), rat(1, 2), "flat")
        weights = [rat(1, 3), rat(1, 3), rat(1, 3)]
        with pytest.raises(PreconditionError, match="prices it at"):
            build_info_space(tri1, [option], interior="reference", reference=weights)

    def test_reference_interior_requires_positive_prefix_mass(self, tri2):
        option = DynamicOption(parse_payoff("ind(S[1,T] >= 1)"), rat(1), "sure")
        weights = [rat(0)] * 9
        weights[4] = rat(1)
        with pytest.raises(PreconditionError, match="zero mass"):
            build_info_space(tri2, [option], interior="reference", reference=weights)

    def test_negative_payoffs_cannot_be_coordinates(self, tri1):
        option = DynamicOption(parse_payoff("S[1,T] - 1"), rat(1), "fwd")
        with pytest.raises(PreconditionError, match="negative"):
            build_info_space(tri1, [option])

    def test_double_adjoining_is_refused(self, tri1):
        option = DynamicOption(parse_payoff("ind(S[1,T] == 1)"), rat(1, 3), "flat")
        space = build_info_space(
            tri1, [option], interior="reference", reference=[rat(1, 3)] * 3
        )
        with pytest.raises(PreconditionError):
            build_info_space(space, [option])


def test_parse_claim_checks_against_the_space(tri1):
    expr = parse_claim("pos(S[1,T] - 1)", tri1)
    assert tri1.claim_values(expr) == (0, 0, 1)
    with pytest.raises(PreconditionError):
        parse_claim("S[2,T]", tri1)


@given(
    steps=st.integers(min_value=1, max_value=3),
    ratios=st.lists(
        st.fractions(min_value=Fraction(1, 4), max_value=4).filter(lambda r: r > 0),
        min_size=1,
        max_size=3,
        unique=True,
    ),
)
@settings(max_examples=60, deadline=None)
def test_lattice_enumeration_is_complete_and_distinct(steps, ratios):
    space = build_lattice(1, steps, ratios)
    assert len(space.paths) == len(ratios) ** steps
    assert len({p.values for p in space.paths}) == len(space.paths)
    for path in space.paths:
        for t in range(steps):
            assert path.coord(1, t + 1) / path.coord(1, t) in ratios

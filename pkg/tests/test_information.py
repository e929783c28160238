"""Partitions, label variables, and the path surgeries built on them."""

import pytest

from rip import (
    IncompatibleGridError,
    InfoStructure,
    InfoVariable,
    PreconditionError,
    atom_of,
    atoms_at,
    build_lattice,
    check_scaling_form,
    f_atom,
    info_from_payoff,
    joined_partition,
    lift_to_tail,
    market_partition,
    max_abs_deviation,
    parse_payoff,
    path_modify,
    range_indicator,
    rat,
    space_from_paths,
    tail_max_ratio,
    tail_range_indicator,
    time_change,
    z_partition,
)


class TestStructureConstruction:
    def test_variants_validate_their_fields(self, hits_one):
        InfoStructure.none()
        InfoStructure.plus(hits_one)
        InfoStructure.minus(hits_one)
        InfoStructure.dynamic(hits_one, 1)
        with pytest.raises(PreconditionError):
            InfoStructure(variant="plus", variable=None)
        with pytest.raises(PreconditionError):
            InfoStructure(variant="none", variable=hits_one)
        with pytest.raises(PreconditionError):
            InfoStructure(variant="dynamic", variable=hits_one, arrival=0)
        with pytest.raises(PreconditionError):
            InfoStructure(variant="minus", variable=hits_one, arrival=1)


class TestMarketPartition:
    def test_trivial_at_start_and_discrete_at_end(self, tri2):
        assert len(market_partition(tri2, 0)) == 1
        assert len(market_partition(tri2, 1)) == 3
        assert len(market_partition(tri2, 2)) == 9

    def test_refines_over_time(self, tri3):
        for t in range(3):
            coarse = market_partition(tri3, t)
            fine = market_partition(tri3, t + 1)
            for atom in fine:
                parent = atom_of(coarse, atom.paths[0])
                assert set(atom.paths) <= set(parent.paths)

    def test_f_atom_agrees_with_the_partition(self, tri2):
        for p in range(len(tri2.paths)):
            atom = f_atom(tri2, p, 1)
            assert p in atom
            assert atom == atom_of(market_partition(tri2, 1), p)


class TestZPartition:
    def test_maxdev_labels_on_the_two_step_lattice(self, tri2):
        table = z_partition(tri2, max_abs_deviation())
        labels = [a.label for a in table]
        assert labels == [0, rat(1, 2), rat(3, 4), 1, 3]
        sizes = {a.label: len(a.paths) for a in table}
        assert sizes == {0: 1, rat(1, 2): 3, rat(3, 4): 1, 1: 3, 3: 1}

    def test_partition_covers_the_space(self, tri2):
        table = z_partition(tri2, max_abs_deviation())
        seen = sorted(p for a in table for p in a.paths)
        assert seen == list(range(9))

    def test_range_indicator_is_strict(self, tri1):
        var = range_indicator(rat(1, 2), 2)
        labels = {p: var.label(tri1.paths[p], tri1.ops) for p in range(3)}
        # both endpoints fall outside the open corridor
        assert labels == {0: 0, 1: 1, 2: 0}


class TestJoinedAndDynamic:
    def test_joined_refines_market(self, tri2, hits_one):
        market = market_partition(tri2, 1)
        joined = joined_partition(tri2, hits_one, 1)
        assert len(joined) >= len(market)
        for atom in joined:
            parent = atom_of(market, atom.paths[0])
            assert set(atom.paths) <= set(parent.paths)

    def test_dynamic_atoms_frozen_count(self, tri2):
        flat_tail = info_from_payoff(parse_payoff("ind(S[1,2] / S[1,1] == 1)"), "flat-tail")
        info = InfoStructure.dynamic(flat_tail, 1)
        assert len(atoms_at(tri2, info, 0)) == 1  # before arrival: market only
        assert len(atoms_at(tri2, info, 1)) == 6
        assert len(atoms_at(tri2, info, 2)) == 9

    def test_initial_capital_atoms_by_variant(self, tri1, tri2, hits_one):
        assert len(atoms_at(tri1, InfoStructure.none(), -1)) == 1
        assert len(atoms_at(tri1, InfoStructure.minus(hits_one), -1)) == 1
        plus = atoms_at(tri1, InfoStructure.plus(hits_one), -1)
        assert [a.label for a in plus] == [0, 1]
        assert len(atoms_at(tri2, InfoStructure.dynamic(hits_one, 1), -1)) == 1

    def test_minus_joins_from_time_zero(self, tri2, hits_one):
        minus = InfoStructure.minus(hits_one)
        assert len(atoms_at(tri2, minus, 0)) == 2

    def test_dynamic_arrival_must_be_interior(self, tri1, hits_one):
        info = InfoStructure.dynamic(hits_one, 1)
        with pytest.raises(PreconditionError):
            atoms_at(tri1, info, 0)  # one-step grid has no interior index


class TestCatalogVariables:
    def test_tail_max_ratio_uses_the_renormalised_tail(self, tri2):
        var = tail_max_ratio(1)
        labels = {var.label(p, tri2.ops) for p in tri2.paths}
        assert labels == {1, 2}

    def test_tail_max_ratio_labels_zero_tails_one(self):
        space = space_from_paths([[(1,), (1,), (0,)], [(1,), (1,), (1,)]], n_assets=1)
        var = tail_max_ratio(1)
        zero_path = next(p for p in space.paths if p.coord(1, 2) == 0)
        assert var.label(zero_path, space.ops) == 1

    def test_tail_range_indicator(self, tri2):
        var = tail_range_indicator(rat(3, 4), rat(3, 2), 1)
        for path in tri2.paths:
            inside = path.coord(1, 2) / path.coord(1, 1) == 1
            assert var.label(path, tri2.ops) == (1 if inside else 0)

    def test_lift_to_tail_matches_direct_evaluation(self, tri2):
        base = range_indicator(rat(3, 4), rat(3, 2))
        lifted = lift_to_tail(base, 1)
        direct = tail_range_indicator(rat(3, 4), rat(3, 2), 1)
        for path in tri2.paths:
            assert lifted.label(path, tri2.ops) == direct.label(path, tri2.ops)


class TestScalingForm:
    def test_tail_variables_pass(self, tri2):
        assert check_scaling_form(tri2, tail_max_ratio(1), 1)
        assert check_scaling_form(tri2, tail_range_indicator(rat(3, 4), rat(3, 2), 1), 1)

    def test_prefix_dependent_variables_fail(self, tri2):
        assert not check_scaling_form(tri2, max_abs_deviation(), 1)

    def test_statics_and_extra_assets_are_out_of_scope(self, tri2):
        two = build_lattice(2, 2, ["1/2", 2])
        with pytest.raises(PreconditionError):
            check_scaling_form(two, tail_max_ratio(1), 1)


class TestPathModify:
    def test_swaps_prefixes_and_rescales_tails(self, tri2):
        old = next(p for p in tri2.paths if p.coord(1, 1) == 2)
        new = next(p for p in tri2.paths if p.coord(1, 1) == rat(1, 2))
        moved = path_modify(new, old, old, arrival=1)
        assert moved.coord(1, 1) == rat(1, 2)
        assert moved.coord(1, 2) == old.coord(1, 2) * rat(1, 4)

    def test_is_an_involution(self, tri2):
        old = tri2.paths[8]
        new = tri2.paths[0]
        for path in tri2.paths:
            once = path_modify(new, old, path, arrival=1)
            twice = path_modify(new, old, once, arrival=1)
            assert twice == path

    def test_leaves_unrelated_paths_alone(self, tri2):
        old = next(p for p in tri2.paths if p.coord(1, 1) == 2)
        new = next(p for p in tri2.paths if p.coord(1, 1) == rat(1, 2))
        flat = next(p for p in tri2.paths if p.coord(1, 1) == 1)
        assert path_modify(new, old, flat, arrival=1) == flat

    def test_preserves_tail_labels(self, tri2):
        var = tail_max_ratio(1)
        old, new = tri2.paths[8], tri2.paths[0]
        for path in tri2.paths:
            moved = path_modify(new, old, path, arrival=1)
            assert var.label(moved, tri2.ops) == var.label(path, tri2.ops)


class TestTimeChange:
    def test_identity_knot(self, tri2):
        for path in tri2.paths:
            assert time_change(2, 1, 1, path) == path

    def test_incompatible_knots_raise(self):
        space = build_lattice(1, 4, ["1/2", 2])
        with pytest.raises(IncompatibleGridError):
            time_change(4, 1, 3, space.paths[0])

    def test_endpoint_knots_freeze_one_piece(self):
        space = build_lattice(1, 2, ["1/2", 2])
        path = space.paths[0]
        moved = time_change(2, 0, 1, path)
        assert moved.values == (path.values[0], path.values[0], path.values[2])


def test_labels_are_quantised_in_float_mode():
    space = build_lattice(1, 1, [0.5, 1.0, 2.0], mode="float")
    wobbly = InfoVariable("tiny", lambda path, ops: abs(path.coord(1, 1) - 1.0) * 1e-14)
    table = z_partition(space, wobbly)
    # 0, 5e-15, 1e-14 all collapse into one label at the default tolerance
    assert len(table) == 1

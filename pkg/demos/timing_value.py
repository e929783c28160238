"""Does it matter when the signal arrives?

Take a one-step piece of news (will the next move be an up-move?) and a
one-step claim, and slide both along a three-step lattice.  Transporting
the window keeps the comparison fair: at arrival k the claim reads the
same step the label describes.

Two facts emerge.  Moving the window between interior times never
changes its worth, because the renormalised tails look identical.  And
receiving the label at time 0 never costs more capital than receiving
it later: every trading round after the news is an informed round, so
an earlier arrival only enlarges the hedger's strategy set.
"""

from rip import (
    InfoStructure,
    build_lattice,
    check_scaling_form,
    format_number as fmt,
    info_from_payoff,
    lift_to_tail,
    parse_payoff,
    superhedge,
    transport_claim,
)


def main() -> None:
    space = build_lattice(1, 3, ["1/2", 1, 2])
    claim = parse_payoff("pos(S[1,1] - 1)")
    variable = info_from_payoff(parse_payoff("ind(S[1,1] >= 2)"), "up-next")

    def value_at(arrival: int):
        moved = transport_claim(claim, arrival, space)
        lifted = lift_to_tail(variable, arrival)
        if arrival == 0:
            info = InfoStructure.minus(lifted)
        else:
            assert check_scaling_form(space, lifted, arrival)
            info = InfoStructure.dynamic(lifted, arrival)
        return superhedge(space, None, info, moved).single().value

    values = [value_at(k) for k in range(3)]
    for k, v in enumerate(values):
        print(f"label and claim at window [{k}, {k + 1}]: capital {fmt(v)}")

    assert values[1] == values[2]
    assert values[0] <= values[1]

    # without any label the claim costs more at every window
    plain = superhedge(space, None, InfoStructure.none(), claim).single().value
    print(f"same claim, no label: capital {fmt(plain)}")
    assert all(v <= plain for v in values)


if __name__ == "__main__":
    main()

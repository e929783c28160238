"""What is a signal worth?  A worked positive-premium example.

An agent who learns, before trading starts, whether the final step of a
two-step trinomial market will be flat can hedge a particular claim more
cheaply than an uninformed one.  The premium is the gap between the
uninformed capital and the worst informed capital over the label atoms.

The claim pays 1 on the path (2, 2), where the label says "flat tail",
and 1 on the path (1/2, 1/4), where it says "moving tail".  Neither
label atom supports both payments, so each informed agent hedges a
cheaper claim than the blend the uninformed agent must cover.
"""

from rip import (
    InfoStructure,
    build_lattice,
    chain_quantities,
    format_number as fmt,
    info_from_payoff,
    info_value_claim,
    parse_payoff,
    superhedge,
)


def main() -> None:
    space = build_lattice(1, 2, ["1/2", 1, 2])
    claim = parse_payoff(
        "ind(S[1,1] == 2) * ind(S[1,2] == 2)"
        " + ind(S[1,1] == 0.5) * ind(S[1,2] == 0.25)"
    )
    variable = info_from_payoff(parse_payoff("ind(S[1,2] / S[1,1] == 1)"), "flat-tail")

    uninformed = superhedge(space, None, InfoStructure.none(), claim).single().value
    print(f"uninformed capital:  {fmt(uninformed)}")

    informed = superhedge(space, None, InfoStructure.plus(variable), claim)
    for atom, hedge in informed:
        print(f"  label {fmt(atom.label)}: capital {fmt(hedge.value)}")
    worst = max(hedge.value for _, hedge in informed)
    print(f"worst informed case: {fmt(worst)}")

    premium = info_value_claim(space, variable, 0, claim)
    print(f"information premium: {fmt(premium)}")
    assert premium == uninformed - worst
    assert premium > 0

    # The premium is consistent with the five-quantity chain evaluated on
    # the label: hedges and prices, atomwise or blended, tell one story.
    chain = chain_quantities(space, variable, claim)
    print("chain:", [fmt(v) for v in chain.values()])
    assert chain.all_equal


if __name__ == "__main__":
    main()

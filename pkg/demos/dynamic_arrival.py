"""Information that arrives mid-market, and pricing in two stages.

Here the label is a function of the renormalised tail (will the rest of
the path stay inside a corridor?) and it arrives at time 1, after one
trading round.  Two things are worth seeing:

* the filtration visibly coarsens then refines: one atom at time 0, then
  market knowledge joined with the label from the arrival onward;
* the dynamic programming decomposition holds, so the value computed in
  one shot equals an interval problem up to the arrival stitched to
  per-atom tail values.
"""

from rip import (
    InfoStructure,
    atoms_at,
    build_lattice,
    dpp_price,
    dpp_superhedge,
    format_number as fmt,
    market_partition,
    parse_payoff,
    tail_range_indicator,
)


def main() -> None:
    space = build_lattice(1, 2, ["1/2", 1, 2])
    claim = parse_payoff("pos(S[1,2] - 1)")
    info = InfoStructure.dynamic(tail_range_indicator("3/4", "3/2", 1), 1)

    for t in range(3):
        joined = atoms_at(space, info, t)
        market = market_partition(space, t)
        print(f"t={t}: market atoms {len(market)}, with label {len(joined)}")

    hedge_split = dpp_superhedge(space, claim, 1, info)
    price_split = dpp_price(space, claim, 1, info)
    print(f"direct superhedge:   {fmt(hedge_split.direct)}")
    print(f"composed superhedge: {fmt(hedge_split.composed)}")
    print(f"direct price:        {fmt(price_split.direct)}")
    print(f"composed price:      {fmt(price_split.composed)}")
    assert hedge_split.agree and price_split.agree

    print("interval values feeding the composition:")
    for atom, hedge in hedge_split.inner:
        paths = ",".join(str(p) for p in atom.paths)
        print(f"  atom at t={atom.time} paths [{paths}]: {fmt(hedge.value)}")


if __name__ == "__main__":
    main()

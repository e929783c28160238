"""Pricing against almost-supported measures, and the zero-radius limit.

Pinning a measure to an exact support set can be brittle: the flat path
alone carries the only measure with support {flat}, and a claim priced
against it ignores every nearby market.  The relaxed class keeps mass
1 - eta near the support and reprices quoted options within a slim
margin, so the price moves continuously in the radius.

The script prices a call against the relaxed class around the flat path
for a few radii, then extrapolates the radius to zero exactly and checks
the limit against the rigid support-constrained price.
"""

from rip import (
    approx_price,
    approx_price_limit,
    build_lattice,
    format_number as fmt,
    parse_payoff,
    rat,
)


def main() -> None:
    space = build_lattice(1, 1, ["1/2", 1, 2])
    claim = parse_payoff("pos(S[1,1] - 1)")
    flat = tuple(
        p for p, path in enumerate(space.paths) if path.coord(1, 1) == rat(1)
    )

    for eta in [rat(1, 2), rat(1, 10), rat(1, 20), rat(1, 100)]:
        value = approx_price(space, flat, eta, claim)
        print(f"radius {fmt(eta)}: price {fmt(value)}")

    limit = approx_price_limit(space, flat, claim)
    rigid = approx_price(space, flat, 0, claim)
    print(f"limit as the radius vanishes: {fmt(limit)}")
    print(f"rigid support-constrained price: {fmt(rigid)}")
    assert limit == rigid == 0


if __name__ == "__main__":
    main()

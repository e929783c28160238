"""Command line front end.

Every command reads a model file, runs one analysis, and prints a JSON
report.  Reports are deterministic: running the same command on the same
file twice produces byte-identical output.  Exit status 0 means the
analysis ran and found no degeneracies, 2 means it ran but surfaced
infeasibilities or undefined values (listed under ``findings``), and 1
means the run itself failed (bad file, bad flags, violated precondition).

Usage::

    rip price      --model m.yaml [--atom LABEL] [--mode M] [--out F]
    rip hedge      --model m.yaml [--atom LABEL] [--mode M] [--out F]
    rip duality    --model m.yaml [--atom LABEL] [--mode M] [--out F]
    rip dpp        --model m.yaml [--t1 N] [--mode M] [--out F]
    rip info-value --model m.yaml [--t1 N] [--mode M] [--out F]
    rip chain      --model m.yaml [--atom LABEL] [--mode M] [--out F]
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Tuple

from ._numeric import MODES, is_neg_inf
from .errors import InvalidModelError, RipError
from .hedging import dpp_superhedge, superhedge
from .information import InfoStructure, VARIANT_DYNAMIC, VARIANT_NONE
from .modelfile import ModelConfig, load_model
from .payoff import payoff_to_text
from .pricing import dpp_price, model_price
from .report import (
    atom_entry,
    measure_entry,
    num,
    ray_entry,
    strategy_entry,
    to_text,
)
from .valuation import chain_quantities, duality_report, info_value_report

_COMMANDS = (
    ("price", "highest expectation under the calibrated measures, per atom"),
    ("hedge", "cheapest superhedging portfolio, per atom"),
    ("duality", "hedge and price side by side, with the five-way chain"),
    ("dpp", "direct value against the two-stage composition at a split"),
    ("info-value", "premium of a label over a family of claims"),
    ("chain", "the five equivalent quantities for a label variable"),
)


def _build_cli() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rip",
        description="robust pricing and hedging on finite path spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, text in _COMMANDS:
        cmd = sub.add_parser(name, help=text, description=text)
        cmd.add_argument("--model", required=True, help="model file (YAML)")
        cmd.add_argument("--t1", type=int, default=None, metavar="N",
                         help="information arrival / split index")
        cmd.add_argument("--atom", default=None, metavar="LABEL",
                         help="restrict the report to one labelled atom")
        cmd.add_argument("--mode", choices=MODES, default=None,
                         help="override the model's arithmetic mode")
        cmd.add_argument("--out", default=None, metavar="FILE",
                         help="write the report here instead of stdout")
    return parser


def _require_claim(config: ModelConfig):
    if config.claim is None:
        raise RipError("this command needs a 'claim' entry in the model file")
    return config.claim


def _claim_text(config: ModelConfig) -> str:
    if config.claim is None:
        return ""
    return config.claim_text or payoff_to_text(config.claim)


def _model_block(config: ModelConfig) -> dict:
    block = {
        "space": config.space.describe(),
        "information": config.info.describe(),
    }
    statics = config.book.describe()
    if statics:
        block["static_options"] = statics
    if any(s != config.space.ops.one for s in config.scales):
        block["scales"] = [num(s) for s in config.scales]
    return block


def _apply_t1(config: ModelConfig, t1: Optional[int]) -> ModelConfig:
    if t1 is None:
        return config
    if config.info.variant != VARIANT_DYNAMIC:
        raise RipError("--t1 adjusts a dynamic information variant; this model has none")
    config.info = InfoStructure.dynamic(config.info.variable, t1)
    return config


def _filter_atoms(entries: List[dict], label: Optional[str]) -> List[dict]:
    if label is None:
        return entries
    picked = [e for e in entries if e["atom"].get("label") == label]
    if not picked:
        known = sorted({e["atom"].get("label") for e in entries if "label" in e["atom"]})
        raise RipError(
            f"no atom labelled {label!r}; known labels: {', '.join(known) or '(none)'}"
        )
    return picked


def _timings(lp_solves: int, pivots: int) -> dict:
    return {"lp_solves": lp_solves, "simplex_pivots": pivots}


def _run_price(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    claim = _require_claim(config)
    table = model_price(config.space, config.target, config.info, claim, config.book)
    findings = []
    entries = []
    pivots = 0
    for atom, pv in table:
        entry = {"atom": atom_entry(atom), "value": num(pv.value)}
        if pv.measure is not None:
            entry["measure"] = measure_entry(pv.measure)
        if pv.certificate is not None:
            entry["infeasible"] = True
        entries.append(entry)
        pivots += pv.pivots
        if not pv.finite:
            findings.append(
                f"no calibrated measure lives on the atom containing path {atom.paths[0]}"
            )
    entries = _filter_atoms(entries, args.atom)
    report = {
        "command": "price",
        "model": _model_block(config),
        "claim": _claim_text(config),
        "atoms": entries,
        "timings": _timings(len(table), pivots),
    }
    return report, findings


def _run_hedge(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    claim = _require_claim(config)
    table = superhedge(config.space, config.target, config.info, claim, config.book)
    findings = []
    entries = []
    pivots = 0
    for atom, hv in table:
        entry = {"atom": atom_entry(atom), "value": num(hv.value)}
        if hv.strategy is not None:
            entry["strategy"] = strategy_entry(hv.strategy)
        if hv.ray is not None:
            entry["arbitrage"] = ray_entry(hv.ray)
        entries.append(entry)
        pivots += hv.pivots
        if not hv.finite:
            findings.append(
                f"hedging is unbounded below on the atom containing path {atom.paths[0]}"
            )
    entries = _filter_atoms(entries, args.atom)
    report = {
        "command": "hedge",
        "model": _model_block(config),
        "claim": _claim_text(config),
        "atoms": entries,
        "timings": _timings(len(table), pivots),
    }
    return report, findings


def _run_duality(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    claim = _require_claim(config)
    result = duality_report(config.space, claim, config.info, config.book)
    findings = []
    entries = []
    pivots = 0
    for entry in result.entries:
        row = {
            "atom": atom_entry(entry.atom),
            "hedge": num(entry.hedge.value),
            "price": num(entry.price.value),
        }
        if entry.feasible:
            row["gap"] = num(entry.gap)
        else:
            row["infeasible"] = True
            findings.append(
                "no calibrated measure lives on the atom containing path "
                f"{entry.atom.paths[0]}"
            )
        entries.append(row)
        pivots += entry.hedge.pivots + entry.price.pivots
    entries = _filter_atoms(entries, args.atom)
    report = {
        "command": "duality",
        "model": _model_block(config),
        "claim": _claim_text(config),
        "atoms": entries,
        "tight_everywhere": result.tight_everywhere,
        "aggregate": {
            "hedge": num(result.aggregate_hedge),
            "price": num(result.aggregate_price),
        },
        "timings": _timings(2 * len(result.entries), pivots),
    }
    if result.chain is not None:
        report["chain"] = {
            "values": [num(v) for v in result.chain.values()],
            "all_equal": result.chain.all_equal,
        }
    return report, findings


def _run_dpp(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    claim = _require_claim(config)
    if not config.book.is_cash_only:
        raise RipError("the two-stage decomposition is cash-only; drop static_options")
    if args.atom is not None:
        raise RipError("--atom does not apply to 'dpp'")
    split = args.t1
    if split is None:
        split = config.split
    if split is None and config.info.variant == VARIANT_DYNAMIC:
        split = config.info.arrival
    if split is None:
        raise RipError("give a split index via --t1 or a 'split' entry")
    if config.info.variant == VARIANT_DYNAMIC and config.info.arrival != split:
        config.info = InfoStructure.dynamic(config.info.variable, split)

    hedge = dpp_superhedge(config.space, claim, split, config.info)
    price = dpp_price(config.space, claim, split, config.info)
    findings = []
    if is_neg_inf(hedge.direct):
        findings.append("the direct superhedging value is -inf")
    if not hedge.agree:
        findings.append("hedge decomposition mismatch (direct != composed)")
    if not price.agree:
        findings.append("price decomposition mismatch (direct != composed)")

    def side(dec, values) -> dict:
        inner = []
        pivots = 0
        for atom, v in dec.inner:
            inner.append({"atom": atom_entry(atom), "value": num(values(v))})
            pivots += v.pivots
        return {
            "direct": num(dec.direct),
            "composed": num(dec.composed),
            "agree": dec.agree,
            "interval_values": inner,
            "timings": _timings(len(dec.inner), pivots),
        }

    report = {
        "command": "dpp",
        "model": _model_block(config),
        "claim": _claim_text(config),
        "split": split,
        "hedge": side(hedge, lambda hv: hv.value),
        "price": side(price, lambda pv: pv.value),
    }
    return report, findings


def _run_info_value(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    if config.info.variable is None:
        raise RipError("this command needs an 'info' block with a variable")
    if args.atom is not None:
        raise RipError("--atom does not apply to 'info-value'")
    claims = list(config.claims)
    texts = list(config.claim_texts)
    if config.claim is not None:
        claims.append(config.claim)
        texts.append(_claim_text(config))
    if not claims:
        raise RipError("give a 'claim' or a 'claims' list")
    arrival = args.t1
    if arrival is None:
        arrival = config.info.arrival if config.info.arrival is not None else 0
    result = info_value_report(config.space, config.info.variable, arrival, claims)
    findings = []
    entries = []
    for text, entry in zip(texts, result.entries):
        row = {
            "claim": text,
            "uninformed": num(entry.base),
            "informed": num(entry.informed),
        }
        if entry.flag:
            row["flag"] = entry.flag
            findings.append(f"{text}: {entry.flag}")
        else:
            row["premium"] = num(entry.value)
        entries.append(row)
    report = {
        "command": "info-value",
        "model": _model_block(config),
        "arrival": result.arrival,
        "variable": result.variable_name,
        "claims": entries,
        "value": None if result.value is None else num(result.value),
    }
    return report, findings


def _run_chain(config: ModelConfig, args) -> Tuple[dict, List[str]]:
    claim = _require_claim(config)
    if config.info.variable is None:
        raise RipError("this command needs an 'info' block with a variable")
    if not config.book.is_cash_only:
        raise RipError("the five-way chain is cash-only; drop static_options")
    result = chain_quantities(config.space, config.info.variable, claim)
    names = (
        "hedge_uninformed_capital",
        "hedge_atom_worst",
        "price_atom_best",
        "price_forced_best",
        "price_uninformed_capital",
    )
    per_atom = [
        {
            "atom": {"label": num(label)},
            "hedge": num(hedge),
            "price": num(price),
            "forced_price": num(forced),
        }
        for label, hedge, price, forced in result.per_atom
    ]
    per_atom = _filter_atoms(per_atom, args.atom)
    findings = []
    if all(is_neg_inf(v) for v in result.values()):
        findings.append("every quantity in the chain is -inf")
    if not result.all_equal:
        findings.append("chain values disagree")
    report = {
        "command": "chain",
        "model": _model_block(config),
        "claim": _claim_text(config),
        "quantities": {k: num(v) for k, v in zip(names, result.values())},
        "all_equal": result.all_equal,
        "per_atom": per_atom,
    }
    return report, findings


_RUNNERS = {
    "price": _run_price,
    "hedge": _run_hedge,
    "duality": _run_duality,
    "dpp": _run_dpp,
    "info-value": _run_info_value,
    "chain": _run_chain,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_cli().parse_args(argv)
    try:
        config = load_model(args.model, mode_override=args.mode)
        config = _apply_t1(config, args.t1) if args.command not in ("dpp", "info-value") else config
        report, findings = _RUNNERS[args.command](config, args)
    except InvalidModelError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=sys.stderr)
        return 1
    except RipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report["findings"] = findings
    text = to_text(report)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out!r} ({exc})", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 2 if findings else 0


if __name__ == "__main__":
    sys.exit(main())

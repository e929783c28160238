"""Driving everything from a model file, the way the CLI does.

Markets, claims, quoted options and information live together in one
YAML document.  This script writes such a document, loads it through the
same parser the command line uses, prices it in-process, and then calls
the CLI entry point itself to produce the JSON reports.  Run the same
commands from a shell with:

    rip price --model market.yaml
    rip duality --model market.yaml
    rip info-value --model market.yaml
"""

import json
import tempfile
from pathlib import Path

from rip import format_number as fmt, load_model, superhedge
from rip.cli import main as rip_main

MODEL = """\
grid: {steps: 2, horizon: 1}
lattice:
  ratios: ["1/2", 1, 2]
claim: >
  ind(S[1,1] == 2) * ind(S[1,2] == 2)
  + ind(S[1,1] == 0.5) * ind(S[1,2] == 0.25)
info:
  variant: minus
  variable: "ind(S[1,2] / S[1,1] == 1)"
"""


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        model_path = Path(tmp) / "market.yaml"
        model_path.write_text(MODEL)

        config = load_model(model_path)
        value = superhedge(
            config.space, None, config.info, config.claim, book=config.book
        ).single().value
        print(f"superhedging capital with the label priced in: {fmt(value)}")

        out_path = Path(tmp) / "report.json"
        code = rip_main(
            ["info-value", "--model", str(model_path), "--out", str(out_path)]
        )
        report = json.loads(out_path.read_text())
        entry = report["claims"][0]
        print(f"cli exit code {code}")
        print(f"uninformed {entry['uninformed']}, informed {entry['informed']}")
        print(f"information premium {report['value']}")


if __name__ == "__main__":
    main()

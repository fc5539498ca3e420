#!/usr/bin/env python3
"""
Publish the JSON schemas of the CLI reports.

@help.category Development Tools
@help.title Export Schemas Script
@help.description Writes one JSON schema per report model (and the experiment config) to
docs/schemas/, the contract the CLI output is validated against.
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli.commands import CertifyReport, LemmaReport, McRiskReport
from src.cli.config import ExperimentConfig

SCHEMAS = {
    "experiment_config": ExperimentConfig,
    "certify_report": CertifyReport,
    "mc_risk_report": McRiskReport,
    "lemma_report": LemmaReport,
}


def main(output_dir: str = "docs/schemas") -> int:
    target = Path(output_dir)
    target.mkdir(parents=True, exist_ok=True)
    for name, model in SCHEMAS.items():
        path = target / f"{name}.schema.json"
        path.write_text(json.dumps(model.model_json_schema(mode="serialization"), indent=2), encoding="utf-8")
        print(f"Wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""
Schema validation of per-run scenario configs (JSON, draft 2020-12).
Violations are reported with JSON-pointer paths into the config document.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from jsonschema import Draft202012Validator

from src.common.errors import ConfigError
from src.common.seeding import DEFAULT_SEED

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "schema" / "config.json"


@dataclass(frozen=True)
class Violation:
    pointer: str
    message: str

    def to_dict(self) -> dict:
        return {"pointer": self.pointer, "message": self.message}


@dataclass
class ValidationReport:
    path: str
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "valid": self.valid,
            "violations": [v.to_dict() for v in self.violations],
            "warnings": list(self.warnings),
        }


def load_schema(path: Path = SCHEMA_PATH) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def json_pointer(parts) -> str:
    """RFC 6901 pointer for a path of keys / indices."""
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def validate_document(doc, schema: dict | None = None) -> list[Violation]:
    validator = Draft202012Validator(schema or load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (json_pointer(e.absolute_path), e.message))
    return [Violation(json_pointer(e.absolute_path), e.message) for e in errors]


def validate_config(path: str | Path, default_seed: int = DEFAULT_SEED) -> ValidationReport:
    """
    Validate a scenario config file. A missing seed is not a violation: it is
    filled from `default_seed` and reported as a warning.
    """
    path = Path(path)
    report = ValidationReport(str(path))
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            report.violations.append(Violation("", f"invalid JSON: {e}"))
            return report

    report.violations.extend(validate_document(doc))
    if isinstance(doc, dict):
        if "seed" not in doc:
            msg = f"seed missing; using default {default_seed}"
            logger.warning(f"⚠️  {path}: {msg}")
            report.warnings.append(msg)
            doc = {**doc, "seed": default_seed}
        report.config = doc
    return report


def load_scenario_config(path: str | Path, default_seed: int = DEFAULT_SEED) -> dict:
    """Validated config document; raises ConfigError listing every violation."""
    report = validate_config(path, default_seed)
    if not report.valid:
        details = "; ".join(f"{v.pointer or '/'}: {v.message}" for v in report.violations)
        raise ConfigError(f"{path} violates the config schema: {details}", report.violations)
    return report.config

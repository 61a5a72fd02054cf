"""Input file parsing: scenario JSON documents and battery CSV files.

A scenario document is a JSON object with top-level keys ``family`` and
``alpha`` (required) plus ``simulation`` and ``classification`` (optional).
Unknown keys are rejected everywhere, and every validation failure names
the offending key or row, anchored to a line of the source file.

Battery files are CSV with the exact header ``id,p`` and one hypothesis per
row.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import FileFormatError
from .families import (
    AdjustmentMethod,
    AlphaConfig,
    ClassificationInput,
    FamilySpec,
    TestBattery,
    TestingMode,
    validate_family,
)
from .simulate import Design, Scenario, Sides

DEFAULT_REPS = 100_000

_FAMILY_KEYS = {"joint_id", "constituents", "mode", "exchangeable", "independent"}
_ALPHA_KEYS = {"alpha_joint", "method", "mode"}
_SIMULATION_KEYS = {"k", "null_pattern", "deltas", "n", "design", "sides", "reps", "seed"}
_CLASSIFICATION_KEYS = {
    "statistical_claim",
    "joint_inference",
    "all_constituents_required",
    "exchangeable",
    "family_theoretically_relevant",
}
_DESIGN_KEYS = {"kind", "rho"}


@dataclass(frozen=True)
class ScenarioDoc:
    """Parsed contents of a scenario JSON document."""

    family: FamilySpec
    alpha: AlphaConfig
    scenario: Scenario | None
    classification: ClassificationInput | None


class _Locator:
    """Best-effort line anchoring: first line mentioning a quoted key."""

    def __init__(self, text: str, source: str):
        self.lines = text.splitlines()
        self.source = source

    def line_of(self, key: str, after: int = 0) -> int | None:
        needle = f'"{key}"'
        for i in range(after, len(self.lines)):
            if needle in self.lines[i]:
                return i + 1
        return None

    def fail(self, message: str, key: str | None = None, after: int = 0) -> FileFormatError:
        line = self.line_of(key, after) if key else None
        where = f"{self.source}:{line}" if line else self.source
        return FileFormatError(f"{where}: {message}")


def _require_keys(obj: dict, allowed: set[str], required: set[str], section: str, loc: _Locator) -> None:
    section_line = (loc.line_of(section) or 1) - 1 if section else 0
    for key in obj:
        if key not in allowed:
            raise loc.fail(
                f"unknown key {key!r} in {section or 'document'} "
                f"(allowed: {', '.join(sorted(allowed))})",
                key,
                section_line,
            )
    for key in required:
        if key not in obj:
            raise loc.fail(f"{section or 'document'} is missing required key {key!r}", section)


def _as_bool(obj: dict, key: str, section: str, loc: _Locator) -> bool:
    value = obj[key]
    if not isinstance(value, bool):
        raise loc.fail(f"{section}.{key} must be a boolean, got {value!r}", key)
    return value


def _as_int(obj: dict, key: str, section: str, loc: _Locator) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise loc.fail(f"{section}.{key} must be an integer, got {value!r}", key)
    return value


def _as_real(obj: dict, key: str, section: str, loc: _Locator) -> float:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise loc.fail(f"{section}.{key} must be a number, got {value!r}", key)
    return float(value)


def _parse_enum(enum_cls, value, key: str, section: str, loc: _Locator):
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(member.value for member in enum_cls)
        raise loc.fail(f"{section}.{key} must be one of: {options}; got {value!r}", key) from None


def _parse_family(obj, loc: _Locator) -> FamilySpec:
    if not isinstance(obj, dict):
        raise loc.fail("family must be a JSON object", "family")
    _require_keys(obj, _FAMILY_KEYS, _FAMILY_KEYS, "family", loc)
    constituents = obj["constituents"]
    if not isinstance(constituents, list) or not all(isinstance(c, str) for c in constituents):
        raise loc.fail("family.constituents must be a list of strings", "constituents")
    if not isinstance(obj["joint_id"], str):
        raise loc.fail(f"family.joint_id must be a string, got {obj['joint_id']!r}", "joint_id")
    mode = _parse_enum(TestingMode, obj["mode"], "mode", "family", loc)
    try:
        family = FamilySpec(
            joint_id=obj["joint_id"],
            constituents=tuple(constituents),
            mode=mode,
            exchangeable=_as_bool(obj, "exchangeable", "family", loc),
            independent=_as_bool(obj, "independent", "family", loc),
        )
    except ValueError as exc:
        raise loc.fail(f"family: {exc}", "family") from None
    report = validate_family(family)
    if report.errors:
        raise loc.fail(
            "family: " + "; ".join(issue.message for issue in report.errors), "constituents"
        )
    return family


def _parse_alpha(obj, family: FamilySpec, loc: _Locator) -> AlphaConfig:
    if not isinstance(obj, dict):
        raise loc.fail("alpha must be a JSON object", "alpha")
    _require_keys(obj, _ALPHA_KEYS, _ALPHA_KEYS, "alpha", loc)
    mode = _parse_enum(TestingMode, obj["mode"], "mode", "alpha", loc)
    method = _parse_enum(AdjustmentMethod, obj["method"], "method", "alpha", loc)
    if mode is not family.mode:
        raise loc.fail(
            f"alpha.mode {mode.value!r} must match family.mode {family.mode.value!r} "
            "(individual testing involves no family and no scenario document)",
            "mode",
            (loc.line_of("alpha") or 1) - 1,
        )
    try:
        return AlphaConfig(alpha_joint=_as_real(obj, "alpha_joint", "alpha", loc), method=method, mode=mode)
    except ValueError as exc:
        raise loc.fail(f"alpha: {exc}", "alpha") from None


def _parse_design(value, loc: _Locator) -> Design:
    if isinstance(value, str):
        if value == "equicorrelated":
            raise loc.fail("equicorrelated design must be an object carrying rho", "design")
        try:
            return Design(value)
        except ValueError as exc:
            raise loc.fail(f"simulation.design: {exc}", "design") from None
    if isinstance(value, dict):
        _require_keys(value, _DESIGN_KEYS, {"kind"}, "design", loc)
        kind = value["kind"]
        if not isinstance(kind, str):
            raise loc.fail(f"design.kind must be a string, got {kind!r}", "kind")
        try:
            return Design(kind, value.get("rho"))
        except ValueError as exc:
            raise loc.fail(f"simulation.design: {exc}", "design") from None
    raise loc.fail("simulation.design must be a string or an object with a 'kind' key", "design")


def _resolve_method(alpha: AlphaConfig, family: FamilySpec, loc: _Locator) -> AdjustmentMethod:
    if alpha.method is AdjustmentMethod.NONE:
        # tool default for the simulator's disjunction arm: Sidak is exact
        # under the declared independence, Bonferroni is safe otherwise
        return AdjustmentMethod.SIDAK if family.independent else AdjustmentMethod.BONFERRONI
    if alpha.method is AdjustmentMethod.BENJAMINI_HOCHBERG:
        raise loc.fail(
            "alpha.method 'bh' controls the false discovery rate, not the FWER; pick "
            "bonferroni, sidak, holm, or hochberg for simulation",
            "method",
        )
    return alpha.method


def _parse_simulation(obj, family: FamilySpec, alpha: AlphaConfig, loc: _Locator) -> Scenario:
    if not isinstance(obj, dict):
        raise loc.fail("simulation must be a JSON object", "simulation")
    _require_keys(obj, _SIMULATION_KEYS, set(), "simulation", loc)
    k = _as_int(obj, "k", "simulation", loc) if "k" in obj else family.k
    if k != family.k:
        raise loc.fail(
            f"simulation.k ({k}) must match the family's constituent count ({family.k})", "k"
        )
    null_pattern = obj.get("null_pattern", [True] * k)
    if not isinstance(null_pattern, list) or not all(isinstance(b, bool) for b in null_pattern):
        raise loc.fail("simulation.null_pattern must be a list of booleans", "null_pattern")
    deltas = obj.get("deltas", [0.0] * k)
    if not isinstance(deltas, list) or not all(
        isinstance(d, (int, float)) and not isinstance(d, bool) for d in deltas
    ):
        raise loc.fail("simulation.deltas must be a list of numbers", "deltas")
    design = _parse_design(obj["design"], loc) if "design" in obj else Design.independent()
    sides = (
        _parse_enum(Sides, obj["sides"], "sides", "simulation", loc)
        if "sides" in obj
        else Sides.ONE_SIDED
    )
    try:
        return Scenario(
            k=k,
            null_pattern=tuple(null_pattern),
            deltas=tuple(float(d) for d in deltas),
            n=_as_int(obj, "n", "simulation", loc) if "n" in obj else 2,
            design=design,
            sides=sides,
            alpha_joint=alpha.alpha_joint,
            method=_resolve_method(alpha, family, loc),
            reps=_as_int(obj, "reps", "simulation", loc) if "reps" in obj else DEFAULT_REPS,
            seed=_as_int(obj, "seed", "simulation", loc) if "seed" in obj else 0,
        )
    except ValueError as exc:
        raise loc.fail(f"simulation: {exc}", "simulation") from None


def _parse_classification(obj, loc: _Locator) -> ClassificationInput:
    if not isinstance(obj, dict):
        raise loc.fail("classification must be a JSON object", "classification")
    _require_keys(obj, _CLASSIFICATION_KEYS, _CLASSIFICATION_KEYS, "classification", loc)
    return ClassificationInput(
        **{key: _as_bool(obj, key, "classification", loc) for key in _CLASSIFICATION_KEYS}
    )


def parse_scenario_text(text: str, source: str = "<scenario>") -> ScenarioDoc:
    loc = _Locator(text, source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{source}:{exc.lineno}: not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FileFormatError(f"{source}: top level must be a JSON object")
    _require_keys(doc, {"family", "alpha", "simulation", "classification"}, {"family", "alpha"}, "", loc)
    family = _parse_family(doc["family"], loc)
    alpha = _parse_alpha(doc["alpha"], family, loc)
    scenario = _parse_simulation(doc["simulation"], family, alpha, loc) if "simulation" in doc else None
    classification = (
        _parse_classification(doc["classification"], loc) if "classification" in doc else None
    )
    return ScenarioDoc(family=family, alpha=alpha, scenario=scenario, classification=classification)


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror or exc}") from None


def load_scenario_file(path: str | Path) -> ScenarioDoc:
    path = Path(path)
    return parse_scenario_text(_read_text(path), source=str(path))


def parse_classification_text(text: str, source: str = "<classification>") -> ClassificationInput:
    """Classification answers: either a bare object of the five booleans, or a
    full scenario document whose ``classification`` section is used."""
    loc = _Locator(text, source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{source}:{exc.lineno}: not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FileFormatError(f"{source}: top level must be a JSON object")
    if "family" in doc or "alpha" in doc or "classification" in doc:
        parsed = parse_scenario_text(text, source)
        if parsed.classification is None:
            raise FileFormatError(f"{source}: document has no classification section")
        return parsed.classification
    return _parse_classification(doc, loc)


def load_classification_file(path: str | Path) -> ClassificationInput:
    path = Path(path)
    return parse_classification_text(_read_text(path), source=str(path))


def parse_battery_text(text: str, source: str = "<battery>") -> TestBattery:
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise FileFormatError(f"{source}:1: battery file is empty; expected header 'id,p'")
    header = [cell.strip() for cell in rows[0]]
    if header != ["id", "p"]:
        raise FileFormatError(f"{source}:1: battery header must be exactly 'id,p', got {','.join(header)!r}")
    entries: list[tuple[str, float]] = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != 2:
            raise FileFormatError(f"{source}:{lineno}: expected two cells 'id,p', got {len(row)}")
        hid = row[0].strip()
        if not hid:
            raise FileFormatError(f"{source}:{lineno}: hypothesis id is empty")
        if hid in seen:
            raise FileFormatError(f"{source}:{lineno}: duplicate hypothesis id {hid!r}")
        seen.add(hid)
        try:
            p = float(row[1])
        except ValueError:
            raise FileFormatError(
                f"{source}:{lineno}: p-value for {hid!r} is not a number: {row[1]!r}"
            ) from None
        if not 0.0 <= p <= 1.0:
            raise FileFormatError(f"{source}:{lineno}: p-value for {hid!r} must lie in [0, 1], got {p}")
        entries.append((hid, p))
    if not entries:
        raise FileFormatError(f"{source}: battery file holds no test rows")
    return TestBattery(entries=tuple(entries))


def load_battery_file(path: str | Path) -> TestBattery:
    path = Path(path)
    return parse_battery_text(_read_text(path), source=str(path))

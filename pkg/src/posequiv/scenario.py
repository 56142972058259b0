"""Declarative scenarios: relation, learners, targets, texts and checks in one JSON file."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .constructions import WTable, build_family, make_set
from .criteria import (CONSTRAINTS, CRITERIA, Trace, TraceRecord, constraint_check,
                       convergence_probe, criterion_verdict, run_trace)
from .eqrel import make_relation
from .learners import LEARNER_KINDS, make_learner
from .text import arbitrary_text, canonical_text, fixed_text, seeded_text
from .verdict import BOUND, HORIZON, QUIET, STAGE_BUDGET, Verdict

CHECK_KINDS = CRITERIA + CONSTRAINTS + ("Confidence",)
TEXT_KINDS = ("canonical", "seeded", "fixed", "arbitrary")
PARAMS = {"horizon": HORIZON, "bound": BOUND, "quiet": QUIET, "budget": STAGE_BUDGET, "seed": 0}

EXIT_OK, EXIT_INPUT, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class ScenarioError(ValueError):
    """Schema problem, reported with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Scenario:
    name: str
    raw: dict
    params: dict
    relation: Any
    wtable: Optional[WTable]
    family: Any
    learners: list = field(default_factory=list)
    targets: list = field(default_factory=list)
    texts: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def combinations(self):
        """(key, learner, target-name, target-set, text-cfg) in a fixed order."""
        for lname, learner in self.learners:
            for tname, target in self.targets:
                for tcfg in self.texts:
                    yield f"{lname}__{tname}__{text_key(tcfg)}", learner, tname, target, tcfg


def text_key(cfg: dict) -> str:
    kind = cfg["kind"]
    if kind in ("seeded", "arbitrary"):
        return f"{kind}{cfg.get('seed', 0)}"
    if kind == "fixed":
        return "fixed" + "-".join(str(d) for d in cfg.get("data", []))
    return kind


def _require(obj, key, path, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioError(f"{path}.{key}", "missing required field")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{path}.{key}", f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def load_scenario(path: str | Path, overrides: Optional[dict] = None) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError("$", f"cannot read scenario: {exc}") from exc
    return build_scenario(raw, base_dir=path.parent, overrides=overrides)


def build_scenario(raw: dict, base_dir: Path = Path("."), overrides: Optional[dict] = None) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    params = dict(PARAMS)
    for key, value in (raw.get("params") or {}).items():
        if key not in PARAMS:
            raise ScenarioError(f"$.params.{key}", "unknown parameter")
        if not isinstance(value, int) or value < (0 if key == "seed" else 1):
            raise ScenarioError(f"$.params.{key}", "expected a positive integer")
        params[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            params[key] = value

    wtable = None
    if "wtable" in raw:
        wcfg = raw["wtable"]
        try:
            if isinstance(wcfg, str):
                wtable = WTable.from_json((base_dir / wcfg).read_text(encoding="utf-8"))
            else:
                wtable = WTable.from_json(wcfg)
        except (OSError, ValueError, TypeError) as exc:
            raise ScenarioError("$.wtable", str(exc)) from exc

    rcfg = _require(raw, "relation", "$", dict)
    if rcfg.get("kind") == "triple_merge" and "wtable" not in rcfg:
        if wtable is None:
            raise ScenarioError("$.relation", "triple_merge relation needs a W-table")
        rcfg = dict(rcfg, wtable=wtable.to_json())
    try:
        rel = make_relation(rcfg)
    except (ValueError, KeyError, TypeError) as exc:
        raise ScenarioError("$.relation", str(exc)) from exc

    family = None
    if "family" in raw:
        try:
            family = build_family(raw["family"], rel, wtable)
        except (ValueError, KeyError, TypeError) as exc:
            raise ScenarioError("$.family", str(exc)) from exc

    learners = []
    for i, lcfg in enumerate(_require(raw, "learners", "$", list)):
        p = f"$.learners[{i}]"
        kind = _require(lcfg, "kind", p, str)
        if kind not in LEARNER_KINDS:
            raise ScenarioError(f"{p}.kind", f"unknown learner kind {kind!r}")
        try:
            learners.append((lcfg.get("name", kind), make_learner(lcfg, rel, wtable)))
        except (ValueError, KeyError, TypeError) as exc:
            raise ScenarioError(p, str(exc)) from exc

    targets = []
    for i, tcfg in enumerate(_require(raw, "targets", "$", list)):
        p = f"$.targets[{i}]"
        name = _require(tcfg, "name", p, str)
        if "family_index" in tcfg:
            if family is None:
                raise ScenarioError(f"{p}.family_index", "scenario declares no family")
            targets.append((name, family.decode(int(tcfg["family_index"]))))
            continue
        try:
            targets.append((name, make_set(_require(tcfg, "set", p), rel)))
        except (ValueError, KeyError, TypeError) as exc:
            raise ScenarioError(f"{p}.set", str(exc)) from exc

    texts = []
    for i, tcfg in enumerate(raw.get("texts") or [{"kind": "canonical"}]):
        p = f"$.texts[{i}]"
        kind = _require(tcfg, "kind", p, str)
        if kind not in TEXT_KINDS:
            raise ScenarioError(f"{p}.kind", f"unknown text kind {kind!r}")
        if kind == "fixed" and not isinstance(tcfg.get("data"), list):
            raise ScenarioError(f"{p}.data", "fixed texts need a data list")
        texts.append(dict(tcfg))

    checks = []
    for i, ccfg in enumerate(_require(raw, "checks", "$", list)):
        p = f"$.checks[{i}]"
        ccfg = {"kind": ccfg} if isinstance(ccfg, str) else ccfg
        kind = _require(ccfg, "kind", p, str)
        if kind not in CHECK_KINDS:
            raise ScenarioError(f"{p}.kind", f"unknown check {kind!r}")
        if kind == "Vac" and not isinstance(ccfg.get("cap"), int):
            raise ScenarioError(f"{p}.cap", "Vac needs an integer cap")
        if kind == "ClassPreserving" and family is None:
            raise ScenarioError(p, "ClassPreserving needs a scenario family")
        checks.append(ccfg)

    return Scenario(raw.get("name", "scenario"), raw, params, rel, wtable, family,
                    learners, targets, texts, checks)


def make_text(cfg: dict, target, seed_offset: int = 0):
    kind = cfg["kind"]
    if kind == "canonical":
        return canonical_text(target)
    if kind == "seeded":
        return seeded_text(target, cfg.get("seed", 0) + seed_offset, cfg.get("pause_rate", 0.2))
    if kind == "arbitrary":
        return arbitrary_text(cfg.get("seed", 0) + seed_offset, cfg.get("universe", 40))
    return fixed_text(cfg["data"])


def evaluate(scn: Scenario, trace: Trace, target, text, check: dict) -> Verdict:
    p = scn.params
    kind = check["kind"]
    common = dict(bound=p["bound"], stage=p["budget"], quiet=p["quiet"])
    if kind in CRITERIA:
        return criterion_verdict(trace, kind, target, cap=check.get("cap"), **common)
    if kind == "Confidence":
        raise AssertionError("handled by the caller")
    return constraint_check(trace, kind, trace.space, family=scn.family, target=target, **common)


@dataclass
class Outcome:
    key: str
    trace: Trace
    verdicts: list


def run(scn: Scenario) -> list[Outcome]:
    p = scn.params
    out = []
    for key, learner, _tname, target, tcfg in scn.combinations():
        text = make_text(tcfg, target, p["seed"])
        trace = run_trace(learner, text, p["horizon"])
        verdicts = []
        for check in scn.checks:
            if check["kind"] == "Confidence":
                v = convergence_probe(learner, [make_text(tcfg, target, p["seed"])], p["horizon"], p["quiet"])
            else:
                v = evaluate(scn, trace, target, text, check)
            verdicts.append((check["kind"], v))
        out.append(Outcome(key, trace, verdicts))
    return out


def exit_code(verdicts) -> int:
    statuses = [v.status for v in verdicts]
    if any(s == "violated" for s in statuses):
        return EXIT_VIOLATED
    if any(s == "inconclusive" for s in statuses):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- serialization -------------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def trace_lines(trace: Trace):
    for rec in trace.records:
        yield dumps(rec.as_dict())


def verdict_row(key: str, kind: str, v: Verdict) -> str:
    return dumps({"combination": key, "check": kind, **v.to_dict()})


def parse_trace(lines) -> list[TraceRecord]:
    records = []
    for n, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if list(obj) != ["step", "datum", "hypothesis", "budget_events"]:
            raise ScenarioError(f"trace line {n + 1}", "fields must be step, datum, hypothesis, budget_events")
        hyp = None if obj["hypothesis"] == "?" else obj["hypothesis"]
        records.append(TraceRecord(obj["step"], obj["datum"], hyp, obj["budget_events"]))
    return records


def digest(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8") + b"\n")
    return h.hexdigest()

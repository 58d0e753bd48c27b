"""Command line front end: configuration, orchestration and reports.

Verbs::

    slantgeo analyze --fixture psi2
    slantgeo verify --fixture psi1 --checks thm-D2,slant-angle --format json
    slantgeo verify --config run.json
    slantgeo list-fixtures
    slantgeo list-checks

Exit codes: 0 every non-vacuous check passed, 1 some check failed or was
indeterminate, 2 configuration error, 3 evaluation or domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import jsonschema

from . import __version__
from . import fixtures as fx
from .expr import DomainError, ExprError, parse
from .geometry import (DEFAULT_SEED, AlmostContactStructure, GeometryError, ManifoldSpec,
                       builtin, BUILTIN_STRUCTURES)
from .map_analysis import SmoothMapSpec
from .theorems import CHECKS, Analysis, Tolerances, run_checks
from .verdict import CheckVerdict, FAIL, INDETERMINATE, PASS, VACUOUS

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3
ANALYZE_CHECKS = ("cosym-structure", "slant-angle")


class ConfigError(ValueError):
    """Invalid configuration; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


_STR_MATRIX = {"type": "array", "minItems": 1,
               "items": {"type": "array", "minItems": 1, "items": {"type": "string"}}}
_STR_VECTOR = {"type": "array", "minItems": 1, "items": {"type": "string"}}
_BOX = {"type": "array", "minItems": 1,
        "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "fixture": {"type": "string"},
        "params": {"type": "object"},
        "name": {"type": "string"},
        "source": {
            "type": "object", "additionalProperties": False, "required": ["dimension"],
            "properties": {
                "dimension": {"type": "integer", "minimum": 1},
                "metric": _STR_MATRIX, "phi": _STR_MATRIX, "xi": _STR_VECTOR,
                "eta": _STR_VECTOR, "domain_box": _BOX,
                "structure": {"enum": sorted(BUILTIN_STRUCTURES)},
            },
        },
        "target": {
            "type": "object", "additionalProperties": False, "required": ["dimension"],
            "properties": {"dimension": {"type": "integer", "minimum": 1},
                           "metric": _STR_MATRIX, "domain_box": _BOX},
        },
        "map": {
            "type": "object", "additionalProperties": False, "required": ["components"],
            "properties": {"components": _STR_VECTOR},
        },
        "run": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "checks": {"type": "array", "items": {"enum": sorted(CHECKS)}},
                "samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "tolerances": {
                    "type": "object", "additionalProperties": False,
                    "properties": {"angle": _POSITIVE, "identity": _POSITIVE,
                                   "derivative": _POSITIVE},
                },
                "format": {"enum": ["text", "json"]},
            },
        },
    },
    "anyOf": [{"required": ["fixture"]}, {"required": ["source", "target", "map"]}],
    "not": {"anyOf": [{"required": ["fixture", "source"]}, {"required": ["fixture", "map"]}]},
}


@dataclass
class RunConfig:
    fixture: Optional[str] = None
    params: dict = field(default_factory=dict)
    checks: Optional[list] = None
    samples: int = 20
    seed: int = DEFAULT_SEED
    tolerances: Tolerances = field(default_factory=Tolerances)
    format: str = "text"
    timing: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be at least 1", "/run/samples")


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def _validate(doc) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ConfigError(err.message, _pointer(err.absolute_path))


def _parse_matrix(rows, dim: int, where: str):
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ConfigError(f"expected a {dim}x{dim} matrix", where)
    out = []
    for i, row in enumerate(rows):
        out.append([_parse_expr(s, dim, f"{where}/{i}/{j}") for j, s in enumerate(row)])
    return out


def _parse_vector(items, dim: int, where: str, length: Optional[int] = None):
    if length is not None and len(items) != length:
        raise ConfigError(f"expected {length} entries, got {len(items)}", where)
    return [_parse_expr(s, dim, f"{where}/{i}") for i, s in enumerate(items)]


def _parse_expr(text: str, dim: int, where: str):
    try:
        return parse(text, dim)
    except ExprError as exc:
        raise ConfigError(str(exc), where) from None


def _box(doc: dict, dim: int, where: str):
    box = doc.get("domain_box")
    if box is None:
        return None
    if len(box) != dim:
        raise ConfigError(f"domain_box has {len(box)} intervals for dimension {dim}", where)
    return [tuple(b) for b in box]


def _manifold(doc: dict, where: str, name: str) -> ManifoldSpec:
    dim = doc["dimension"]
    box = _box(doc, dim, f"{where}/domain_box")
    try:
        if "metric" not in doc:
            return ManifoldSpec.euclidean(dim, box, name)
        metric = _parse_matrix(doc["metric"], dim, f"{where}/metric")
        return ManifoldSpec(dim, tuple(tuple(r) for r in metric), box or [(-1.0, 1.0)] * dim,
                            name)
    except GeometryError as exc:
        raise ConfigError(str(exc), where) from None


def _inline_map(doc: dict) -> SmoothMapSpec:
    src_doc, tgt_doc = doc["source"], doc["target"]
    dim = src_doc["dimension"]
    if "structure" in src_doc:
        if any(k in src_doc for k in ("phi", "xi", "eta", "metric")):
            raise ConfigError("give either a built-in structure or metric/phi/xi/eta",
                              "/source/structure")
        source, acs = builtin(src_doc["structure"], _box(src_doc, dim, "/source/domain_box"))
        if source.dimension != dim:
            raise ConfigError(f"structure {src_doc['structure']!r} has dimension "
                              f"{source.dimension}, not {dim}", "/source/dimension")
    else:
        source = _manifold(src_doc, "/source", doc.get("name", "source"))
        missing = [k for k in ("phi", "xi", "eta") if k not in src_doc]
        if missing:
            raise ConfigError(f"missing {', '.join(missing)} (or a built-in 'structure')",
                              "/source")
        phi = _parse_matrix(src_doc["phi"], dim, "/source/phi")
        xi = _parse_vector(src_doc["xi"], dim, "/source/xi", dim)
        eta = _parse_vector(src_doc["eta"], dim, "/source/eta", dim)
        acs = AlmostContactStructure(tuple(tuple(r) for r in phi), tuple(xi), tuple(eta), dim)
    target = _manifold(tgt_doc, "/target", "target")
    comps = doc["map"]["components"]
    if len(comps) != target.dimension:
        raise ConfigError(f"map has {len(comps)} components but the target has dimension "
                          f"{target.dimension}", "/map/components")
    exprs = _parse_vector(comps, dim, "/map/components")
    try:
        return SmoothMapSpec(source, target, tuple(exprs), acs, doc.get("name", "inline"))
    except GeometryError as exc:
        raise ConfigError(str(exc), "/map") from None


def load_config(source: Union[str, Path, dict]) -> tuple[RunConfig, SmoothMapSpec]:
    """Read a configuration from a dict, inline JSON text or a file path."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read configuration: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    _validate(doc)
    run = doc.get("run", {})
    tol = Tolerances(**run.get("tolerances", {}))
    if "fixture" in doc:
        try:
            m = fx.make(doc["fixture"], doc.get("params"))
        except fx.FixtureError as exc:
            raise ConfigError(exc.args[0], "/fixture" if "params" not in doc else "/params") \
                from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "/params") from None
    else:
        m = _inline_map(doc)
    cfg = RunConfig(fixture=doc.get("fixture"), params=dict(doc.get("params", {})),
                    checks=run.get("checks"), samples=run.get("samples", 20),
                    seed=run.get("seed", DEFAULT_SEED), tolerances=tol,
                    format=run.get("format", "text"))
    return cfg, m


# ----------------------------------------------------------------------------- reports

def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


@dataclass
class Report:
    schema_version: int
    software: dict
    subject: dict
    run: dict
    slant: dict
    conformality: dict
    checks: list
    summary: dict
    exit_code: int
    domain_errors: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    wall_time: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checks"] = [c.to_dict() for c in self.checks]
        if self.wall_time is None:
            del d["wall_time"]
        return _finite(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        d = dict(d)
        d["checks"] = [CheckVerdict.from_dict(c) for c in d["checks"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"slantgeo {self.software['version']}  subject: {self.subject['name']}"
                 f"  samples: {self.run['samples']}  seed: {self.run['seed']}"]
        s, c = self.slant, self.conformality
        if s.get("mean") is not None:
            lines.append(f"slant angle {s['mean']:.10f} rad  spread {s['spread']:.2e}  "
                         f"({s['classification']})")
        else:
            lines.append(f"slant angle undefined ({s['classification']})")
        if c.get("dilation"):
            lo, hi = min(c["dilation"]), max(c["dilation"])
            lam = f"{lo:.10g}" if hi - lo <= 1e-12 * hi else f"{lo:.6g} .. {hi:.6g}"
            lines.append(f"dilation {lam}  conformal {c['is_conformal']}  "
                         f"homothetic {c['is_homothetic']}")
        for note in self.notes:
            lines.append(f"note: {note}")
        for v in self.checks:
            res = "-" if v.vacuous else f"{v.max_residual:.3e}"
            lines.append(f"{v.check_id:22s} {v.status:13s} {res:>10s}  points={v.points_sampled}")
        for err in self.domain_errors:
            lines.append(f"domain error: {err}")
        sm = self.summary
        lines.append(f"{sm[PASS]} pass, {sm[FAIL]} fail, {sm[VACUOUS]} vacuous, "
                     f"{sm[INDETERMINATE]} indeterminate"
                     + (f", {sm['error']} error" if sm.get("error") else ""))
        return "\n".join(lines) + "\n"


def _subject(cfg: RunConfig, m: SmoothMapSpec) -> dict:
    out = {"name": cfg.fixture or m.name or "inline", "params": cfg.params,
           "source_dimension": m.source.dimension, "target_dimension": m.target.dimension,
           "map": m.to_json()}
    if m.structure is not None:
        out["structure"] = m.structure.to_json()
    return out


def _fixture_notes(cfg: RunConfig, an: Analysis) -> list[str]:
    if cfg.fixture is None:
        return []
    fixture = fx.get(cfg.fixture)
    params = fixture.params(cfg.params)
    notes = [f"pairing: {params['pairing']}"] if "pairing" in params else []
    if fixture.claimed_angle is not None and an.slant.angles:
        claimed = fixture.claimed_angle(params)
        ok = abs(an.omega - claimed) < cfg.tolerances.angle
        notes.append(f"claimed slant angle {claimed:.10f}, computed {an.omega:.10f}: "
                     f"{'reproduced' if ok else 'discrepancy'}")
        if not ok:
            study = fx.pairing_study(cfg.fixture, cfg.params, tol_angle=cfg.tolerances.angle)
            for pairing, row in study.items():
                if row["angle"] is None:
                    notes.append(f"the {pairing} pairing is unavailable: {row['reason']}")
                    continue
                notes.append(f"under the {pairing} pairing the angle is {row['angle']:.10f}"
                             f" ({'matches' if row['matches_claim'] else 'differs from'} the claim)")
    if fixture.claimed_dilation is not None and an.conformality.dilation:
        claimed = fixture.claimed_dilation(params)
        worst = max(abs(lam - claimed) / claimed for lam in an.conformality.dilation)
        notes.append(f"claimed dilation {claimed:.10g}, max relative deviation {worst:.2e}")
    notes.extend(fixture.notes)
    return notes


def run(cfg: RunConfig, m: SmoothMapSpec, checks=None) -> Report:
    """Analyse ``m`` and run the requested checkers (all of them by default)."""
    start = time.perf_counter()
    ids = list(checks if checks is not None else (cfg.checks or sorted(CHECKS)))
    an = Analysis(m, cfg.samples, cfg.seed, cfg.tolerances)
    errors = list(an.domain_errors)
    verdicts = []
    for cid in sorted(set(ids)):
        if not an.points:
            verdicts.append(CheckVerdict(cid, 0, math.inf, math.inf, False, status="error",
                                         notes=["no sample point could be evaluated"]))
            continue
        try:
            verdicts.extend(run_checks(an, [cid]))
        except (DomainError, GeometryError) as exc:
            errors.append(f"{cid}: {exc}")
            verdicts.append(CheckVerdict(cid, an.n_points, math.inf, math.inf, False,
                                         status="error", notes=[str(exc)]))
    summary = {k: 0 for k in (PASS, FAIL, VACUOUS, INDETERMINATE, "error")}
    for v in verdicts:
        summary[v.status] = summary.get(v.status, 0) + 1
    if errors:
        code = EXIT_DOMAIN
    elif all(v.passed or v.vacuous for v in verdicts):
        code = EXIT_OK
    else:
        code = EXIT_FAIL
    slant = an.slant.to_dict() if an.frames else {"classification": "undefined"}
    conf = an.conformality.to_dict() if an.frames else {}
    tol = cfg.tolerances
    report = Report(
        schema_version=SCHEMA_VERSION,
        software={"name": "slantgeo", "version": __version__},
        subject=_subject(cfg, m),
        run={"samples": cfg.samples, "seed": cfg.seed, "checks": sorted(set(ids)),
             "tolerances": asdict(tol)},
        slant=slant, conformality=conf, checks=verdicts, summary=summary, exit_code=code,
        domain_errors=errors, notes=_fixture_notes(cfg, an) if an.frames else [])
    if cfg.timing:
        report.wall_time = time.perf_counter() - start
    return report


# ----------------------------------------------------------------------------- argv

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slantgeo", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"slantgeo {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, text in (("analyze", "structure check, conformality and slant angle"),
                       ("verify", "run the theorem checkers")):
        s = sub.add_parser(verb, help=text)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--fixture", help="built-in fixture name")
        src.add_argument("--config", help="JSON configuration file or inline JSON text")
        s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="fixture parameter (repeatable)")
        if verb == "verify":
            s.add_argument("--checks", help="comma-separated check ids (default: all)")
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--tol-angle", type=float)
        s.add_argument("--tol-identity", type=float)
        s.add_argument("--tol-derivative", type=float)
        s.add_argument("--format", choices=("text", "json"))
        s.add_argument("--timing", action="store_true", help="include wall time in the report")
    sub.add_parser("list-fixtures", help="show built-in fixtures")
    sub.add_parser("list-checks", help="show checker ids")
    return p


def _param_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _config_from_args(args) -> tuple[RunConfig, SmoothMapSpec]:
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}", "/params")
        params[key] = _param_value(value)
    if args.fixture:
        doc = {"fixture": args.fixture}
        if params:
            doc["params"] = params
        cfg, m = load_config(doc)
    else:
        if params:
            raise ConfigError("--param only applies to --fixture", "/params")
        cfg, m = load_config(args.config)
    overrides = {}
    if getattr(args, "checks", None):
        ids = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in ids if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown check id(s): {', '.join(unknown)}", "/run/checks")
        overrides["checks"] = ids
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.seed is not None:
        overrides["seed"] = args.seed
    tol = {k: v for k, v in (("angle", args.tol_angle), ("identity", args.tol_identity),
                             ("derivative", args.tol_derivative)) if v is not None}
    try:
        if tol:
            overrides["tolerances"] = replace(cfg.tolerances, **tol)
        if args.format:
            overrides["format"] = args.format
        overrides["timing"] = args.timing
        cfg = replace(cfg, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc), "/run") from None
    return cfg, m


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.verb == "list-fixtures":
        for name in sorted(fx.FIXTURES):
            f = fx.FIXTURES[name]
            params = ", ".join(f"{k}={v!r}" for k, v in f.defaults.items())
            print(f"{name:16s} {f.description}  [{params}]")
        return EXIT_OK
    if args.verb == "list-checks":
        for cid in sorted(CHECKS):
            print(f"{cid:22s} {CHECKS[cid].summary}")
        return EXIT_OK
    try:
        cfg, m = _config_from_args(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    checks = list(ANALYZE_CHECKS) if args.verb == "analyze" else None
    try:
        report = run(cfg, m, checks)
    except DomainError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(report.to_json() if cfg.format == "json" else report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Catalog x identity runner: configuration, seeded cases and JSON-lines reports.

Configuration is an INI file with a ``[suite]`` section and an optional
``[tolerance]`` section mapping identity ids to tolerance overrides::

    [suite]
    geometries = flat-r2, sphere-s2      ; default: the five-chart default catalog
    identities = thm-4-2, eq-4-2         ; default: all
    families = none, a2                  ; default: none, a0, a2, full-mix
    seed = 0                             ; first seed
    seeds = 1                            ; number of consecutive seeds per case
    sections = 20
    points = 20
    w_plus = 1
    w_minus = 1
    twist = random                       ; or flat
    engine = ad                          ; or fd
    tolerance =                          ; global override, blank for tiered defaults

    [tolerance]
    thm-4-2 = 1e-15
"""

from __future__ import annotations

import configparser
import json
import time
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bundle import CliffordModule, TwistingConnection
from .checks import CHECKS, Sample
from .dirac import random_sections
from .geometry import CATALOG, DEFAULT_CATALOG
from .superconnection import Superconnection

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "Identity",
    "IDENTITIES",
    "FAMILIES",
    "SuiteConfig",
    "VerificationCase",
    "CaseReport",
    "load_config",
    "build_cases",
    "make_sample",
    "run_case",
    "run_suite",
    "summarize",
    "report_lines",
]

SCHEMA_VERSION = 1

FAMILIES: dict[str, tuple[int, ...]] = {
    "none": (),
    "a0": (0,),
    "a2": (2,),
    "full-mix": (0, 2, 3, 4),
}

ALGEBRAIC, FIRST_DERIVATIVE, SECOND_DERIVATIVE = 1e-10, 1e-8, 1e-6
_WITH_ABAR = ("a0", "a2", "full-mix")


class ConfigError(ValueError):
    """Invalid suite configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class Identity:
    id: str
    tolerance: float
    families: tuple[str, ...]
    summary: str


IDENTITIES: dict[str, Identity] = {i.id: i for i in [
    Identity("clifford-relations", ALGEBRAIC, ("none",),
             "c(dx^m) c(dx^n) + c(dx^n) c(dx^m) = -2 g^{mn}, odd generators"),
    Identity("quantize", ALGEBRAIC, ("none",),
             "coordinate quantization equals the rotated orthonormal frame sum"),
    Identity("lemma-2-1", FIRST_DERIVATIVE, _WITH_ABAR,
             "A o A on E-valued forms equals multiplication by R + d Abar + Abar^2"),
    Identity("lemma-2-2", ALGEBRAIC, _WITH_ABAR,
             "c(Abar)^2 - c(Abar^2) as a pair sum over degrees >= 2, A_[0]-independent"),
    Identity("eq-2-4", ALGEBRAIC, ("full-mix",),
             "four-dimensional term list for c(Abar)^2 - c(Abar^2)"),
    Identity("lemma-3-1", FIRST_DERIVATIVE, ("none",),
             "c(gamma) = Id and nabla gamma = 0"),
    Identity("g-projection", ALGEBRAIC, ("none",),
             "c o g = c and g o g = g on random inhomogeneous forms"),
    Identity("eq-3-3", FIRST_DERIVATIVE, _WITH_ABAR,
             "c(g(a)^2) + ev_g(g(a).g(a)) = c(a)^2 + 2 ev_g(beta(a).g(a))"),
    Identity("eq-3-4", SECOND_DERIVATIVE, _WITH_ABAR,
             "c2(nabla g(a)) = c(d^nabla a) - ev_g nabla beta(a)"),
    Identity("lemma-3-3", FIRST_DERIVATIVE, _WITH_ABAR,
             "beta by contraction equals the bracket formula; varpi(nabla^A) = beta - g"),
    Identity("cor-3-4", SECOND_DERIVATIVE, _WITH_ABAR,
             "c(R^{nabla^A} - F(A)) equals its four-term expansion"),
    Identity("lemma-4-1", ALGEBRAIC, ("none",) + _WITH_ABAR,
             "D_A and the Dirac operator of nabla^A coincide coefficientwise"),
    Identity("eq-1-1", SECOND_DERIVATIVE, ("none",),
             "D^2 = Laplacian + r/4 + c(R^{E/S}) for a Clifford connection"),
    Identity("eq-4-2", SECOND_DERIVATIVE, ("none",) + _WITH_ABAR,
             "decomposition of (c o nabla)^2 for arbitrary or associated connections"),
    Identity("thm-4-2", SECOND_DERIVATIVE, ("none",) + _WITH_ABAR,
             "D_A^2 = Laplacian(A_[1] + beta) + r/4 + c(F^{E/S}) + P(Abar)"),
    Identity("eq-4-9", FIRST_DERIVATIVE, ("none", "a0"),
             "reduction to the classical and simple-type formulas"),
    Identity("eq-4-10", ALGEBRAIC, ("a2",),
             "closed form of P(Abar) for A_[2]-only superconnections"),
    Identity("m0-relations", ALGEBRAIC, ("none",),
             "degenerate Clifford relations, nilpotency, parity and block decomposition"),
]}


@dataclass(frozen=True)
class SuiteConfig:
    geometries: tuple[str, ...] = DEFAULT_CATALOG
    identities: tuple[str, ...] = tuple(IDENTITIES)
    families: tuple[str, ...] = tuple(FAMILIES)
    seed: int = 0
    seeds: int = 1
    sections: int = 20
    points: int = 20
    w_plus: int = 1
    w_minus: int = 1
    twist: str = "random"
    engine: str = "ad"
    tolerance: float | None = None
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for g in self.geometries:
            if g not in CATALOG:
                raise ConfigError("geometries", f"unknown geometry {g!r}")
        for i in self.identities:
            if i not in IDENTITIES:
                raise ConfigError("identities", f"unknown identity {i!r}")
        for i in self.tolerances:
            if i not in IDENTITIES:
                raise ConfigError(f"tolerance.{i}", f"unknown identity {i!r}")
        for f in self.families:
            if f not in FAMILIES:
                raise ConfigError("families", f"unknown family {f!r}")
        for key in ("seeds", "sections", "points"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be positive")
        if self.seed < 0:
            raise ConfigError("seed", "must be non-negative")
        if self.w_plus < 0 or self.w_minus < 0 or self.w_plus + self.w_minus == 0:
            raise ConfigError("w_plus", f"bad twisting ranks ({self.w_plus}, {self.w_minus})")
        if self.twist not in ("flat", "random"):
            raise ConfigError("twist", f"expected flat or random, got {self.twist!r}")
        if self.engine not in ("ad", "fd"):
            raise ConfigError("engine", f"expected ad or fd, got {self.engine!r}")

    def tolerance_for(self, identity: str) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return self.tolerances.get(identity, IDENTITIES[identity].tolerance)


def _split(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.replace("\n", ",").split(",") if v.strip())


_INT_KEYS = ("seed", "seeds", "sections", "points", "w_plus", "w_minus")
_LIST_KEYS = ("geometries", "identities", "families")


def load_config(path: str | Path | None = None, **overrides) -> SuiteConfig:
    """Read an INI file (optional) and apply keyword overrides (``None`` is ignored)."""
    values: dict = {}
    tolerances: dict[str, float] = {}
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
        except configparser.Error as exc:
            raise ConfigError("config", str(exc).splitlines()[0]) from None
        unknown = set(parser.sections()) - {"suite", "tolerance"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown section")
        if parser.has_section("suite"):
            for key, raw in parser.items("suite"):
                values[key] = raw
        if parser.has_section("tolerance"):
            for key, raw in parser.items("tolerance"):
                tolerances[key] = _parse_float(f"tolerance.{key}", raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    kwargs: dict = {"tolerances": tolerances}
    known = set(_INT_KEYS) | set(_LIST_KEYS) | {"twist", "engine", "tolerance"}
    for key, raw in values.items():
        if key not in known:
            raise ConfigError(key, "unknown key")
        if key in _LIST_KEYS:
            items = _split(raw) if isinstance(raw, str) else tuple(raw)
            if key == "identities" and items == ("all",):
                items = tuple(IDENTITIES)
            kwargs[key] = items
        elif key in _INT_KEYS:
            try:
                kwargs[key] = int(raw)
            except (TypeError, ValueError):
                raise ConfigError(key, f"expected an integer, got {raw!r}") from None
        elif key == "tolerance":
            if not (isinstance(raw, str) and not raw.strip()):
                kwargs[key] = _parse_float(key, raw)
        else:
            kwargs[key] = str(raw).strip()
    return SuiteConfig(**kwargs)


def _parse_float(key: str, raw) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {raw!r}") from None
    if not value > 0:
        raise ConfigError(key, "must be positive")
    return value


# cases ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationCase:
    geometry: str
    family: str
    identity: str
    seeds: tuple[int, ...]
    sections: int
    points: int
    w_plus: int
    w_minus: int
    twist: str
    engine: str
    tolerance: float

    @property
    def case_id(self) -> str:
        return f"{self.identity}/{self.geometry}/{self.family}"


@dataclass
class CaseReport:
    case: VerificationCase
    residual: float | None
    passed: bool
    status: str  # "pass" | "fail" | "error"
    wall_time: float
    error: str | None = None

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "case_id": self.case.case_id,
            **{k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.case).items()},
            "residual": self.residual,
            "passed": self.passed,
            "status": self.status,
            "error": self.error,
            "engine_version": __version__,
            "wall_time": round(self.wall_time, 4),
        }
        return out


def build_cases(config: SuiteConfig) -> list[VerificationCase]:
    cases = []
    seeds = tuple(range(config.seed, config.seed + config.seeds))
    for ident in config.identities:
        spec = IDENTITIES[ident]
        for geom in config.geometries:
            n = CATALOG[geom].n
            for fam in config.families:
                if fam not in spec.families or (fam == "full-mix" and n != 4):
                    continue
                cases.append(VerificationCase(
                    geom, fam, ident, seeds, config.sections, config.points,
                    config.w_plus, config.w_minus, config.twist, config.engine,
                    config.tolerance_for(ident)))
    return sorted(cases, key=lambda c: c.case_id)


def _rng(seed: int, *labels: str) -> np.random.Generator:
    return np.random.default_rng([seed] + [zlib.crc32(label.encode()) for label in labels])


def make_sample(case: VerificationCase, seed: int) -> Sample:
    """Seeded draw shared by all identities on the same geometry and family."""
    geom = CATALOG[case.geometry].with_engine(case.engine)
    module = CliffordModule.build(geom.n, case.w_plus, case.w_minus)
    rng = _rng(seed, case.geometry, case.family)
    twist = (TwistingConnection.random(module, rng) if case.twist == "random"
             else TwistingConnection.flat(module))
    a = Superconnection.random(module, twist, FAMILIES[case.family], rng)
    points = geom.sample_points(rng, case.points)
    sections = random_sections(geom.n, module.dim, case.sections, seed)
    return Sample(geom, module, twist, a, sections, points, _rng(seed, case.case_id))


def run_case(case: VerificationCase) -> CaseReport:
    start = time.perf_counter()
    try:
        residual = max(CHECKS[case.identity](make_sample(case, s)) for s in case.seeds)
    except Exception as exc:  # a numerical failure marks the case, never the suite
        return CaseReport(case, None, False, "error", time.perf_counter() - start,
                          f"{type(exc).__name__}: {exc}")
    if not np.isfinite(residual):
        return CaseReport(case, None, False, "error", time.perf_counter() - start,
                          "non-finite residual")
    passed = residual <= case.tolerance
    return CaseReport(case, residual, passed, "pass" if passed else "fail",
                      time.perf_counter() - start)


def run_suite(config: SuiteConfig, on_report=None) -> list[CaseReport]:
    """Run every case serially; ``on_report`` sees each report as it completes."""
    reports = []
    for case in build_cases(config):
        report = run_case(case)
        reports.append(report)
        if on_report is not None:
            on_report(report)
    return sorted(reports, key=lambda r: r.case.case_id)


def summarize(reports: list[CaseReport]) -> dict:
    counts = {status: sum(r.status == status for r in reports)
              for status in ("pass", "fail", "error")}
    return {
        "schema_version": SCHEMA_VERSION,
        "summary": True,
        "cases": len(reports),
        "passed": counts["pass"],
        "failed": counts["fail"],
        "errored": counts["error"],
        "all_passed": bool(reports) and counts["pass"] == len(reports),
        "engine_version": __version__,
        "wall_time": round(sum(r.wall_time for r in reports), 4),
    }


def report_lines(reports: list[CaseReport]) -> list[str]:
    """One JSON object per case (sorted by case id) followed by the summary."""
    rows = [r.to_json() for r in sorted(reports, key=lambda r: r.case.case_id)]
    rows.append(summarize(reports))
    return [json.dumps(row, sort_keys=True) for row in rows]


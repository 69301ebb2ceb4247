"""Scenario files: schema validation and construction of run inputs.

A scenario is a JSON object::

    {
      "kappa": 1.0,
      "spinor": {"exprs": ["...", "...", "...", "..."], "params": {...}}
              | {"catalog": "rest_plane_wave" | "degenerate_example" | "lset",
                 "params": {...}},
      "potential": {"exprs": [...], "params": {...}}
                 | {"catalog_family": {"f": "expr", "alpha": ..., "phi1": ..., "phi2": ...}}
                 | absent (zero potential),
      "f": "expression",                       # family direction, optional
      "domain": {"box": [[lo, hi] x4], "count": 100, "seed": 0},
      "tolerances": {...},                     # overrides, see DEFAULT_TOLERANCES
      "tasks": ["classify", "mass", "invert", "family", "verify", "selftest"]
    }

Parameter values are numbers or [re, im] pairs.  The catalog_family
potential inherits alpha/phi1/phi2 from a degenerate_example spinor when
they are not given explicitly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog, exprlang
from .catalog import CatalogInstance
from .errors import DiracinvError, ScenarioError
from .exprlang import Expr
from .fields import SampleDomain, SpinorField
from .inversion import FourPotential

TASKS = ("classify", "mass", "invert", "family", "verify", "selftest")

DEFAULT_TOLERANCES = {
    "support": 1e-12,        # spinor support threshold (relative)
    "classify": 1e-10,       # indicator threshold (relative to |psi|^2)
    "guard": 1e-10,          # inversion denominators (relative to |psi|^2)
    "real": 1e-6,            # allowed relative imaginary residue
    "residual": 1e-9,        # forward residual bound for verify
    "family_residual": 1e-9,
    "invert": 1e-8,          # recovered-vs-known potential error
    "agreement": 1e-8,       # cross-route inversion agreement
    "mass": 1e-9,            # recovered-vs-known mass error
    "mass_spread": 1e-8,     # pointwise mass consistency
    "tensor": 1e-10,         # field-tensor equality
    "lightlike": 1e-8,
}


@dataclass
class Scenario:
    raw: dict
    kappa: float
    spinor: SpinorField
    instance: CatalogInstance | None
    potential: FourPotential | None
    f: Expr | None
    f_params: dict
    domain: SampleDomain
    tolerances: dict
    tasks: list[str] = field(default_factory=list)


def _fail(msg: str) -> ScenarioError:
    return ScenarioError(msg)


def _as_complex(value, where: str) -> complex:
    if isinstance(value, bool):
        raise _fail(f"{where}: boolean is not a number")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 \
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise _fail(f"{where}: expected a number or [re, im] pair, got {value!r}")


def _parse_params(obj, where: str) -> dict[str, complex]:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise _fail(f"{where}: params must be an object")
    return {str(k): _as_complex(v, f"{where}.{k}") for k, v in obj.items()}


def _parse_exprs(texts, where: str) -> list[Expr]:
    if not isinstance(texts, list) or len(texts) != 4:
        raise _fail(f"{where}: expected a list of 4 expression strings")
    out = []
    for idx, text in enumerate(texts):
        if not isinstance(text, str):
            raise _fail(f"{where}[{idx}]: expected a string")
        try:
            out.append(exprlang.parse(text))
        except exprlang.ParseError as exc:
            raise _fail(f"{where}[{idx}]: {exc}") from exc
    return out


def _build_spinor(obj, kappa: float) -> tuple[SpinorField, CatalogInstance | None]:
    if not isinstance(obj, dict):
        raise _fail("spinor: expected an object")
    if "catalog" in obj:
        name = obj["catalog"]
        if not isinstance(name, str) or name not in catalog.ENTRIES:
            raise _fail(f"spinor.catalog: unknown entry {name!r}; "
                        f"available: {', '.join(sorted(catalog.ENTRIES))}")
        params = dict(obj.get("params") or {})
        params.setdefault("kappa", kappa)
        try:
            instance = catalog.build(name, params)
        except DiracinvError as exc:
            raise _fail(f"spinor.catalog: {exc}") from exc
        return instance.spinor, instance
    if "exprs" in obj:
        params = _parse_params(obj.get("params"), "spinor.params")
        return SpinorField(_parse_exprs(obj["exprs"], "spinor.exprs"), params), None
    raise _fail("spinor: needs either 'exprs' or 'catalog'")


def _build_potential(obj, kappa: float,
                     instance: CatalogInstance | None) -> FourPotential | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise _fail("potential: expected an object")
    if "catalog_family" in obj:
        fam = obj["catalog_family"]
        if not isinstance(fam, dict) or "f" not in fam:
            raise _fail("potential.catalog_family: needs an 'f' expression")
        inherited = dict(instance.params or {}) if instance is not None \
            and instance.name == "degenerate_example" else {}
        def pick(key):
            if key in fam:
                return float(fam[key])
            if key in inherited:
                return float(inherited[key])
            raise _fail(f"potential.catalog_family: missing {key!r} and no "
                        f"degenerate_example spinor to inherit it from")
        try:
            f = exprlang.parse(str(fam["f"]))
        except exprlang.ParseError as exc:
            raise _fail(f"potential.catalog_family.f: {exc}") from exc
        f_params = _parse_params(fam.get("params"), "potential.catalog_family.params")
        try:
            return catalog.example_family(kappa, pick("alpha"), pick("phi1"),
                                          pick("phi2"), f, f_params)
        except DiracinvError as exc:
            raise _fail(f"potential.catalog_family: {exc}") from exc
    if "exprs" in obj:
        params = _parse_params(obj.get("params"), "potential.params")
        return FourPotential(_parse_exprs(obj["exprs"], "potential.exprs"), params)
    raise _fail("potential: needs either 'exprs' or 'catalog_family'")


def _build_domain(obj) -> SampleDomain:
    obj = obj or {}
    if not isinstance(obj, dict):
        raise _fail("domain: expected an object")
    box = obj.get("box", [[-1.0, 1.0]] * 4)
    if not (isinstance(box, list) and len(box) == 4
            and all(isinstance(iv, list) and len(iv) == 2 for iv in box)):
        raise _fail("domain.box: expected 4 [lo, hi] intervals")
    try:
        domain = SampleDomain(
            box=tuple((float(lo), float(hi)) for lo, hi in box),
            count=int(obj.get("count", 100)),
            seed=int(obj.get("seed", 0)))
    except (TypeError, ValueError) as exc:
        raise _fail(f"domain: {exc}") from exc
    return domain


def build_scenario(data: dict, seed: int | None = None, samples: int | None = None,
                   tol: float | None = None) -> Scenario:
    """Validate a scenario dict and construct run inputs; overrides are optional."""
    if not isinstance(data, dict):
        raise _fail("scenario must be a JSON object")
    unknown = set(data) - {"kappa", "spinor", "potential", "f", "domain",
                           "tolerances", "tasks"}
    if unknown:
        raise _fail(f"unknown scenario fields: {', '.join(sorted(unknown))}")
    if "kappa" not in data:
        raise _fail("scenario needs 'kappa'")
    kappa = float(_as_complex(data["kappa"], "kappa").real)

    tasks = data.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise _fail("scenario needs a nonempty 'tasks' list")
    for t in tasks:
        if t not in TASKS:
            raise _fail(f"unknown task {t!r}; available: {', '.join(TASKS)}")

    if "spinor" not in data:
        raise _fail("scenario needs 'spinor'")
    spinor, instance = _build_spinor(data["spinor"], kappa)
    potential = _build_potential(data.get("potential"), kappa, instance)

    f = None
    f_params: dict = {}
    if data.get("f") is not None:
        if not isinstance(data["f"], str):
            raise _fail("f: expected an expression string")
        try:
            f = exprlang.parse(data["f"])
        except exprlang.ParseError as exc:
            raise _fail(f"f: {exc}") from exc

    domain = _build_domain(data.get("domain"))
    if seed is not None:
        domain = SampleDomain(domain.box, domain.count, seed)
    if samples is not None:
        domain = SampleDomain(domain.box, samples, domain.seed)

    tolerances = dict(DEFAULT_TOLERANCES)
    overrides = data.get("tolerances") or {}
    if not isinstance(overrides, dict):
        raise _fail("tolerances: expected an object")
    for key, value in overrides.items():
        if key not in DEFAULT_TOLERANCES:
            raise _fail(f"tolerances: unknown key {key!r}")
        tolerances[key] = float(value)
    if tol is not None:
        tolerances["classify"] = float(tol)

    return Scenario(data, kappa, spinor, instance, potential, f, f_params,
                    domain, tolerances, list(tasks))


def load_scenario(path: str | Path, **overrides) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise _fail(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"scenario file is not valid JSON: {exc}") from exc
    return build_scenario(data, **overrides)


def demo_scenario(name: str) -> dict:
    """Canonical scenario dict for a catalog entry."""
    if name == "rest_plane_wave":
        return {
            "kappa": 1.0,
            "spinor": {"catalog": "rest_plane_wave"},
            "domain": {"count": 100, "seed": 7},
            "tasks": ["classify", "mass", "invert", "verify"],
        }
    if name == "degenerate_example":
        return {
            "kappa": 1.0,
            "spinor": {"catalog": "degenerate_example",
                       "params": {"alpha": 0.3, "phi1": 0.2, "phi2": -0.1}},
            "f": "sin(x0+x1)",
            "domain": {"count": 100, "seed": 7},
            "tasks": ["classify", "mass", "invert", "family", "verify"],
        }
    if name == "lset":
        return {
            "kappa": 0.0,
            "spinor": {"catalog": "lset",
                       "params": {"member": 0, "psi1": "1", "psi2": "exp(i*x1)"}},
            "domain": {"count": 100, "seed": 7},
            "tasks": ["classify"],
        }
    raise ScenarioError(f"no demo for {name!r}; "
                        f"available: degenerate_example, lset, rest_plane_wave")

"""Built-in analytic solutions, parameterized and construction-checked.

Every instance that claims to solve the coupled system is verified against
the forward residual when it is built; a failure aborts with a diagnostic
naming the violated check, so a catalog instance in user hands is always a
certified solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import exprlang, verify
from .errors import DiracinvError, ParameterOnSingularLocus
from .exprlang import Expr
from .fields import SampleDomain, SpinorField
from .inversion import FourPotential

SINGULAR_MARGIN = 1e-6
_SELFTEST_DOMAIN = SampleDomain(count=20, seed=20240917)
_SELFTEST_REL_TOL = 1e-12


class CatalogSelfTestError(DiracinvError):
    """A catalog instance failed its construction-time verification."""


@dataclass
class CatalogInstance:
    """A named spinor with whatever certified companions it carries."""

    name: str
    spinor: SpinorField
    kappa: float | None = None
    base_potential: FourPotential | None = None
    expected_verdict: str | None = None
    thetas: tuple[float, float, float] | None = None
    params: dict | None = None


def _selftest_residual(instance: CatalogInstance) -> None:
    report = verify.residual_norm(instance.spinor, instance.base_potential,
                                  instance.kappa, _SELFTEST_DOMAIN)
    if report.no_support:
        raise CatalogSelfTestError(f"{instance.name}: no support points in self-test box")
    if report.relative_max > _SELFTEST_REL_TOL:
        raise CatalogSelfTestError(
            f"{instance.name}: forward residual {report.relative_max:.3e} exceeds "
            f"{_SELFTEST_REL_TOL:.0e} (relative); the constructed pair does not "
            f"solve the coupled system")


def _selftest_indicator(instance: CatalogInstance) -> None:
    pts = _SELFTEST_DOMAIN.points()
    values = instance.spinor.values(pts)
    norm_sq = np.einsum("ni,ni->n", values.conj(), values).real
    from .clifford import delta
    ind = np.abs(np.einsum("ni,ij,nj->n", values.conj(), delta(4), values))
    if np.any(ind > 1e-10 * norm_sq):
        raise CatalogSelfTestError(
            f"{instance.name}: indicator bilinear is not null on the sample "
            f"(max {float(ind.max()):.3e})")


def rest_plane_wave(kappa: float) -> CatalogInstance:
    """Constant-direction wave oscillating along x0 only; zero potential."""
    if not math.isfinite(kappa):
        raise ValueError("mass must be finite")
    spinor = SpinorField.from_strings(
        ["exp(-i*kappa*x0)", "0", "0", "0"], {"kappa": kappa})
    instance = CatalogInstance(
        name="rest_plane_wave",
        spinor=spinor,
        kappa=float(kappa),
        base_potential=FourPotential.zero(),
        expected_verdict="non-degenerate",
        params={"kappa": float(kappa)},
    )
    _selftest_residual(instance)
    return instance


def _check_margins(alpha: float, phi2: float) -> None:
    if abs(math.cos(alpha)) <= SINGULAR_MARGIN or abs(math.cos(phi2)) <= SINGULAR_MARGIN:
        raise ParameterOnSingularLocus(
            f"cos(alpha)={math.cos(alpha):.2e}, cos(phi2)={math.cos(phi2):.2e}: "
            f"parameters are within {SINGULAR_MARGIN:.0e} of the singular locus")


def example_thetas(alpha: float, phi1: float, phi2: float) -> tuple[float, float, float]:
    """Direction ratios of the exponential degenerate family.

    Signs are fixed by the forward residual on the constructed spinor and
    frozen in tests.
    """
    return (math.cos(alpha) * math.cos(phi2 - phi1),
            math.cos(alpha) * math.sin(phi2 - phi1),
            -math.sin(alpha))


def degenerate_example(kappa: float, alpha: float, phi1: float,
                       phi2: float) -> CatalogInstance:
    """Exponential spinor that solves the force-free system yet is degenerate."""
    _check_margins(alpha, phi2)
    c = math.cos(alpha)
    s = math.sin(alpha)
    e1 = complex(math.cos(phi1), math.sin(phi1))
    e2 = complex(math.cos(phi2), math.sin(phi2))
    den = 2.0 * e1 * c * math.cos(phi2)
    params = {
        "c1": e1 / e2 * c,
        "c2": complex(s),
        "p0": complex(-kappa * math.tan(phi2)),
        "p1": 1j * kappa * (1 + e2 ** 2 * s ** 2 - e1 ** 2 * c ** 2) / den,
        "p2": kappa * (1 + e1 ** 2 * c ** 2 + e2 ** 2 * s ** 2) / den,
        "p3": 1j * kappa * e2 * s / math.cos(phi2),
    }
    carrier = "exp(p0*x0 + p1*x1 + p2*x2 + p3*x3)"
    spinor = SpinorField.from_strings(
        [f"c1*{carrier}", f"c2*{carrier}", "0", carrier], params)
    instance = CatalogInstance(
        name="degenerate_example",
        spinor=spinor,
        kappa=float(kappa),
        base_potential=FourPotential.zero(),
        expected_verdict="degenerate",
        thetas=example_thetas(alpha, phi1, phi2),
        params={"kappa": float(kappa), "alpha": float(alpha),
                "phi1": float(phi1), "phi2": float(phi2)},
    )
    _selftest_residual(instance)
    _selftest_indicator(instance)
    return instance


def example_family(kappa: float, alpha: float, phi1: float, phi2: float,
                   f: Expr, f_params: Mapping[str, complex] | None = None) -> FourPotential:
    """Family member (f, f t1, f t2, f t3) for the exponential degenerate spinor."""
    _check_margins(alpha, phi2)
    t1, t2, t3 = example_thetas(alpha, phi1, phi2)
    comps = [
        f,
        exprlang.mul(exprlang.Num(complex(t1)), f),
        exprlang.mul(exprlang.Num(complex(t2)), f),
        exprlang.mul(exprlang.Num(complex(t3)), f),
    ]
    return FourPotential(comps, f_params)


_NULL_SHAPE_SIGNS = (
    # rows of (coeff_psi1, coeff_psi2) per component
    ((1, 0), (0, 1), (-1, 0), (0, -1)),
    ((1, 0), (0, 0), (1, 0), (0, 0)),
    ((1, 0), (-1, 0), (-1, 0), (1, 0)),
    ((1, 0), (0, 1), (1, 0), (0, 1)),
    ((0, 0), (0, 1), (0, 0), (0, -1)),
    ((1, 0), (1, 0), (1, 0), (1, 0)),
)


def gamma2_null_shapes(psi1: Expr, psi2: Expr,
                       params: Mapping[str, complex] | None = None) -> list[SpinorField]:
    """The six spinor shapes whose transpose bilinear with gamma(2) vanishes identically."""
    shapes = []
    for signs in _NULL_SHAPE_SIGNS:
        comps = []
        for c1, c2 in signs:
            term: Expr = exprlang.ZERO
            if c1:
                term = exprlang.add(term, exprlang.mul(exprlang.Num(complex(c1)), psi1))
            if c2:
                term = exprlang.add(term, exprlang.mul(exprlang.Num(complex(c2)), psi2))
            comps.append(term)
        shapes.append(SpinorField(comps, params))
    return shapes


def _build_rest(params: dict) -> CatalogInstance:
    return rest_plane_wave(kappa=float(params.get("kappa", 1.0)))


def _build_degenerate(params: dict) -> CatalogInstance:
    return degenerate_example(
        kappa=float(params.get("kappa", 1.0)),
        alpha=float(params.get("alpha", 0.3)),
        phi1=float(params.get("phi1", 0.2)),
        phi2=float(params.get("phi2", -0.1)),
    )


def _build_lset(params: dict) -> CatalogInstance:
    member = int(params.get("member", 0))
    if not 0 <= member < 6:
        raise ValueError(f"lset member must be in 0..5, got {member}")
    psi1 = exprlang.parse(str(params.get("psi1", "1")))
    psi2 = exprlang.parse(str(params.get("psi2", "x1")))
    shapes = gamma2_null_shapes(psi1, psi2)
    return CatalogInstance(name="lset", spinor=shapes[member],
                           params={"member": member})


ENTRIES: dict[str, Callable[[dict], CatalogInstance]] = {
    "rest_plane_wave": _build_rest,
    "degenerate_example": _build_degenerate,
    "lset": _build_lset,
}


def build(name: str, params: dict | None = None) -> CatalogInstance:
    if name not in ENTRIES:
        raise KeyError(f"unknown catalog entry {name!r}; "
                       f"available: {', '.join(sorted(ENTRIES))}")
    return ENTRIES[name](dict(params or {}))

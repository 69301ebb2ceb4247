"""Recover the 4-potential and the mass from a spinor; gauge machinery.

All three inversion routes solve the same pointwise linear relations, each
normalized by a different denominator bilinear: psi* g4 psi, psi* g5 g4 psi,
or their sum psi* d4 psi (the combined route, whose denominator vanishes
exactly on the degenerate locus).  Every recovered component is checked for
realness; the guard thresholds are relative to |psi|^2 at the point.

The temporal-slot matrices in the spatial-component relations are pinned by
the residual oracle on manufactured solutions and hard-asserted in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import exprlang
from .clifford import IDENTITY, delta, gamma
from .errors import (DegeneratePoint, GuardViolated, MassInconsistent, NonRealPotential,
                     ZeroNorm)
from .exprlang import Expr
from .fields import (Frame, Point, SampleDomain, SpinorField, as_point, frame,
                     require_support, sample_support, merge_params)

DEFAULT_GUARD = 1e-10
DEFAULT_REAL_TOL = 1e-6
DEFAULT_SPREAD_TOL = 1e-8
CROSSCHECK_TOL = 1e-8


class FourPotential:
    """Four real-valued expression components (a0, a1, a2, a3)."""

    def __init__(self, components: Sequence[Expr], params: Mapping[str, complex] | None = None):
        components = tuple(components)
        if len(components) != 4:
            raise ValueError(f"a 4-potential has exactly 4 components, got {len(components)}")
        self.components = components
        self.params = dict(params) if params else {}
        self._derivatives: dict[tuple[int, int], Expr] = {}

    @classmethod
    def zero(cls) -> "FourPotential":
        return cls([exprlang.ZERO] * 4)

    @classmethod
    def from_strings(cls, texts: Sequence[str],
                     params: Mapping[str, complex] | None = None) -> "FourPotential":
        return cls([exprlang.parse(t) for t in texts], params)

    def component_derivative(self, idx: int, axis: int) -> Expr:
        key = (idx, axis)
        if key not in self._derivatives:
            self._derivatives[key] = exprlang.differentiate(self.components[idx], axis)
        return self._derivatives[key]

    def values(self, p, real_tol: float = DEFAULT_REAL_TOL) -> np.ndarray:
        """Real component values at a point; realness is checked, not assumed."""
        p = as_point(p)
        raw = np.array([exprlang.evaluate(c, p, self.params) for c in self.components])
        scale = 1.0 + float(np.abs(raw.real).max())
        worst = float(np.abs(raw.imag).max())
        if worst > real_tol * scale:
            raise NonRealPotential(
                f"potential has imaginary residue {worst:.3e} at {tuple(p)}")
        return raw.real.copy()

    def plus(self, other: "FourPotential") -> "FourPotential":
        params = merge_params(self.params, other.params)
        comps = [exprlang.add(a, b) for a, b in zip(self.components, other.components)]
        return FourPotential(comps, params)


@dataclass
class PotentialSample:
    """Recovered potential values at one point, with the imaginary diagnostic."""

    point: Point
    a: tuple[float, float, float, float]
    imag_residue: float

    def as_array(self) -> np.ndarray:
        return np.array(self.a)


@dataclass
class MassSample:
    kappa: float
    imag_residue: float


@dataclass
class MassEstimate:
    kappa: float
    spread: float
    count: int
    max_imag: float
    crosscheck_gap: float | None = None


_G = {k: gamma(k) for k in range(1, 6)}
_D = {k: delta(k) for k in range(1, 5)}
_G54 = _G[5] @ _G[4]
_G5k = {k: _G[5] @ _G[k] for k in (1, 2, 3)}
_Gk4 = {k: _G[k] @ _G[4] for k in (1, 2, 3)}


def _bil(fr: Frame, m: np.ndarray) -> complex:
    return complex(np.vdot(fr.value, m @ fr.value))


def _dbil(fr: Frame, m: np.ndarray, axis: int) -> complex:
    dv = fr.derivs[axis]
    return complex(np.vdot(dv, m @ fr.value) + np.vdot(fr.value, m @ dv))


def _bidir(fr: Frame, m: np.ndarray, axis: int) -> complex:
    dv = fr.derivs[axis]
    return complex(np.vdot(fr.value, m @ dv) - np.vdot(dv, m @ fr.value))


def _finish(point: Point, raw: Sequence[complex], real_tol: float) -> PotentialSample:
    raw = np.array(raw)
    scale = 1.0 + float(np.abs(raw.real).max())
    residue = float(np.abs(raw.imag).max()) / scale
    if residue > real_tol:
        raise NonRealPotential(
            f"recovered potential has relative imaginary residue {residue:.3e} "
            f"at {tuple(point)}; the spinor is not a Dirac solution for any real "
            f"potential near this point")
    return PotentialSample(point, tuple(float(x) for x in raw.real), residue)


def invert_combined(field: SpinorField, kappa: float, p,
                    guard: float = DEFAULT_GUARD,
                    real_tol: float = DEFAULT_REAL_TOL) -> PotentialSample:
    """Solve the summed relations, denominator psi* d4 psi."""
    p = as_point(p)
    fr = frame(field, p)
    den = _bil(fr, _D[4])
    if abs(den) <= guard * fr.norm_sq:
        raise DegeneratePoint(
            f"|psi* d4 psi| = {abs(den):.3e} <= guard at {tuple(p)}: degenerate locus")
    a0 = (-sum(_dbil(fr, _D[k], k) for k in (1, 2, 3))
          + 1j * _bidir(fr, _D[4], 0) - 2.0 * kappa * _bil(fr, IDENTITY)) / (2.0 * den)
    a1 = (-2.0 * kappa * _bil(fr, _Gk4[1]) + _bidir(fr, _D[4], 1)
          - _dbil(fr, _D[3], 2) + _dbil(fr, _D[2], 3)
          + 1j * _dbil(fr, _D[1], 0)) / (2j * den)
    a2 = (-2.0 * kappa * _bil(fr, _Gk4[2]) + _dbil(fr, _D[3], 1)
          + _bidir(fr, _D[4], 2) - _dbil(fr, _D[1], 3)
          + 1j * _dbil(fr, _D[2], 0)) / (2j * den)
    a3 = (-2.0 * kappa * _bil(fr, _Gk4[3]) - _dbil(fr, _D[2], 1)
          + _dbil(fr, _D[1], 2) + _bidir(fr, _D[4], 3)
          + 1j * _dbil(fr, _D[3], 0)) / (2j * den)
    return _finish(p, (a0, a1, a2, a3), real_tol)


def invert_gamma4(field: SpinorField, kappa: float, p,
                  guard: float = DEFAULT_GUARD,
                  real_tol: float = DEFAULT_REAL_TOL) -> PotentialSample:
    """Solve the first relation family, denominator psi* g4 psi."""
    p = as_point(p)
    fr = frame(field, p)
    den = _bil(fr, _G[4])
    if abs(den) <= guard * fr.norm_sq:
        raise GuardViolated(
            f"|psi* g4 psi| = {abs(den):.3e} <= guard at {tuple(p)}")
    a0 = (-sum(_dbil(fr, _G[k], k) for k in (1, 2, 3))
          + 1j * _bidir(fr, _G[4], 0) - 2.0 * kappa * _bil(fr, IDENTITY)) / (2.0 * den)
    a1 = (-2.0 * kappa * _bil(fr, _Gk4[1]) + _bidir(fr, _G[4], 1)
          - _dbil(fr, _G5k[3], 2) + _dbil(fr, _G5k[2], 3)
          + 1j * _dbil(fr, _G[1], 0)) / (2j * den)
    a2 = (-2.0 * kappa * _bil(fr, _Gk4[2]) + _dbil(fr, _G5k[3], 1)
          + _bidir(fr, _G[4], 2) - _dbil(fr, _G5k[1], 3)
          + 1j * _dbil(fr, _G[2], 0)) / (2j * den)
    a3 = (-2.0 * kappa * _bil(fr, _Gk4[3]) - _dbil(fr, _G5k[2], 1)
          + _dbil(fr, _G5k[1], 2) + _bidir(fr, _G[4], 3)
          + 1j * _dbil(fr, _G[3], 0)) / (2j * den)
    return _finish(p, (a0, a1, a2, a3), real_tol)


def invert_gamma5gamma4(field: SpinorField, kappa: float, p,
                        guard: float = DEFAULT_GUARD,
                        real_tol: float = DEFAULT_REAL_TOL) -> PotentialSample:
    """Solve the second relation family, denominator psi* g5 g4 psi (mass-free)."""
    p = as_point(p)
    fr = frame(field, p)
    den = _bil(fr, _G54)
    if abs(den) <= guard * fr.norm_sq:
        raise GuardViolated(
            f"|psi* g5 g4 psi| = {abs(den):.3e} <= guard at {tuple(p)}")
    a0 = (1j * _bidir(fr, _G54, 0)
          - sum(_dbil(fr, _G5k[k], k) for k in (1, 2, 3))) / (2.0 * den)
    a1 = (_bidir(fr, _G54, 1) - _dbil(fr, _G[3], 2) + _dbil(fr, _G[2], 3)
          + 1j * _dbil(fr, _G5k[1], 0)) / (2j * den)
    a2 = (_dbil(fr, _G[3], 1) + _bidir(fr, _G54, 2) - _dbil(fr, _G[1], 3)
          + 1j * _dbil(fr, _G5k[2], 0)) / (2j * den)
    a3 = (-_dbil(fr, _G[2], 1) + _dbil(fr, _G[1], 2) + _bidir(fr, _G54, 3)
          + 1j * _dbil(fr, _G5k[3], 0)) / (2j * den)
    return _finish(p, (a0, a1, a2, a3), real_tol)


# ---------------------------------------------------------------------------
# Mass extraction

def extract_mass_at(field: SpinorField, a0: Expr | None, p,
                    a0_params: Mapping[str, complex] | None = None) -> MassSample:
    """Pointwise mass from the temporal relation; requires the a0 component."""
    p = as_point(p)
    fr = frame(field, p)
    norm_sq = fr.norm_sq
    if norm_sq == 0.0:
        raise ZeroNorm(f"spinor vanishes at {tuple(p)}")
    a0_value = 0j
    if a0 is not None:
        a0_value = exprlang.evaluate(a0, p, a0_params)
    value = (1j * _bidir(fr, _G[4], 0)
             - sum(_dbil(fr, _G[k], k) for k in (1, 2, 3))
             - 2.0 * a0_value * _bil(fr, _G[4])) / (2.0 * norm_sq)
    return MassSample(float(value.real), abs(value.imag))


def extract_mass(field: SpinorField, a0: Expr | None, domain: SampleDomain,
                 a0_params: Mapping[str, complex] | None = None,
                 support_tol: float = 1e-12,
                 spread_tol: float = DEFAULT_SPREAD_TOL,
                 crosscheck: bool = True) -> MassEstimate:
    """Mass over all support points: mean, max spread, and a gauge-fixed cross-check.

    A spread beyond tolerance contradicts mass uniqueness, so the input cannot
    be a Dirac solution; the same applies when the gauge-fixed route disagrees.
    """
    points = require_support(sample_support(field, domain, support_tol))
    samples = [extract_mass_at(field, a0, p, a0_params) for p in points]
    kappas = np.array([s.kappa for s in samples])
    mean = float(kappas.mean())
    spread = float(np.abs(kappas - mean).max())
    max_imag = max(s.imag_residue for s in samples)
    if spread > spread_tol * (1.0 + abs(mean)):
        raise MassInconsistent(
            f"pointwise mass varies by {spread:.3e} around {mean:.6g} over "
            f"{len(points)} support points; input is not a Dirac solution")
    if max_imag > spread_tol * (1.0 + abs(mean)):
        raise MassInconsistent(
            f"mass has imaginary residue {max_imag:.3e}; input is not a Dirac solution")

    gap = None
    if crosscheck and a0 is not None and a0 != exprlang.ZERO:
        fixed = gauge_fix_temporal(field, a0, k=0.0, a0_params=a0_params)
        checks = [extract_mass_at(fixed, None, p).kappa for p in points[:3]]
        gap = float(max(abs(k - mean) for k in checks))
        if gap > CROSSCHECK_TOL * (1.0 + abs(mean)):
            raise MassInconsistent(
                f"gauge-fixed mass route disagrees by {gap:.3e} with the direct route")
    return MassEstimate(mean, spread, len(points), max_imag, gap)


# ---------------------------------------------------------------------------
# Gauge machinery

def gauge_transform(field: SpinorField, f: Expr,
                    f_params: Mapping[str, complex] | None = None
                    ) -> tuple[SpinorField, FourPotential]:
    """Multiply by exp(-i f); return the transformed spinor and the potential shift.

    If psi solves the equation with (a0, a1, a2, a3), the returned spinor
    solves it with (a0 + d0 f, a1 - d1 f, a2 - d2 f, a3 - d3 f).  The
    per-component signs are fixed by the residual oracle and frozen in tests.
    """
    factor = exprlang.call("exp", exprlang.mul(exprlang.Num(-1j), f))
    transformed = field.scaled_by(factor, f_params)
    shift = FourPotential(
        [exprlang.differentiate(f, 0),
         exprlang.neg(exprlang.differentiate(f, 1)),
         exprlang.neg(exprlang.differentiate(f, 2)),
         exprlang.neg(exprlang.differentiate(f, 3))],
        f_params)
    return transformed, shift


def gauge_fix_temporal(field: SpinorField, a0: Expr, k: float,
                       a0_params: Mapping[str, complex] | None = None) -> SpinorField:
    """Remove the temporal component: psi0 = exp(+i * integral_k^{x0} a0 ds) psi.

    The path integral is evaluated by adaptive quadrature (tolerance 1e-11)
    at each requested point.
    """
    integral = exprlang.path_integral(a0, k)
    factor = exprlang.call("exp", exprlang.mul(exprlang.Num(1j), integral))
    return field.scaled_by(factor, a0_params)

"""Spinor fields, bilinear covariants, the bidirectional derivative, sampling.

A spinor field holds four closed-form complex components over (x0, x1, x2,
x3) plus shared parameter bindings.  Component partial derivatives are
differentiated symbolically once and cached per (component, axis); caching
is semantically invisible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import exprlang
from .errors import NoSupportPoints
from .exprlang import Expr

CVector4 = np.ndarray  # shape (4,), complex128

DEFAULT_SUPPORT_TOL = 1e-12


class Point(NamedTuple):
    x0: float
    x1: float
    x2: float
    x3: float


def as_point(p) -> Point:
    if not isinstance(p, Point):
        p = Point(float(p[0]), float(p[1]), float(p[2]), float(p[3]))
    if not all(np.isfinite(c) for c in p):
        raise ValueError(f"point coordinates must be finite, got {tuple(p)}")
    return p


def merge_params(*maps: Mapping[str, complex] | None) -> dict[str, complex]:
    merged: dict[str, complex] = {}
    for m in maps:
        if not m:
            continue
        for k, v in m.items():
            v = complex(v)
            if k in merged and merged[k] != v:
                raise ValueError(f"conflicting values for parameter {k!r}")
            merged[k] = v
    return merged


class SpinorField:
    """Four expression components with shared parameter bindings."""

    def __init__(self, components: Sequence[Expr], params: Mapping[str, complex] | None = None):
        components = tuple(components)
        if len(components) != 4:
            raise ValueError(f"a spinor field has exactly 4 components, got {len(components)}")
        self.components = components
        self.params = dict(params) if params else {}
        self._derivatives: dict[tuple[int, int], Expr] = {}

    @classmethod
    def from_strings(cls, texts: Sequence[str],
                     params: Mapping[str, complex] | None = None) -> "SpinorField":
        return cls([exprlang.parse(t) for t in texts], params)

    def component_derivative(self, idx: int, axis: int) -> Expr:
        key = (idx, axis)
        if key not in self._derivatives:
            self._derivatives[key] = exprlang.differentiate(self.components[idx], axis)
        return self._derivatives[key]

    def value(self, p) -> CVector4:
        p = as_point(p)
        return np.array([exprlang.evaluate(c, p, self.params) for c in self.components])

    def derivative_value(self, p, axis: int) -> CVector4:
        p = as_point(p)
        return np.array([exprlang.evaluate(self.component_derivative(k, axis), p, self.params)
                         for k in range(4)])

    def values(self, points: np.ndarray) -> np.ndarray:
        """Componentwise evaluation over (N, 4) points; returns (N, 4) complex."""
        cols = [exprlang.evaluate_many(c, points, self.params) for c in self.components]
        return np.stack(cols, axis=1)

    def map_components(self, fn) -> "SpinorField":
        return SpinorField([fn(c) for c in self.components], self.params)

    def scaled_by(self, factor: Expr,
                  extra_params: Mapping[str, complex] | None = None) -> "SpinorField":
        params = merge_params(self.params, extra_params)
        return SpinorField([exprlang.mul(factor, c) for c in self.components], params)


@dataclass
class Frame:
    """Spinor value and its four partial-derivative values at one point."""

    value: CVector4
    derivs: tuple[CVector4, CVector4, CVector4, CVector4]

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.value, self.value).real)


def frame(field: SpinorField, p) -> Frame:
    p = as_point(p)
    return Frame(field.value(p), tuple(field.derivative_value(p, axis) for axis in range(4)))


def spinor_eval(field: SpinorField, p) -> CVector4:
    """Pointwise value of the spinor as a complex 4-vector."""
    return field.value(p)


def bilinear_value(v: CVector4, matrix: np.ndarray, conjugate_left: bool) -> complex:
    """Fixed-order bilinear sum.

    Sequential accumulation over nonzero entries makes algebraically cancelling
    terms cancel exactly in floating point, which BLAS-blocked dot products do
    not guarantee.
    """
    total = 0j
    for r in range(4):
        left = complex(v[r]).conjugate() if conjugate_left else complex(v[r])
        for c in range(4):
            m = complex(matrix[r, c])
            if m != 0:
                total += left * m * complex(v[c])
    return total


def bilinear_adjoint(field: SpinorField, matrix: np.ndarray, p) -> complex:
    """(conjugate transpose of psi) . M . psi at the point."""
    return bilinear_value(field.value(p), matrix, conjugate_left=True)


def bilinear_transpose(field: SpinorField, matrix: np.ndarray, p) -> complex:
    """(plain transpose of psi) . M . psi at the point, no conjugation."""
    return bilinear_value(field.value(p), matrix, conjugate_left=False)


def bidirectional(field: SpinorField, matrix: np.ndarray, axis: int, p) -> complex:
    """psi* M (d psi) - (d psi)* M psi with the exact symbolic partial."""
    v = field.value(p)
    dv = field.derivative_value(p, axis)
    return complex(np.vdot(v, matrix @ dv) - np.vdot(dv, matrix @ v))


def partial_bilinear_adjoint(field: SpinorField, matrix: np.ndarray, axis: int, p) -> complex:
    """d_axis (psi* M psi) expanded through the product rule."""
    v = field.value(p)
    dv = field.derivative_value(p, axis)
    return complex(np.vdot(dv, matrix @ v) + np.vdot(v, matrix @ dv))


@dataclass(frozen=True)
class SampleDomain:
    """Axis-aligned box in (x0..x3) sampled at `count` seeded uniform points."""

    box: tuple[tuple[float, float], tuple[float, float],
               tuple[float, float], tuple[float, float]] = ((-1.0, 1.0),) * 4
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sample count must be >= 1")
        for lo, hi in self.box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise ValueError(f"invalid interval ({lo}, {hi})")

    def points(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return rng.uniform(lo, hi, size=(self.count, 4))


@dataclass
class SupportSample:
    """Partition of sampled points by spinor magnitude."""

    support: np.ndarray      # (n, 4) points where the spinor is resolved nonzero
    null: np.ndarray         # (m, 4) remaining points
    norms: np.ndarray        # (count,) spinor norms in sampling order
    threshold: float
    tol: float

    @property
    def has_support(self) -> bool:
        return len(self.support) > 0


def sample_support(field: SpinorField, domain: SampleDomain,
                   tol: float = DEFAULT_SUPPORT_TOL) -> SupportSample:
    """Classify sampled points: in support iff |psi| > tol * (1 + max |psi|)."""
    if tol <= 0:
        raise ValueError("support tolerance must be positive")
    pts = domain.points()
    values = field.values(pts)
    norms = np.linalg.norm(values, axis=1)
    threshold = tol * (1.0 + float(norms.max()))
    mask = norms > threshold
    return SupportSample(pts[mask], pts[~mask], norms, threshold, tol)


def require_support(sample: SupportSample) -> np.ndarray:
    if not sample.has_support:
        raise NoSupportPoints("no sampled point carries a nonzero spinor value")
    return sample.support

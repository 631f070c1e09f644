"""Tip compliance of an anchored beam path by the unit-load method.

Only bending energy is counted. The compliance entry for unit loads i and j
is the integral of m_i * m_j / (E I) along the path, where m_i is the
internal bending moment produced by load i applied at the tip.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import SingularCompliance
from .geometry import (
    DEFAULT_YOUNGS_MODULUS,
    BeamPath,
    RssParams,
    SpringVariant,
    build_rss_path,
)

RCOND_THRESHOLD = 1e-12
COORDS = ("x", "y", "phi")


@dataclass(frozen=True)
class LoadVector:
    fx: float = 0.0
    fy: float = 0.0
    m_phi: float = 0.0

    def as_array(self):
        return np.array([self.fx, self.fy, self.m_phi], dtype=float)


@dataclass(frozen=True)
class DisplacementVector:
    dx: float
    dy: float
    d_phi: float

    @classmethod
    def from_array(cls, a):
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self):
        return np.array([self.dx, self.dy, self.d_phi], dtype=float)


class MatrixKind(enum.Enum):
    COMPLIANCE = "compliance"
    STIFFNESS = "stiffness"


@dataclass(frozen=True, eq=False)
class InPlaneMatrix:
    """3x3 matrix over (x, y, phi)."""

    values: np.ndarray
    kind: MatrixKind

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, idx):
        return self.values[idx]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)

    def asymmetry(self):
        scale = np.abs(self.values).max()
        return float(np.abs(self.values - self.values.T).max() / scale) if scale else 0.0


@dataclass(frozen=True)
class MomentField:
    """Per-segment linear bending moment m(s) = intercept + slope * s.

    Arrays have shape (n_segments, 3); the last axis is the unit load
    (Fx at tip, Fy at tip, M at tip). ``lengths`` holds segment lengths.
    """

    intercept: np.ndarray
    slope: np.ndarray
    lengths: np.ndarray

    def evaluate(self, segment, s):
        return self.intercept[segment] + self.slope[segment] * s


def moment_field(path: BeamPath) -> MomentField:
    v = path.vertices()
    start = v[:-1]
    delta = v[1:] - start
    lengths = np.hypot(delta[:, 0], delta[:, 1])
    tdir = delta / lengths[:, None]
    xt, yt = v[-1]
    n = len(path)
    intercept = np.empty((n, 3))
    slope = np.empty((n, 3))
    intercept[:, 0] = start[:, 1] - yt
    slope[:, 0] = tdir[:, 1]
    intercept[:, 1] = xt - start[:, 0]
    slope[:, 1] = -tdir[:, 0]
    intercept[:, 2] = 1.0
    slope[:, 2] = 0.0
    return MomentField(intercept, slope, lengths)


@lru_cache(maxsize=None)
def _gauss_rule(n_points):
    x, w = np.polynomial.legendre.leggauss(n_points)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def compliance_matrix(path: BeamPath, youngs_modulus=DEFAULT_YOUNGS_MODULUS, *, gauss_points=2,
                      backend=None) -> InPlaneMatrix:
    """Bending-only tip compliance of ``path`` clamped at its anchor.

    The integrand is quadratic on each straight segment, so the default
    2-point Gauss rule is exact. ``backend`` may be "numba" or "numpy" to
    pick a kernel explicitly.
    """
    gx, gw = _gauss_rule(gauss_points)
    verts = path.vertices()
    ei = youngs_modulus * path.second_moments()
    if backend is None:
        kern = _kernels.bending_compliance
    elif backend == "numpy":
        kern = _kernels.bending_compliance_numpy
    elif backend == "numba":
        if _kernels.bending_compliance_jit is None:
            raise RuntimeError("numba backend is not available")
        kern = _kernels.bending_compliance_jit
    else:
        raise ValueError(f"unknown backend {backend!r}")
    c = kern(verts, ei, np.asarray(gx), np.asarray(gw))
    c = 0.5 * (c + c.T)
    return InPlaneMatrix(c, MatrixKind.COMPLIANCE)


def _equilibrated(m):
    """Return (D, D m D) with D = diag(1/sqrt(diag(m))); zero diagonals left unscaled."""
    d = np.diag(m).copy()
    scale = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 1.0)
    return scale, m * scale[:, None] * scale[None, :]


def _rcond_and_null(m):
    scale, ms = _equilibrated(m)
    w, vecs = np.linalg.eigh(ms)
    top = np.abs(w).max()
    rcond = 0.0 if top == 0 else max(w.min(), 0.0) / top
    null = scale * vecs[:, 0]
    null = null / np.abs(null).max()
    if null[np.argmax(np.abs(null))] < 0:
        null = -null
    return rcond, null


def stiffness_matrix(c: InPlaneMatrix) -> InPlaneMatrix:
    """Invert a compliance matrix. Raises SingularCompliance when ill-conditioned.

    Conditioning is judged after symmetric diagonal scaling, so the test
    does not depend on the mix of length and angle units.
    """
    m = np.asarray(c.values if isinstance(c, InPlaneMatrix) else c, dtype=float)
    rcond, null = _rcond_and_null(m)
    if rcond < RCOND_THRESHOLD:
        raise SingularCompliance(rcond, null)
    scale, ms = _equilibrated(m)
    k = np.linalg.inv(ms) * scale[:, None] * scale[None, :]
    k = 0.5 * (k + k.T)
    return InPlaneMatrix(k, MatrixKind.STIFFNESS)


@dataclass(frozen=True)
class SpringConstants:
    """The six independent entries of a spring's tip stiffness matrix."""

    k_x: float
    k_y: float
    k_phi: float
    k_xy: float
    k_xphi: float
    k_yphi: float

    @classmethod
    def from_matrix(cls, k):
        k = np.asarray(k.values if isinstance(k, InPlaneMatrix) else k)
        return cls(float(k[0, 0]), float(k[1, 1]), float(k[2, 2]),
                   float(k[0, 1]), float(k[0, 2]), float(k[1, 2]))

    def matrix(self) -> InPlaneMatrix:
        return InPlaneMatrix(
            [[self.k_x, self.k_xy, self.k_xphi],
             [self.k_xy, self.k_y, self.k_yphi],
             [self.k_xphi, self.k_yphi, self.k_phi]],
            MatrixKind.STIFFNESS,
        )


def spring_constants(params: RssParams, variant: SpringVariant = SpringVariant.TYPE_A) -> SpringConstants:
    path = build_rss_path(params, variant)
    k = stiffness_matrix(compliance_matrix(path, params.youngs_modulus))
    return SpringConstants.from_matrix(k)

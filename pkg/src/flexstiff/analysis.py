"""Reflector response to parasitic loads, coupling ratios and parameter sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .castigliano import DisplacementVector, InPlaneMatrix, LoadVector
from .errors import SingularSystem, ValidationError
from .geometry import RssParams
from .suspension import (
    DEFAULT_REFLECTOR_HALF_LEN,
    LayoutKind,
    Provenance,
    SuspensionStiffness,
    build_suspension,
)

RESIDUAL_TOL = 1e-9
FLATNESS_THRESHOLD = 0.15
SWEEP_PARAMETERS = ("N", "w_o", "w_p", "w_pc", "l1", "l2", "l3", "l4", "l5")


def _matrix(k):
    if isinstance(k, SuspensionStiffness):
        return k.values
    if isinstance(k, InPlaneMatrix):
        return k.values
    return np.asarray(k, dtype=float)


def solve_response(k, load: LoadVector) -> DisplacementVector:
    """Exact 3x3 solve of K d = F with a residual check."""
    m = _matrix(k)
    f = load.as_array() if isinstance(load, LoadVector) else np.asarray(load, dtype=float)
    d = np.diag(m)
    if np.any(d <= 0):
        raise SingularSystem("stiffness has a non-positive diagonal entry")
    s = 1.0 / np.sqrt(d)
    ms = m * s[:, None] * s[None, :]
    if 1.0 / np.linalg.cond(ms) < 1e-13:
        raise SingularSystem("stiffness matrix is singular or ill-conditioned")
    x = s * np.linalg.solve(ms, s * f)
    # one refinement step keeps the residual at round-off level
    x = x + s * np.linalg.solve(ms, s * (f - m @ x))
    fn = np.linalg.norm(f)
    res = np.linalg.norm(m @ x - f)
    if fn > 0 and res > RESIDUAL_TOL * fn:
        raise SingularSystem(f"residual {res / fn:.3g} exceeds tolerance")
    return DisplacementVector.from_array(x)


@dataclass(frozen=True)
class ResponseCurve:
    fx: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    d_phi: np.ndarray

    @property
    def samples(self):
        return list(zip(self.fx.tolist(), self.dx.tolist(), self.dy.tolist(), self.d_phi.tolist()))


def response_curve(k, fx_max, n_samples=11) -> ResponseCurve:
    if not fx_max > 0:
        raise ValidationError("fx_max", f"must be > 0, got {fx_max!r}")
    if n_samples < 2:
        raise ValidationError("samples", f"need at least 2 samples, got {n_samples!r}")
    fx = np.linspace(0.0, fx_max, n_samples)
    out = np.array([solve_response(k, LoadVector(fx=f)).as_array() for f in fx])
    return ResponseCurve(fx, out[:, 0], out[:, 1], out[:, 2])


@dataclass(frozen=True)
class CouplingMetrics:
    r_y: float
    r_phi_norm: float
    exact_dy_per_fx: float
    exact_dphi_per_fx: float
    approx_dy_per_fx: float


def coupling_metrics(k) -> CouplingMetrics:
    """R_y = -K_xy/K_y and its rotational analog -K_xphi/K_phi.

    ``approx_dy_per_fx`` is R_y / K_x, which drops the K_xy**2 term of the
    exact solve; ``exact_*`` come from the full 3x3 solve with unit F_x.
    """
    m = _matrix(k)
    r_y = -m[0, 1] / m[1, 1]
    r_phi = -m[0, 2] / m[2, 2]
    d = solve_response(m, LoadVector(fx=1.0))
    return CouplingMetrics(
        r_y=float(r_y),
        r_phi_norm=float(r_phi),
        exact_dy_per_fx=d.dy,
        exact_dphi_per_fx=d.d_phi,
        approx_dy_per_fx=float(r_y / m[0, 0]),
    )


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    baseline: RssParams = field(default_factory=RssParams)
    layout: LayoutKind = LayoutKind.CENTROSYMMETRIC
    reflector_half_len: float = DEFAULT_REFLECTOR_HALF_LEN
    provenance: Provenance = Provenance.TABLE1

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValidationError("parameter", f"unknown sweep parameter {self.parameter!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValidationError("values", "sweep needs at least one value")


@dataclass(frozen=True)
class SweepRow:
    value: float
    r_y: float
    r_y_normalized: float
    k_x: float
    k_y: float
    k_xy: float
    error: str = ""


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    baseline_value: float
    baseline_r_y: float
    rows: tuple[SweepRow, ...]

    def max_relative_change(self):
        """Largest |(|R_y| - |R_y0|)| / |R_y0| over the successful rows."""
        base = abs(self.baseline_r_y)
        ok = [abs(r.r_y) for r in self.rows if not r.error]
        return max(abs(v - base) / base for v in ok) if ok else float("nan")


def _suspension_k(params, spec):
    model = build_suspension(params, spec.layout, spec.reflector_half_len)
    return model.stiffness(spec.provenance)


def _evaluate(spec, value):
    try:
        params = spec.baseline.with_value(spec.parameter, value)
        k = _suspension_k(params, spec)
        return (value, -k.K_xy / k.K_y, k.K_x, k.K_y, k.K_xy, "")
    except (ValidationError, np.linalg.LinAlgError) as exc:
        nan = float("nan")
        return (value, nan, nan, nan, nan, f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, workers=1) -> SweepResult:
    """Rebuild the full pipeline for every value; rows keep the input order."""
    base_k = _suspension_k(spec.baseline, spec)
    base_r = -base_k.K_xy / base_k.K_y
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(lambda v: _evaluate(spec, v), spec.values))
    else:
        raw = [_evaluate(spec, v) for v in spec.values]
    rows = tuple(
        SweepRow(value=v, r_y=float(r), r_y_normalized=float(r / base_r), k_x=float(kx),
                 k_y=float(ky), k_xy=float(kxy), error=err)
        for v, r, kx, ky, kxy, err in raw
    )
    return SweepResult(spec.parameter, spec.baseline.value_of(spec.parameter), float(base_r), rows)


def default_sweep_values(parameter, baseline: RssParams | None = None, n=11):
    """N over 1..4; any other parameter over +-50 % of its baseline value."""
    baseline = baseline or RssParams()
    if parameter == "N":
        return (1, 2, 3, 4)
    v0 = baseline.value_of(parameter)
    return tuple(float(v0 * f) for f in np.linspace(0.5, 1.5, n))

"""Two-spring suspensions of a rigid reflector.

Two independent assemblies are provided. ``assemble_table1`` writes the
closed-form layout table entries verbatim. ``assemble_rigid_body`` sums
congruence-transformed spring stiffnesses, K = sum T_i^T K_i T_i, where T_i
maps reflector motion (dx, dy, phi) about the reference point to the motion
of spring tip i.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .castigliano import (
    InPlaneMatrix,
    MatrixKind,
    SpringConstants,
    compliance_matrix,
    stiffness_matrix,
)
from .errors import ValidationError
from .geometry import (
    UM,
    BeamPath,
    PlanarTransform,
    Point2,
    RssParams,
    SpringVariant,
    build_rss_path,
    path_extents,
    transform,
    translation,
)

DEFAULT_REFLECTOR_HALF_LEN = 200 * UM


class LayoutKind(enum.Enum):
    CENTROSYMMETRIC = "centrosymmetric"
    AXISYMMETRIC = "axisymmetric"

    @property
    def variants(self):
        """Spring variants (left, right), each in its own inward-facing local frame."""
        if self is LayoutKind.CENTROSYMMETRIC:
            return SpringVariant.TYPE_A, SpringVariant.TYPE_B
        return SpringVariant.TYPE_A, SpringVariant.TYPE_A


class Provenance(enum.Enum):
    TABLE1 = "table1"
    RIGID_BODY = "rigid_body"


@dataclass(frozen=True)
class SuspensionGeometry:
    l_m: float
    l_rss: float
    attachments: tuple[PlanarTransform, ...] = ()

    def __post_init__(self):
        if not self.l_m > 0:
            raise ValidationError("l_m", f"must be > 0, got {self.l_m!r}")
        if not self.l_rss > 0:
            raise ValidationError("l_rss", f"must be > 0, got {self.l_rss!r}")


@dataclass(frozen=True)
class SuspensionStiffness:
    matrix: InPlaneMatrix
    provenance: Provenance

    @property
    def values(self):
        return self.matrix.values

    K_x = property(lambda self: float(self.values[0, 0]))
    K_y = property(lambda self: float(self.values[1, 1]))
    K_phi = property(lambda self: float(self.values[2, 2]))
    K_xy = property(lambda self: float(self.values[0, 1]))
    K_xphi = property(lambda self: float(self.values[0, 2]))
    K_yphi = property(lambda self: float(self.values[1, 2]))


def assemble_table1(k: SpringConstants, layout: LayoutKind, geom: SuspensionGeometry) -> SuspensionStiffness:
    """Layout stiffness exactly as tabulated, from the TypeA spring constants."""
    aug = 6.0 * (1.0 + geom.l_m / geom.l_rss) ** 2
    kx = 2.0 * k.k_x
    ky = 2.0 * k.k_y
    kphi = 2.0 * k.k_phi + aug * k.k_phi
    if layout is LayoutKind.CENTROSYMMETRIC:
        kxy, kxphi = 2.0 * k.k_xy, 0.0
    else:
        kxy, kxphi = 0.0, 2.0 * k.k_xphi + aug * k.k_xphi
    m = [[kx, kxy, kxphi], [kxy, ky, 0.0], [kxphi, 0.0, kphi]]
    return SuspensionStiffness(InPlaneMatrix(m, MatrixKind.STIFFNESS), Provenance.TABLE1)


def frame_rotation(t: PlanarTransform) -> np.ndarray:
    """3x3 map of (x, y, phi) components from a spring's local frame to global."""
    q = np.zeros((3, 3))
    q[:2, :2] = t.linear()
    q[2, 2] = -1.0 if t.mirror else 1.0
    return q


def rigid_link(r: Point2, reference: Point2 = Point2(0.0, 0.0)) -> np.ndarray:
    """T with (tip dx, dy, phi) = T @ (body dx, dy, phi) for a tip at ``r``."""
    rx = r.x - reference.x
    ry = r.y - reference.y
    return np.array([[1.0, 0.0, -ry], [0.0, 1.0, rx], [0.0, 0.0, 1.0]])


def _as_matrix(k):
    if isinstance(k, SpringConstants):
        return k.matrix().values
    if isinstance(k, InPlaneMatrix):
        return k.values
    return np.asarray(k, dtype=float)


def assemble_rigid_body(springs, reference: Point2 = Point2(0.0, 0.0)) -> SuspensionStiffness:
    """Body stiffness about ``reference`` from springs given in their local frames.

    ``springs`` is a sequence of (stiffness, attachment): the stiffness is
    about the spring tip in the spring's local axes, and the attachment
    transform orients those axes and places the tip on the body.
    """
    springs = list(springs)
    if not springs:
        raise ValidationError("springs", "need at least one spring")
    total = np.zeros((3, 3))
    for i, (k, frame) in enumerate(springs):
        kl = _as_matrix(k)
        sym = 0.5 * (kl + kl.T)
        if kl.shape != (3, 3) or not np.allclose(kl, sym, rtol=1e-9, atol=0.0):
            raise ValidationError(f"springs[{i}]", "stiffness must be a symmetric 3x3 matrix")
        try:
            np.linalg.cholesky(sym)
        except np.linalg.LinAlgError:
            raise ValidationError(f"springs[{i}]", "stiffness is not positive definite") from None
        q = frame_rotation(frame)
        kg = q @ sym @ q.T
        t = rigid_link(frame.translation, reference)
        total += t.T @ kg @ t
    total = 0.5 * (total + total.T)
    return SuspensionStiffness(InPlaneMatrix(total, MatrixKind.STIFFNESS), Provenance.RIGID_BODY)


@dataclass(frozen=True)
class PlacedSpring:
    variant: SpringVariant
    local_path: BeamPath
    attachment: PlanarTransform
    global_path: BeamPath
    stiffness: InPlaneMatrix


@dataclass(frozen=True)
class SuspensionModel:
    params: RssParams
    layout: LayoutKind
    reflector_half_len: float
    springs: tuple[PlacedSpring, PlacedSpring]
    geometry: SuspensionGeometry
    spring_constants: SpringConstants
    table1: SuspensionStiffness
    rigid_body: SuspensionStiffness

    def stiffness(self, provenance=Provenance.RIGID_BODY) -> SuspensionStiffness:
        return self.table1 if Provenance(provenance) is Provenance.TABLE1 else self.rigid_body


def attachment_frames(reflector_half_len):
    """Left tip at (-l_m, 0) in the local frame as-is; right tip at (+l_m, 0)
    with the local frame reflected across the Y-axis so it also faces inward."""
    left = PlanarTransform(0.0, Point2(-reflector_half_len, 0.0))
    right = PlanarTransform(math.pi, Point2(reflector_half_len, 0.0), mirror=True)
    return left, right


def place(path: BeamPath, attachment: PlanarTransform) -> BeamPath:
    """Move ``path`` so its tip sits at the attachment point, oriented by the attachment frame."""
    tip = path.tip
    return transform(transform(path, translation(0.0 - tip.x, 0.0 - tip.y)), attachment)


def build_suspension(params: RssParams, layout: LayoutKind = LayoutKind.CENTROSYMMETRIC,
                     reflector_half_len=DEFAULT_REFLECTOR_HALF_LEN, *, l_m=None, l_rss=None) -> SuspensionModel:
    """Springs on both sides of a reflector of half-extent ``reflector_half_len``.

    ``l_m`` and ``l_rss`` override the ratio terms of the tabulated assembly
    only; by default they are the reflector half-extent and the spring's
    X-extent.
    """
    layout = LayoutKind(layout)
    if not reflector_half_len > 0:
        raise ValidationError("reflector_half_len", f"must be > 0, got {reflector_half_len!r}")
    frames = attachment_frames(reflector_half_len)
    placed = []
    for variant, frame in zip(layout.variants, frames):
        local = build_rss_path(params, variant)
        k = stiffness_matrix(compliance_matrix(local, params.youngs_modulus))
        placed.append(PlacedSpring(variant, local, frame, place(local, frame), k))

    type_a = build_rss_path(params, SpringVariant.TYPE_A)
    k_a = stiffness_matrix(compliance_matrix(type_a, params.youngs_modulus))
    consts = SpringConstants.from_matrix(k_a)
    geom = SuspensionGeometry(
        l_m=reflector_half_len if l_m is None else l_m,
        l_rss=path_extents(type_a)[0] if l_rss is None else l_rss,
        attachments=frames,
    )
    return SuspensionModel(
        params=params,
        layout=layout,
        reflector_half_len=reflector_half_len,
        springs=tuple(placed),
        geometry=geom,
        spring_constants=consts,
        table1=assemble_table1(consts, layout, geom),
        rigid_body=assemble_rigid_body([(p.stiffness, p.attachment) for p in placed]),
    )

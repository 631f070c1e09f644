"""Planar beam paths and the serpentine spring construction.

Coordinates follow the device frame: X is the direction of the parasitic
comb force, Y lies in-plane perpendicular to it, and rotations ``phi`` are
about +Z (counterclockwise positive). All values are SI.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ValidationError

UM = 1e-6
DEFAULT_YOUNGS_MODULUS = 169e9
DEFAULT_THICKNESS = 30 * UM


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError("point", f"non-finite coordinate ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class CrossSection:
    width: float
    thickness: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValidationError("width", f"must be > 0, got {self.width!r}")
        if not self.thickness > 0:
            raise ValidationError("thickness", f"must be > 0, got {self.thickness!r}")

    @property
    def area(self):
        return self.width * self.thickness

    @property
    def second_moment(self):
        """In-plane second moment of area, thickness * width**3 / 12."""
        return self.thickness * self.width**3 / 12.0


@dataclass(frozen=True)
class Segment:
    start: Point2
    end: Point2
    section: CrossSection

    def __post_init__(self):
        if not self.length > 0:
            raise ValidationError("segment", f"zero-length segment at ({self.start.x}, {self.start.y})")

    @property
    def length(self):
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)


@dataclass(frozen=True)
class BeamPath:
    """Ordered straight segments from the anchor (clamped) to the free tip."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValidationError("segments", "a path needs at least one segment")
        for k in range(1, len(self.segments)):
            if self.segments[k].start != self.segments[k - 1].end:
                raise ValidationError("segments", f"gap between segment {k - 1} and {k}")

    @classmethod
    def from_vertices(cls, vertices, sections):
        pts = [p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1])) for p in vertices]
        if isinstance(sections, CrossSection):
            sections = [sections] * (len(pts) - 1)
        if len(sections) != len(pts) - 1:
            raise ValidationError("sections", "need one section per segment")
        return cls(tuple(Segment(a, b, s) for a, b, s in zip(pts[:-1], pts[1:], sections)))

    @property
    def anchor(self) -> Point2:
        return self.segments[0].start

    @property
    def tip(self) -> Point2:
        return self.segments[-1].end

    @property
    def points(self) -> list[Point2]:
        return [self.segments[0].start] + [s.end for s in self.segments]

    def vertices(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=float)

    def widths(self) -> np.ndarray:
        return np.array([s.section.width for s in self.segments])

    def thicknesses(self) -> np.ndarray:
        return np.array([s.section.thickness for s in self.segments])

    def second_moments(self) -> np.ndarray:
        return np.array([s.section.second_moment for s in self.segments])

    def areas(self) -> np.ndarray:
        return np.array([s.section.area for s in self.segments])

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.segments)

    def __len__(self):
        return len(self.segments)


class SpringVariant(enum.Enum):
    TYPE_A = "A"
    TYPE_B = "B"


@dataclass(frozen=True)
class PlanarTransform:
    """Rigid placement: optional reflection y -> -y, then rotation, then translation.

    Rotations that are whole quarter turns use exact sines and cosines so
    that symmetric layouts stay exactly symmetric.
    """

    rotation: float = 0.0
    translation: Point2 = field(default_factory=lambda: Point2(0.0, 0.0))
    mirror: bool = False

    def cos_sin(self):
        q = self.rotation / (0.5 * math.pi)
        if abs(q - round(q)) < 1e-12:
            return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[int(round(q)) % 4]
        return math.cos(self.rotation), math.sin(self.rotation)

    def linear(self) -> np.ndarray:
        """2x2 linear part acting on column vectors."""
        c, s = self.cos_sin()
        rot = np.array([[c, -s], [s, c]])
        if self.mirror:
            rot = rot @ np.diag([1.0, -1.0])
        return rot

    def apply(self, p: Point2) -> Point2:
        c, s = self.cos_sin()
        x, y = p.x, (0.0 - p.y if self.mirror else p.y)
        return Point2(c * x - s * y + self.translation.x, s * x + c * y + self.translation.y)


def translation(dx, dy) -> PlanarTransform:
    return PlanarTransform(0.0, Point2(float(dx), float(dy)))


def _map_points(path: BeamPath, fn) -> BeamPath:
    new = {p: fn(p) for p in path.points}
    return BeamPath(tuple(Segment(new[s.start], new[s.end], s.section) for s in path.segments))


def mirror_x(path: BeamPath) -> BeamPath:
    """Reflect about the X-axis, (x, y) -> (x, -y)."""
    return _map_points(path, lambda p: Point2(p.x, 0.0 - p.y))


def transform(path: BeamPath, t: PlanarTransform) -> BeamPath:
    return _map_points(path, t.apply)


def path_extents(path: BeamPath) -> tuple[float, float]:
    """Bounding-box extents (along X, along Y) of the path centerline."""
    v = path.vertices()
    span = v.max(axis=0) - v.min(axis=0)
    return float(span[0]), float(span[1])


@dataclass(frozen=True)
class RssParams:
    """Design variables of one rotated serpentine spring (SI units)."""

    n_meanders: int = 1
    l1: float = 40 * UM
    l2: float = 46 * UM
    l3: float = 6 * UM
    l4: float = 6 * UM
    l5: float = 12 * UM
    w_o: float = 30 * UM
    w_p: float = 3 * UM
    w_pc: float = 3 * UM
    thickness: float = DEFAULT_THICKNESS
    youngs_modulus: float = DEFAULT_YOUNGS_MODULUS

    def __post_init__(self):
        n = self.n_meanders
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ValidationError("N", f"must be an integer >= 1, got {n!r}")
        for f in fields(self):
            if f.name == "n_meanders":
                continue
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v) and v > 0):
                raise ValidationError(f.name, f"must be a finite value > 0, got {v!r}")

    @classmethod
    def from_um(cls, n_meanders=1, *, thickness_um=30.0, youngs_modulus_gpa=169.0, **lengths_um):
        """Build from micrometre lengths and a modulus in GPa."""
        kw = {k: v * UM for k, v in lengths_um.items()}
        return cls(n_meanders=n_meanders, thickness=thickness_um * UM,
                   youngs_modulus=youngs_modulus_gpa * 1e9, **kw)

    def with_value(self, name, value):
        key = "n_meanders" if name == "N" else name
        return replace(self, **{key: value})

    def value_of(self, name):
        return getattr(self, "n_meanders" if name == "N" else name)


def build_rss_path(params: RssParams, variant: SpringVariant = SpringVariant.TYPE_A) -> BeamPath:
    """Serpentine centerline from anchor (origin) to tip, 2 + 4*N segments.

    Lead-in l1 along +X, then N units of (+Y l2, +X l3, -Y l2, +X l4), then a
    lead-out l5 along +X. Transverse legs and the lead segments use ``w_p``;
    the l3/l4 connectors use ``w_pc``. ``w_o`` does not enter the centerline.
    TypeB is the TypeA path reflected about the X-axis.
    """
    t = params.thickness
    beam = CrossSection(params.w_p, t)
    conn = CrossSection(params.w_pc, t)
    moves = [(params.l1, 0.0, beam)]
    for _ in range(params.n_meanders):
        moves += [
            (0.0, params.l2, beam),
            (params.l3, 0.0, conn),
            (0.0, -params.l2, beam),
            (params.l4, 0.0, conn),
        ]
    moves.append((params.l5, 0.0, beam))

    x = y = 0.0
    prev = Point2(x, y)
    segs = []
    for dx, dy, sec in moves:
        x += dx
        y += dy
        cur = Point2(x, y)
        segs.append(Segment(prev, cur, sec))
        prev = cur
    path = BeamPath(tuple(segs))
    if variant is SpringVariant.TYPE_B:
        path = mirror_x(path)
    return path

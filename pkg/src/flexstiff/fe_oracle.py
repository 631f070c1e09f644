"""2D frame finite elements (direct stiffness method) used as a cross-check.

Elements carry axial and Euler-Bernoulli bending stiffness. Rigid links tie
slave nodes to a master node by eliminating the slave DOFs. Each node has
DOFs (u, v, theta).
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .castigliano import DisplacementVector, InPlaneMatrix, LoadVector, MatrixKind
from .errors import SingularSystem, ValidationError
from .geometry import DEFAULT_YOUNGS_MODULUS, BeamPath, Point2

NEAR_INEXTENSIBLE_SCALE = 1e6
DOF_NAMES = ("u", "v", "theta")
REFINE_STEPS = 10


class Mode(enum.Enum):
    FULL = "full"
    NEAR_INEXTENSIBLE = "near_inextensible"

    @property
    def axial_scale(self):
        return 1.0 if self is Mode.FULL else NEAR_INEXTENSIBLE_SCALE


@dataclass(frozen=True)
class FrameNode:
    id: int
    position: Point2


@dataclass(frozen=True)
class FrameElement:
    node_i: int
    node_j: int
    E: float
    A: float
    I: float
    axial_scale: float = 1.0

    def __post_init__(self):
        if self.node_i == self.node_j:
            raise ValidationError("element", f"element connects node {self.node_i} to itself")
        if self.axial_scale < 1.0:
            raise ValidationError("axial_scale", "must be >= 1")


@dataclass(frozen=True)
class RigidLink:
    master: int
    slaves: tuple[int, ...]


@dataclass
class FrameModel:
    """Nodes, elements, supports, nodal loads and rigid links.

    ``constraints`` maps node id -> {dof index: prescribed value}; a fully
    clamped node is ``{0: 0.0, 1: 0.0, 2: 0.0}``.
    """

    nodes: list[FrameNode] = field(default_factory=list)
    elements: list[FrameElement] = field(default_factory=list)
    constraints: dict[int, dict[int, float]] = field(default_factory=dict)
    loads: dict[int, LoadVector] = field(default_factory=dict)
    rigid_links: list[RigidLink] = field(default_factory=list)

    def add_node(self, position: Point2) -> int:
        nid = len(self.nodes)
        self.nodes.append(FrameNode(nid, position))
        return nid

    def clamp(self, nid):
        self.constraints[nid] = {0: 0.0, 1: 0.0, 2: 0.0}

    def add_load(self, nid, load: LoadVector):
        prev = self.loads.get(nid, LoadVector())
        self.loads[nid] = LoadVector(prev.fx + load.fx, prev.fy + load.fy, prev.m_phi + load.m_phi)

    def coords(self):
        return np.array([(n.position.x, n.position.y) for n in self.nodes], dtype=float)

    def element_arrays(self):
        conn = np.array([(e.node_i, e.node_j) for e in self.elements], dtype=np.int64).reshape(-1, 2)
        ea = np.array([e.E * e.A * e.axial_scale for e in self.elements], dtype=float)
        ei = np.array([e.E * e.I for e in self.elements], dtype=float)
        return conn, ea, ei


@dataclass(frozen=True)
class PathMesh:
    anchor: int
    tip: int
    node_ids: tuple[int, ...]


def discretize(path: BeamPath, elems_per_segment=1, *, model: FrameModel | None = None,
               youngs_modulus=DEFAULT_YOUNGS_MODULUS, axial_scale=1.0):
    """Append a mesh of ``path`` to ``model`` (a new one by default).

    Returns (model, PathMesh). Nodes are placed at every vertex plus
    ``elems_per_segment - 1`` evenly spaced interior points per segment.
    """
    if elems_per_segment < 1:
        raise ValidationError("elems_per_segment", "must be >= 1")
    model = FrameModel() if model is None else model
    first = model.add_node(path.anchor)
    ids = [first]
    for seg in path.segments:
        sx, sy = seg.start.x, seg.start.y
        dx, dy = seg.end.x - sx, seg.end.y - sy
        for k in range(1, elems_per_segment + 1):
            if k == elems_per_segment:
                pos = seg.end
            else:
                t = k / elems_per_segment
                pos = Point2(sx + t * dx, sy + t * dy)
            nid = model.add_node(pos)
            model.elements.append(FrameElement(ids[-1], nid, youngs_modulus, seg.section.area,
                                               seg.section.second_moment, axial_scale))
            ids.append(nid)
    return model, PathMesh(first, ids[-1], tuple(ids))


@dataclass
class StaticSolution:
    displacements: np.ndarray  # (n_nodes, 3)
    reactions: np.ndarray  # (n_nodes, 3), nonzero only at constrained DOFs
    residual: float
    stiffness: np.ndarray

    def at(self, nid) -> DisplacementVector:
        return DisplacementVector.from_array(self.displacements[nid])


def global_stiffness(model: FrameModel, backend=None) -> np.ndarray:
    conn, ea, ei = model.element_arrays()
    coords = model.coords()
    if backend == "numpy" or (backend is None and not _kernels.USE_NUMBA) or len(conn) == 0:
        k = _kernels.assemble_frame_numpy(coords, conn, ea, ei)
    elif backend in (None, "numba"):
        if _kernels.assemble_frame_jit is None:
            raise RuntimeError("numba backend is not available")
        k = _kernels.assemble_frame_jit(coords, conn, ea, ei)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return k


def _extended_stiffness(model: FrameModel) -> np.ndarray:
    """Global stiffness in long double.

    Near-inextensible members put axial penalties and bending terms ten
    orders apart into the same nodal entries; the extra mantissa bits keep
    the bending part for the refinement residual.
    """
    conn, ea, ei = model.element_arrays()
    ld = np.longdouble
    return _kernels.assemble_frame_numpy(model.coords().astype(ld), conn, ea.astype(ld), ei.astype(ld))


def _link_transform(model: FrameModel):
    """Full-DOF vector = T @ reduced-DOF vector, after slave elimination."""
    n = len(model.nodes)
    coords = model.coords()
    master_of = {}
    for link in model.rigid_links:
        for s in link.slaves:
            if s == link.master or s in master_of:
                raise ValidationError("rigid_links", f"node {s} is slaved twice or to itself")
            master_of[s] = link.master
    if any(m in master_of for m in master_of.values()):
        raise ValidationError("rigid_links", "chained rigid links are not supported")
    free_nodes = [i for i in range(n) if i not in master_of]
    col = {nid: 3 * j for j, nid in enumerate(free_nodes)}
    t = np.zeros((3 * n, 3 * len(free_nodes)))
    for i in range(n):
        if i in master_of:
            m = master_of[i]
            c = col[m]
            rx, ry = coords[i] - coords[m]
            t[3 * i, c] = 1.0
            t[3 * i, c + 2] = -ry
            t[3 * i + 1, c + 1] = 1.0
            t[3 * i + 1, c + 2] = rx
            t[3 * i + 2, c + 2] = 1.0
        else:
            c = col[i]
            t[3 * i:3 * i + 3, c:c + 3] = np.eye(3)
    return t, free_nodes, master_of


def _load_vector(model):
    f = np.zeros(3 * len(model.nodes))
    for nid, load in model.loads.items():
        f[3 * nid:3 * nid + 3] += load.as_array()
    return f


def solve_static(model: FrameModel, backend=None) -> StaticSolution:
    """Solve K d = f with supports, prescribed values and rigid links."""
    if not model.constraints:
        raise SingularSystem("model has no supports")
    k_full = global_stiffness(model, backend)
    t, free_nodes, master_of = _link_transform(model)
    col = {nid: 3 * j for j, nid in enumerate(free_nodes)}
    k_red = t.T @ k_full @ t
    f_full = _load_vector(model)
    f_red = t.T @ f_full

    n_red = k_red.shape[0]
    prescribed = np.zeros(n_red)
    is_fixed = np.zeros(n_red, dtype=bool)
    for nid, dofs in model.constraints.items():
        if nid in master_of:
            raise ValidationError("constraints", f"node {nid} is a rigid-link slave and cannot be supported")
        for dof, val in dofs.items():
            is_fixed[col[nid] + dof] = True
            prescribed[col[nid] + dof] = val
    free = ~is_fixed

    kff = k_red[np.ix_(free, free)]
    rhs = f_red[free] - k_red[np.ix_(free, is_fixed)] @ prescribed[is_fixed]
    d_red = prescribed.copy()
    if kff.size:
        diag = np.diag(kff)
        free_idx = np.flatnonzero(free)
        if np.any(diag <= 0):
            bad = free_idx[np.argmin(diag)]
            raise SingularSystem(_describe_dof(bad, free_nodes, "has no stiffness"), dof=int(bad))
        s = 1.0 / np.sqrt(diag)
        ks = kff * s[:, None] * s[None, :]
        w, vecs = np.linalg.eigh(ks)
        if w[0] <= 1e-14 * w[-1]:
            bad = free_idx[np.argmax(np.abs(vecs[:, 0]))]
            raise SingularSystem(_describe_dof(bad, free_nodes, "is part of an unconstrained mechanism"),
                                 dof=int(bad))
        # mixed-precision refinement: residuals against the long-double system
        t_ext = t.astype(np.longdouble)
        k_ext = (t_ext.T @ _extended_stiffness(model) @ t_ext)
        kff_ext = k_ext[np.ix_(free, free)]
        rhs_ext = t_ext.T @ f_full.astype(np.longdouble)
        rhs_ext = rhs_ext[free] - k_ext[np.ix_(free, is_fixed)] @ prescribed[is_fixed].astype(np.longdouble)
        x = s * np.linalg.solve(ks, s * rhs)
        for _ in range(REFINE_STEPS):
            r = (rhs_ext - kff_ext @ x.astype(np.longdouble)).astype(float)
            dx = s * np.linalg.solve(ks, s * r)
            x = x + dx
            if np.abs(dx).max() <= 1e-15 * np.abs(x).max():
                break
        d_red[free] = x
        rn = np.linalg.norm(rhs)
        res = (rhs_ext - kff_ext @ x.astype(np.longdouble)).astype(float)
        residual = float(np.linalg.norm(res) / rn) if rn > 0 else 0.0
    else:
        residual = 0.0

    d_full = t @ d_red
    reactions = (k_full @ d_full - f_full).reshape(-1, 3)
    mask = np.zeros_like(reactions, dtype=bool)
    for nid, dofs in model.constraints.items():
        for dof in dofs:
            mask[nid, dof] = True
    reactions = np.where(mask, reactions, 0.0)
    return StaticSolution(d_full.reshape(-1, 3), reactions, residual, k_full)


def _describe_dof(reduced_index, free_nodes, what):
    node = free_nodes[reduced_index // 3]
    return f"node {node} DOF {DOF_NAMES[reduced_index % 3]} {what}"


def strain_energy(model: FrameModel, displacements) -> float:
    d = np.asarray(displacements, dtype=float).ravel()
    k = _extended_stiffness(model)
    dl = d.astype(np.longdouble)
    return float(0.5 * dl @ k @ dl)


def tip_compliance(path: BeamPath, mode: Mode = Mode.FULL, *, youngs_modulus=DEFAULT_YOUNGS_MODULUS,
                   elems_per_segment=2) -> InPlaneMatrix:
    """Tip compliance of ``path`` clamped at its anchor, one unit load case per column."""
    mode = Mode(mode)
    model, mesh = discretize(path, elems_per_segment, youngs_modulus=youngs_modulus,
                             axial_scale=mode.axial_scale)
    model.clamp(mesh.anchor)
    cols = []
    for unit in (LoadVector(fx=1.0), LoadVector(fy=1.0), LoadVector(m_phi=1.0)):
        model.loads = {mesh.tip: unit}
        cols.append(solve_static(model).displacements[mesh.tip])
    c = np.array(cols).T
    return InPlaneMatrix(0.5 * (c + c.T), MatrixKind.COMPLIANCE)


@dataclass
class MirrorModel:
    model: FrameModel
    center: int
    left_edge: int
    meshes: tuple[PathMesh, ...]


def build_mirror_model(suspension, mode: Mode = Mode.FULL, *, elems_per_segment=2) -> MirrorModel:
    """Both spring meshes plus a rigid reflector tied to the spring tips."""
    mode = Mode(mode)
    model = FrameModel()
    center = model.add_node(Point2(0.0, 0.0))
    left_edge = model.add_node(Point2(-suspension.reflector_half_len, 0.0))
    meshes = []
    for spring in suspension.springs:
        _, mesh = discretize(spring.global_path, elems_per_segment, model=model,
                             youngs_modulus=suspension.params.youngs_modulus, axial_scale=mode.axial_scale)
        model.clamp(mesh.anchor)
        meshes.append(mesh)
    model.rigid_links.append(RigidLink(center, (left_edge,) + tuple(m.tip for m in meshes)))
    return MirrorModel(model, center, left_edge, tuple(meshes))


def micromirror_response(suspension, load: LoadVector, mode: Mode = Mode.FULL, *, at="left_edge",
                         elems_per_segment=2) -> DisplacementVector:
    """Reflector-center displacement for ``load`` applied at the left edge (or the center)."""
    mm = build_mirror_model(suspension, mode, elems_per_segment=elems_per_segment)
    node = mm.left_edge if at == "left_edge" else mm.center
    mm.model.loads = {node: load}
    return solve_static(mm.model).at(mm.center)


def dump_mesh_csv(model: FrameModel, nodes_file, elements_file):
    """Write node and element tables for external inspection."""
    w = csv.writer(nodes_file, lineterminator="\n")
    w.writerow(["id", "x_um", "y_um", "fixed_dofs"])
    for n in model.nodes:
        fixed = "".join(DOF_NAMES[d][0] for d in sorted(model.constraints.get(n.id, {})))
        w.writerow([n.id, repr(n.position.x * 1e6), repr(n.position.y * 1e6), fixed])
    w = csv.writer(elements_file, lineterminator="\n")
    w.writerow(["node_i", "node_j", "E_gpa", "A_um2", "I_um4", "axial_scale"])
    for e in model.elements:
        w.writerow([e.node_i, e.node_j, repr(e.E / 1e9), repr(e.A * 1e12), repr(e.I * 1e24), repr(e.axial_scale)])

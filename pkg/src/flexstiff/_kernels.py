"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Two kernels dominate runtime in sweeps and randomized checks: the
bending-energy integral over a beam path and the dense frame stiffness
assembly. Each has a loop formulation (compiled with ``numba.njit`` when
available) and a vectorized numpy formulation. Set the environment variable
``FLEXSTIFF_DISABLE_NUMBA=1`` before import to force the numpy path.
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("FLEXSTIFF_DISABLE_NUMBA", "0") not in ("1", "true", "yes")
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# bending compliance
# ---------------------------------------------------------------------------

# verts: (n+1, 2) anchor-to-tip vertices; ei: (n,) flexural rigidity per
# segment; gauss_x/gauss_w: Gauss-Legendre rule on [-1, 1].
# Unit-load moments: m_Fx = y - y_tip, m_Fy = x_tip - x, m_M = 1.
def _bending_compliance_loop(verts, ei, gauss_x, gauss_w):
    n_seg = ei.shape[0]
    xt = verts[n_seg, 0]
    yt = verts[n_seg, 1]
    out = np.zeros((3, 3))
    m = np.empty(3)
    for k in range(n_seg):
        x0 = verts[k, 0]
        y0 = verts[k, 1]
        dx = verts[k + 1, 0] - x0
        dy = verts[k + 1, 1] - y0
        length = np.sqrt(dx * dx + dy * dy)
        half = 0.5 * length / ei[k]
        for g in range(gauss_x.shape[0]):
            t = 0.5 * (gauss_x[g] + 1.0)
            m[0] = (y0 + t * dy) - yt
            m[1] = xt - (x0 + t * dx)
            m[2] = 1.0
            w = gauss_w[g] * half
            for i in range(3):
                for j in range(3):
                    out[i, j] += w * m[i] * m[j]
    return out


def bending_compliance_numpy(verts, ei, gauss_x, gauss_w):
    """Vectorized form of :func:`bending_compliance`."""
    start = verts[:-1]
    delta = verts[1:] - start
    length = np.hypot(delta[:, 0], delta[:, 1])
    t = 0.5 * (gauss_x + 1.0)
    pts = start[:, None, :] + t[None, :, None] * delta[:, None, :]
    m = np.empty(pts.shape[:2] + (3,))
    m[..., 0] = pts[..., 1] - verts[-1, 1]
    m[..., 1] = verts[-1, 0] - pts[..., 0]
    m[..., 2] = 1.0
    w = gauss_w[None, :] * (0.5 * length / ei)[:, None]
    return np.einsum("sg,sgi,sgj->ij", w, m, m)


# ---------------------------------------------------------------------------
# frame assembly
# ---------------------------------------------------------------------------

def _assemble_frame_loop(coords, conn, ea, ei):
    n_dof = 3 * coords.shape[0]
    kg = np.zeros((n_dof, n_dof))
    kl = np.zeros((6, 6))
    tr = np.zeros((6, 6))
    dofs = np.empty(6, dtype=np.int64)
    for e in range(conn.shape[0]):
        a = conn[e, 0]
        b = conn[e, 1]
        dx = coords[b, 0] - coords[a, 0]
        dy = coords[b, 1] - coords[a, 1]
        length = np.sqrt(dx * dx + dy * dy)
        c = dx / length
        s = dy / length
        ax = ea[e] / length
        b12 = 12.0 * ei[e] / length**3
        b6 = 6.0 * ei[e] / length**2
        b4 = 4.0 * ei[e] / length
        b2 = 2.0 * ei[e] / length
        kl[:, :] = 0.0
        kl[0, 0] = ax
        kl[0, 3] = -ax
        kl[3, 0] = -ax
        kl[3, 3] = ax
        kl[1, 1] = b12
        kl[1, 2] = b6
        kl[1, 4] = -b12
        kl[1, 5] = b6
        kl[2, 1] = b6
        kl[2, 2] = b4
        kl[2, 4] = -b6
        kl[2, 5] = b2
        kl[4, 1] = -b12
        kl[4, 2] = -b6
        kl[4, 4] = b12
        kl[4, 5] = -b6
        kl[5, 1] = b6
        kl[5, 2] = b2
        kl[5, 4] = -b6
        kl[5, 5] = b4
        tr[:, :] = 0.0
        for blk in range(2):
            o = 3 * blk
            tr[o, o] = c
            tr[o, o + 1] = s
            tr[o + 1, o] = -s
            tr[o + 1, o + 1] = c
            tr[o + 2, o + 2] = 1.0
        ke = tr.T @ kl @ tr
        for q in range(3):
            dofs[q] = 3 * a + q
            dofs[3 + q] = 3 * b + q
        for i in range(6):
            for j in range(6):
                kg[dofs[i], dofs[j]] += ke[i, j]
    return kg


def element_matrices_numpy(coords, conn, ea, ei):
    """Global-frame 6x6 element stiffness matrices, shape (n_elem, 6, 6)."""
    d = coords[conn[:, 1]] - coords[conn[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    c = d[:, 0] / length
    s = d[:, 1] / length
    n = conn.shape[0]
    dt = np.result_type(coords, ea, ei)
    kl = np.zeros((n, 6, 6), dtype=dt)
    ax = ea / length
    b12 = 12.0 * ei / length**3
    b6 = 6.0 * ei / length**2
    b4 = 4.0 * ei / length
    b2 = 2.0 * ei / length
    kl[:, 0, 0] = kl[:, 3, 3] = ax
    kl[:, 0, 3] = kl[:, 3, 0] = -ax
    kl[:, 1, 1] = kl[:, 4, 4] = b12
    kl[:, 1, 4] = kl[:, 4, 1] = -b12
    kl[:, 1, 2] = kl[:, 2, 1] = kl[:, 1, 5] = kl[:, 5, 1] = b6
    kl[:, 2, 4] = kl[:, 4, 2] = kl[:, 4, 5] = kl[:, 5, 4] = -b6
    kl[:, 2, 2] = kl[:, 5, 5] = b4
    kl[:, 2, 5] = kl[:, 5, 2] = b2
    tr = np.zeros((n, 6, 6), dtype=dt)
    for o in (0, 3):
        tr[:, o, o] = c
        tr[:, o, o + 1] = s
        tr[:, o + 1, o] = -s
        tr[:, o + 1, o + 1] = c
        tr[:, o + 2, o + 2] = 1.0
    return np.einsum("eki,ekl,elj->eij", tr, kl, tr)


def assemble_frame_numpy(coords, conn, ea, ei):
    """Vectorized form of :func:`assemble_frame`."""
    n_dof = 3 * coords.shape[0]
    ke = element_matrices_numpy(coords, conn, ea, ei)
    dofs = np.concatenate([3 * conn[:, :1] + np.arange(3), 3 * conn[:, 1:] + np.arange(3)], axis=1)
    rows = np.repeat(dofs[:, :, None], 6, axis=2)
    cols = np.repeat(dofs[:, None, :], 6, axis=1)
    kg = np.zeros((n_dof, n_dof), dtype=ke.dtype)
    np.add.at(kg, (rows.ravel(), cols.ravel()), ke.ravel())
    return kg


if USE_NUMBA:
    bending_compliance_jit = njit(cache=True)(_bending_compliance_loop)
    assemble_frame_jit = njit(cache=True)(_assemble_frame_loop)
    bending_compliance = bending_compliance_jit
    assemble_frame = assemble_frame_jit
else:
    bending_compliance_jit = None
    assemble_frame_jit = None
    bending_compliance = bending_compliance_numpy
    assemble_frame = assemble_frame_numpy

"""Oriented-edge matrix bundle for symmetric weighted graphs.

A symmetric zero-diagonal weight matrix A on n vertices with m weighted edges
induces 2m oriented edges. This module builds the bundle of matrices living
on vertex and edge space:

  S, T : n x 2m     signed square-root source / target incidence
  Q    : m x m      diagonal of undirected weight magnitudes |A_e|
  J    : 2m x 2m    orientation swap, J[e, e_inverse] = 1
  L    : 2m x 2m    orientation swap with weights, L[e, e_inverse] = |A_e|
  D    : n x n      diagonal of weighted degrees, D_uu = sum_w |A_uw|
  B    : 2m x 2m    non-backtracking operator (definition below)

B[e, f] is nonzero exactly when f continues e without reversing it
(target(e) = source(f) and f != inverse(e)); the magnitude is
sqrt(|A_e| |A_f|) and the sign depends on how the shared middle vertex v
compares with the outer endpoints u (of e = uv) and w (of f = vw):

  v smaller than both   -> sign(A_e) * sign(A_f)
  w < v < u             -> sign(A_e)
  u < v < w             -> sign(A_f)
  v larger than both    -> +1

These conventions make the incidence identities hold exactly:
SJ = T, TJ = S, A = S T^t, D = S S^t = T T^t, and B + L = T^t S, and they
tie edge space to vertex space through the determinant identity

  det(Id_2m - u(B + L - J))
      = (1 - u^2)^(m-n) * det(Id_n - uA + u^2 D - u^2 Id_n),

which ihara_bass_residual evaluates at a given u.
"""

import numpy as np

from . import linalg


class OrientedEdgeIndex:
    """Canonical ordering of the 2m oriented edges of a weighted graph.

    Edges are sorted by (min endpoint, max endpoint, orientation): for the
    p-th undirected pair {u, v} with u < v, edge id 2p is (u, v) and edge id
    2p+1 is (v, u). inverse_of and pair_id are integer arrays.
    """

    def __init__(self, pairs):
        edges = []
        for (u, v) in pairs:
            edges.append((u, v))
            edges.append((v, u))
        self.edges = edges
        count = len(edges)
        self.inverse_of = np.arange(count) ^ 1
        self.pair_id = np.arange(count) // 2
        self.edge_id = {e: i for i, e in enumerate(edges)}

    def __len__(self):
        return len(self.edges)


class GraphMatrices:
    """Immutable bundle of the matrices built from one weight matrix."""

    def __init__(self, A_sym, index, S, T, Q, J, L, B, D):
        self.A = A_sym
        self.A_dense = A_sym.to_dense()
        self.index = index
        self.n = A_sym.n
        self.m = A_sym.edge_count()
        self.S = S
        self.T = T
        self.Q = Q
        self.J = J
        self.L = L
        self.B = B
        self.D = D


def build(A):
    """Build the full oriented-edge bundle from a symmetric weight matrix.

    Args:
      A: SymWeightedMatrix or dense symmetric zero-diagonal array.

    Returns:
      GraphMatrices. Edge ordering is canonical so output is deterministic.
    """
    A = linalg.as_sym_matrix(A)
    n = A.n
    pairs = sorted(A.entries.keys())
    index = OrientedEdgeIndex(pairs)
    tm = len(index)
    m = tm // 2

    S = np.zeros((n, tm))
    T = np.zeros((n, tm))
    for i, (u, v) in enumerate(index.edges):
        w = A.entries[(u, v) if u < v else (v, u)]
        root = np.sqrt(abs(w))
        sign = 1.0 if w > 0 else -1.0
        S[u, i] = sign * root if u < v else root
        T[v, i] = sign * root if v < u else root

    Q = np.diag([abs(A.entries[p]) for p in pairs])
    J = np.zeros((tm, tm))
    L = np.zeros((tm, tm))
    ids = np.arange(tm)
    J[ids, index.inverse_of] = 1.0
    L[ids, index.inverse_of] = np.repeat(
        [abs(A.entries[p]) for p in pairs], 2)
    D = np.diag(A.degrees())

    # B + L = T^t S holds exactly entry by entry (each entry is a single
    # product), so B is that product with the backtracking entries removed.
    B = T.T @ S
    B[ids, index.inverse_of] = 0.0

    return GraphMatrices(A, index, S, T, Q, J, L, B, D)


def ihara_bass_residual(A, u, matrices=None):
    """Relative residual of the edge/vertex determinant identity at u.

    Evaluates |LHS - RHS| / max(1, |RHS|) where
      LHS = det(Id_2m - u(B + L - J))
      RHS = (1 - u^2)^(m-n) * det(Id_n - uA + u^2 D - u^2 Id_n).

    Args:
      A: SymWeightedMatrix or dense array.
      u: real scalar with |u| != 1.
      matrices: optional prebuilt GraphMatrices for A (avoids rebuilding when
        sweeping many u values).
    """
    u = float(u)
    if abs(u) == 1.0:
        raise ValueError("identity factor singular at u = +-1")
    G = matrices if matrices is not None else build(A)
    n, m = G.n, G.m
    tm = 2 * m
    lhs = linalg.det_shift(np.eye(tm) - u * (G.B + G.L - G.J))
    vertex = (np.eye(n) - u * G.A_dense
              + (u * u) * G.D - (u * u) * np.eye(n))
    rhs = (1.0 - u * u) ** (m - n) * linalg.det_shift(vertex)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def extend_B(G, n):
    """Embed B into the full 2n^2 x 2n^2 ordered-pair index space.

    Ordered pairs (u, v), u != v, are slotted at 2*(min*n + max) + orient
    with orient 0 for u < v and 1 for u > v; this preserves the canonical
    edge order, so the rows/columns of the stored oriented edges form a
    principal submatrix equal to B. All other entries are zero, hence the
    nonzero spectrum is unchanged.
    """
    if n != G.n:
        raise ValueError(f"bundle was built for n={G.n}, got n={n}")
    full = 2 * n * n
    out = np.zeros((full, full))
    slots = np.array([_pair_slot(u, v, n) for (u, v) in G.index.edges],
                     dtype=int)
    if slots.size:
        out[np.ix_(slots, slots)] = G.B
    return out


def _pair_slot(u, v, n):
    lo, hi = (u, v) if u < v else (v, u)
    return 2 * (lo * n + hi) + (0 if u < v else 1)


def residual_sample_points(seed=0, extra=10):
    """Sample points for identity sweeps: the fixed grid +-0.05, +-0.15, ...,
    +-0.85 plus `extra` seeded uniform draws from (-0.9, 0.9)."""
    grid = []
    for i in range(9):
        val = 0.05 + 0.1 * i
        grid.extend([val, -val])
    rng = np.random.default_rng(seed)
    samples = rng.uniform(-0.9, 0.9, size=extra)
    return grid + [float(s) for s in samples]

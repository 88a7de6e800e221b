"""Walk combinatorics backing the spectral bounds: non-backtracking walk
enumeration, walk-sum identities for powers and traces of the oriented-edge
operator, canonical-walk censuses with tangle filters, and the hyper-walk
condition checkers used for flattened tensor powers.

All enumeration here is exhaustive and desk-scale by design; feasibility
caps reject inputs whose walk counts would explode, and a hard cap on
explored states backstops the estimates.
"""

import functools
import math
from collections import Counter

import numpy as np

from . import certify
from . import linalg
from . import nonbacktracking

ENUM_CAP = 10 ** 7
CENSUS_MAX_V = 6
CENSUS_MAX_EDGES = 8
TRACE_MAX_N = 5
TRACE_MAX_Z = 3
TRACE_MAX_Q = 2


class Walk:
    """A walk given by its vertex sequence; steps must move."""

    def __init__(self, vertices):
        vertices = tuple(int(v) for v in vertices)
        if len(vertices) < 2:
            raise ValueError("a walk needs at least one edge")
        for i in range(len(vertices) - 1):
            if vertices[i] == vertices[i + 1]:
                raise ValueError(
                    f"step {i} does not move (vertex {vertices[i]} repeats)")
        self.vertices = vertices

    @property
    def z(self):
        """Number of edges."""
        return len(self.vertices) - 1

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def is_nonbacktracking(self):
        vs = self.vertices
        return all(vs[i] != vs[i + 2] for i in range(len(vs) - 2))

    def __eq__(self, other):
        return isinstance(other, Walk) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"Walk{self.vertices}"


class BlockWalk:
    """2q non-backtracking blocks of equal length, consecutive blocks
    joined by reversing the previous block's last edge, cyclically."""

    def __init__(self, blocks):
        blocks = [b if isinstance(b, Walk) else Walk(b) for b in blocks]
        if len(blocks) < 2 or len(blocks) % 2 != 0:
            raise ValueError(
                f"need an even number of blocks, at least two, "
                f"got {len(blocks)}")
        z = blocks[0].z
        for i, blk in enumerate(blocks):
            if blk.z != z:
                raise ValueError(
                    f"block {i} has {blk.z} edges, expected {z}")
            if not blk.is_nonbacktracking():
                raise ValueError(f"block {i} backtracks")
        for i in range(len(blocks)):
            last = blocks[i].edges()[-1]
            first = blocks[(i + 1) % len(blocks)].edges()[0]
            if first != (last[1], last[0]):
                raise ValueError(
                    f"block {(i + 1) % len(blocks)} must start with the "
                    f"reverse of block {i}'s last edge")
        self.blocks = blocks
        self.z = z

    @property
    def q(self):
        return len(self.blocks) // 2

    def vertex_sequence(self):
        return [v for blk in self.blocks for v in blk.vertices]

    def edge_multiplicities(self):
        counts = Counter()
        for blk in self.blocks:
            for (u, v) in blk.edges():
                counts[(min(u, v), max(u, v))] += 1
        return counts


def is_tangle_free(W, t):
    """Whether the walk's graph has cycle excess at most t, that is,
    #vertices >= #distinct undirected edges - t + 1. For a block walk the
    test is applied to every block separately."""
    if isinstance(W, BlockWalk):
        return all(is_tangle_free(b, t) for b in W.blocks)
    verts = set(W.vertices)
    edges = {(min(u, v), max(u, v)) for u, v in W.edges()}
    return len(verts) >= len(edges) - t + 1


def is_canonical(W):
    """Whether vertices are labelled 0, 1, 2, ... in order of first visit."""
    seq = W.vertex_sequence() if isinstance(W, BlockWalk) else W.vertices
    order = []
    seen = set()
    for v in seq:
        if v not in seen:
            seen.add(v)
            order.append(v)
    return order == list(range(len(order)))


def _neighbors(dense):
    return [np.flatnonzero(dense[u]).tolist() for u in range(dense.shape[0])]


def _check_edge(dense, e, name):
    u, v = int(e[0]), int(e[1])
    n = dense.shape[0]
    if not (0 <= u < n and 0 <= v < n) or dense[u, v] == 0.0:
        raise ValueError(f"{name}={(u, v)} is not an oriented edge")
    return u, v


def enumerate_nbw(A, e, f, z, cap=ENUM_CAP):
    """All non-backtracking walks with z edges from oriented edge e to
    oriented edge f. Raises when more than cap states are explored."""
    dense = linalg.as_dense(A)
    e = _check_edge(dense, e, "e")
    f = _check_edge(dense, f, "f")
    z = int(z)
    if z < 1:
        raise ValueError(f"walk length must be at least one edge, got {z}")
    neigh = _neighbors(dense)
    out = []
    explored = 0
    path = [e[0], e[1]]

    def extend():
        nonlocal explored
        edges_taken = len(path) - 1
        if edges_taken == z:
            if (path[-2], path[-1]) == f:
                out.append(Walk(path))
            return
        for w in neigh[path[-1]]:
            if w == path[-2]:
                continue
            explored += 1
            if explored > cap:
                raise ValueError(
                    f"enumeration cap exceeded: more than {cap} partial "
                    f"walks explored")
            path.append(w)
            extend()
            path.pop()

    extend()
    return out


def _signed_root(dense, edge):
    u, v = edge
    w = dense[u, v]
    sign = -1.0 if (w < 0 and u < v) else 1.0
    return sign


def nbw_power_entry(A, e, f, z):
    """Walk-sum expansion of entry (e, f) of the (z-1)-th power of the
    oriented-edge operator: over non-backtracking walks of z edges from e
    to f, sum

        sgn(first edge reversed) * sgn(last edge)
          * sqrt(|w(first)| |w(last)|) * prod of interior edge weights,

    where sgn(u, v) is the weight's sign when u < v and +1 otherwise.
    """
    z = int(z)
    if z < 2:
        raise ValueError(f"walk length must be at least two edges, got {z}")
    dense = linalg.as_dense(A)
    total = 0.0
    for W in enumerate_nbw(A, e, f, z):
        edges = W.edges()
        first = edges[0]
        last = edges[-1]
        term = _signed_root(dense, (first[1], first[0]))
        term *= _signed_root(dense, last)
        term *= math.sqrt(abs(dense[first[0], first[1]])
                          * abs(dense[last[0], last[1]]))
        for (u, v) in edges[1:-1]:
            term *= dense[u, v]
        total += term
    return total


def trace_walk_sum(A, q, z, max_n=TRACE_MAX_N, max_z=TRACE_MAX_Z,
                   max_q=TRACE_MAX_Q, cap=ENUM_CAP):
    """Walk-sum expansion of Tr[(M M^T)^q] for M the (z-1)-th power of the
    oriented-edge operator: over block walks of 2q non-backtracking blocks
    of z edges, wrap-linked cyclically, sum the product over blocks of
    sqrt(|w(first)| |w(last)|) times the interior edge weights. The sign
    factors cancel in pairs at the junctions, so none appear."""
    q = int(q)
    z = int(z)
    if q < 1:
        raise ValueError(f"need at least one block pair, got q={q}")
    if z < 2:
        raise ValueError(f"blocks need at least two edges, got z={z}")
    dense = linalg.as_dense(A)
    n = dense.shape[0]
    if n > max_n or z > max_z or q > max_q:
        raise ValueError(
            f"enumeration infeasible: (n={n}, z={z}, q={q}) exceeds caps "
            f"(n<={max_n}, z<={max_z}, q<={max_q})")
    neigh = _neighbors(dense)
    blocks = 2 * q
    explored = 0
    total = 0.0

    def block_weight(vs):
        w = math.sqrt(abs(dense[vs[0], vs[1]]) * abs(dense[vs[-2], vs[-1]]))
        for i in range(1, len(vs) - 2):
            w *= dense[vs[i], vs[i + 1]]
        return w

    def fill_block(bi, cur, weight, first_edge):
        nonlocal explored, total
        if len(cur) == z + 1:
            w = weight * block_weight(cur)
            if bi + 1 == blocks:
                if (cur[-2], cur[-1]) == (first_edge[1], first_edge[0]):
                    total += w
                return
            fill_block(bi + 1, [cur[-1], cur[-2]], w, first_edge)
            return
        for nxt in neigh[cur[-1]]:
            if len(cur) >= 2 and nxt == cur[-2]:
                continue
            explored += 1
            if explored > cap:
                raise ValueError(
                    f"enumeration cap exceeded: more than {cap} partial "
                    f"walks explored")
            cur.append(nxt)
            fill_block(bi, cur, weight, first_edge)
            cur.pop()

    for u in range(n):
        for v in neigh[u]:
            fill_block(0, [u, v], 1.0, (u, v))
    return total


@functools.lru_cache(maxsize=None)
def _canonical_census(q, z, v_cap, cap):
    """Census of canonical interesting block walks with 2q blocks of z
    edges on at most v_cap vertices: a dict mapping (vertex count, distinct
    undirected edge count, max per-block cycle excess) to the number of
    walks."""
    total_edges = 2 * q * z
    max_distinct = q * z
    results = {}
    edge_count = Counter()
    taus = []
    state = {"used": 2, "lone": 0, "taken": 0, "explored": 0}

    def push_edge(a, b):
        key = (a, b) if a < b else (b, a)
        c = edge_count[key]
        edge_count[key] = c + 1
        state["taken"] += 1
        if c == 0:
            state["lone"] += 1
        elif c == 1:
            state["lone"] -= 1

    def pop_edge(a, b):
        key = (a, b) if a < b else (b, a)
        c = edge_count[key]
        if c == 1:
            del edge_count[key]
            state["lone"] -= 1
        else:
            edge_count[key] = c - 1
            if c == 2:
                state["lone"] += 1
        state["taken"] -= 1

    def block_tau(vs):
        verts = set(vs)
        edges = {(min(a, b), max(a, b)) for a, b in zip(vs, vs[1:])}
        return len(edges) - len(verts) + 1

    def fill(bi, cur):
        if len(edge_count) > max_distinct:
            return
        if state["lone"] > total_edges - state["taken"]:
            return
        if len(cur) == z + 1:
            taus.append(block_tau(cur))
            if bi + 1 == 2 * q:
                if (cur[-2], cur[-1]) == (1, 0) and state["lone"] == 0:
                    key = (state["used"], len(edge_count), max(taus))
                    results[key] = results.get(key, 0) + 1
            else:
                push_edge(cur[-1], cur[-2])
                fill(bi + 1, [cur[-1], cur[-2]])
                pop_edge(cur[-1], cur[-2])
            taus.pop()
            return
        candidates = list(range(state["used"]))
        if state["used"] < v_cap:
            candidates.append(state["used"])
        for nxt in candidates:
            if nxt == cur[-1] or (len(cur) >= 2 and nxt == cur[-2]):
                continue
            state["explored"] += 1
            if state["explored"] > cap:
                raise ValueError(
                    f"census infeasible: enumeration cap {cap} exceeded")
            fresh = nxt == state["used"]
            if fresh:
                state["used"] += 1
            push_edge(cur[-1], nxt)
            cur.append(nxt)
            fill(bi, cur)
            cur.pop()
            pop_edge(cur[-1], nxt)
            if fresh:
                state["used"] -= 1

    if v_cap >= 2:
        push_edge(0, 1)
        fill(0, [0, 1])
        pop_edge(0, 1)
    return results


def count_canonical(q, z, v, e, t, cap=ENUM_CAP):
    """Number of canonical interesting block walks (2q blocks of z edges,
    wrap-linked, every undirected edge traversed at least twice) with
    exactly v vertices, exactly e distinct undirected edges, and per-block
    cycle excess at most t."""
    q = int(q)
    z = int(z)
    v = int(v)
    e = int(e)
    t = int(t)
    if q < 1 or z < 1:
        raise ValueError(f"need q >= 1 and z >= 1, got q={q}, z={z}")
    if v > CENSUS_MAX_V or q * z > CENSUS_MAX_EDGES:
        raise ValueError(
            f"census infeasible: (v={v}, q*z={q * z}) exceeds caps "
            f"(v<={CENSUS_MAX_V}, q*z<={CENSUS_MAX_EDGES})")
    if v < 2 or e < v - 1:
        return 0
    census = _canonical_census(q, z, v, cap)
    return sum(count for (vv, ee, tau), count in census.items()
               if vv == v and ee == e and tau <= t)


def canonical_count_bound(q, z, v, e, t):
    """Closed-form ceiling z^(4tq) (2zq)^(6tq(e-v+1)) on the canonical
    interesting tangle-free walk count with the given parameters. Values
    beyond float range saturate to inf (a ceiling is still a ceiling)."""
    try:
        return (float(z) ** (4 * t * q)
                * float(2 * z * q) ** (6 * t * q * (e - v + 1)))
    except OverflowError:
        return float("inf")


def sample_gamma_graph(n, d, seed):
    """Erdos-Renyi signed graph: each pair an edge with probability d/n,
    weight +-1 equiprobable, from one uniform per pair. d = n gives the
    complete graph."""
    n = int(n)
    d = float(d)
    if not (0.0 < d <= n):
        raise ValueError(f"average degree d must be in (0, n], got {d}")
    rng = np.random.default_rng(seed)
    p = d / n
    iu, iv = np.triu_indices(n, 1)
    draws = rng.random(iu.shape[0])
    hits = np.flatnonzero(draws < p)
    entries = {}
    for idx in hits:
        w = 1.0 if draws[idx] < p / 2.0 else -1.0
        entries[(int(iu[idx]), int(iv[idx]))] = w
    return linalg.SymWeightedMatrix(n, entries)


def rho_B_experiment(n, d, seeds, z=16):
    """Spectral radius of the oriented-edge operator on signed sparse
    graphs, against sqrt(d) and against the z-th-root power bound.

    For +-1 weights the operator's spectrum is the quadratic-pencil root
    set padded with +-1 when edges outnumber vertices, so the radius comes
    from a 2n x 2n eigensolve; tiny graphs with fewer edges than vertices
    fall back to the explicit operator. Returns a report with one record
    per seed and the median of rho / sqrt(d)."""
    records = []
    for seed in seeds:
        A = sample_gamma_graph(n, d, seed)
        dense = A.to_dense()
        degs = A.degrees()
        m = A.edge_count()
        if m >= A.n:
            roots = np.linalg.eigvals(certify.companion_matrix(dense, degs))
            rho = float(np.max(np.abs(roots)))
            if m > A.n:
                rho = max(rho, 1.0)
        elif m > 0:
            G = nonbacktracking.build(A)
            rho = float(np.max(np.abs(np.linalg.eigvals(G.B))))
        else:
            rho = 0.0
        if m > 0:
            gel = certify._companion_power_bound(dense, degs, z)
        else:
            gel = 0.0
        records.append({
            "n": n,
            "d": d,
            "seed": seed,
            "rho_B": rho,
            "gelfand_z": gel,
            "ratio": rho / math.sqrt(d),
        })
    ratios = [r["ratio"] for r in records]
    return {
        "n": n,
        "d": d,
        "z": z,
        "records": records,
        "median_ratio": float(np.median(ratios)) if ratios else None,
    }


class HyperWalk:
    """Block walk over flattened tensor indices: per block, z+1 left
    half-tuples (alphas), z+1 right half-tuples (betas), and z middle
    indices (ells), with consecutive blocks joined by stepping back along
    both half-tuple tracks, cyclically."""

    def __init__(self, alphas, betas, ells):
        alphas = [[tuple(int(i) for i in t) for t in blk] for blk in alphas]
        betas = [[tuple(int(i) for i in t) for t in blk] for blk in betas]
        ells = [[int(l) for l in blk] for blk in ells]
        blocks = len(alphas)
        if blocks < 2 or blocks % 2 != 0:
            raise ValueError(
                f"need an even number of blocks, at least two, got {blocks}")
        if len(betas) != blocks or len(ells) != blocks:
            raise ValueError("malformed sequence: track lengths differ")
        z = len(ells[0])
        if z < 1:
            raise ValueError("blocks need at least one step")
        half = len(alphas[0][0]) if alphas[0] else 0
        if half < 1:
            raise ValueError("half-tuples must have positive arity")
        for i in range(blocks):
            if len(ells[i]) != z:
                raise ValueError(
                    f"malformed sequence: block {i} has {len(ells[i])} "
                    f"middle indices, expected {z}")
            if len(alphas[i]) != z + 1 or len(betas[i]) != z + 1:
                raise ValueError(
                    f"malformed sequence: block {i} needs {z + 1} "
                    f"half-tuples per track")
            for t in alphas[i] + betas[i]:
                if len(t) != half:
                    raise ValueError(
                        f"malformed sequence: half-tuple {t} in block {i} "
                        f"has arity {len(t)}, expected {half}")
        for i in range(blocks):
            j = (i + 1) % blocks
            if alphas[j][0] != alphas[i][z] or alphas[j][1] != alphas[i][z - 1]:
                raise ValueError(
                    f"malformed sequence: block {j} does not step back "
                    f"along the left track of block {i}")
            if betas[j][0] != betas[i][z] or betas[j][1] != betas[i][z - 1]:
                raise ValueError(
                    f"malformed sequence: block {j} does not step back "
                    f"along the right track of block {i}")
        self.alphas = alphas
        self.betas = betas
        self.ells = ells
        self.z = z
        self.half = half
        self.k = 2 * half + 1

    @property
    def q(self):
        return len(self.alphas) // 2

    def reveals(self):
        """Reveal sequence in traversal order: (block, step, middle index,
        next left half-tuple, next right half-tuple)."""
        out = []
        for i in range(len(self.alphas)):
            for j in range(self.z):
                out.append((i, j, self.ells[i][j],
                            self.alphas[i][j + 1], self.betas[i][j + 1]))
        return out

    def hyper_edge(self, i, j, side):
        """Sorted index k-set of the step-j hyper-edge of block i on the
        given track ("alpha" or "beta")."""
        if side == "alpha":
            track = self.alphas
        elif side == "beta":
            track = self.betas
        else:
            raise ValueError(f"side must be 'alpha' or 'beta', got {side!r}")
        parts = set(track[i][j]) | {self.ells[i][j]} | set(track[i][j + 1])
        return tuple(sorted(parts))


def classify_reveals(Z):
    """Classify each reveal of a hyper-walk by how many fresh variable
    indices it exposes and how many fresh hyper-edges, and collect the
    per-block tangle sets (reveals that add an edge but no index).

    Fresh indices are counted against all indices seen so far, seeded with
    the first block's initial half-tuples. Fresh edges are counted per
    track slot against the accumulated hyper-edge set, left track first,
    with the left edge inserted before the right is tested."""
    reveals = []
    seen_idx = set(Z.alphas[0][0]) | set(Z.betas[0][0])
    seen_edges = set()
    index_classes = Counter()
    edge_classes = Counter()
    tangles = [[] for _ in range(len(Z.alphas))]
    for (i, j, ell, alpha_next, beta_next) in Z.reveals():
        fresh = set()
        for idx in (ell,) + alpha_next + beta_next:
            if idx not in seen_idx:
                fresh.add(idx)
        seen_idx |= fresh
        new_edges = 0
        for side in ("alpha", "beta"):
            edge = Z.hyper_edge(i, j, side)
            if edge not in seen_edges:
                new_edges += 1
                seen_edges.add(edge)
        s = len(fresh)
        index_classes[s] += 1
        edge_classes[new_edges] += 1
        if new_edges >= 1 and s == 0:
            tangles[i].append((i, j))
        reveals.append({
            "block": i,
            "step": j,
            "new_indices": s,
            "new_edges": new_edges,
        })
    return {
        "reveals": reveals,
        "index_classes": dict(index_classes),
        "edge_classes": dict(edge_classes),
        "tangles": tangles,
        "tangle_sizes": [len(ts) for ts in tangles],
    }


def is_hyper_tangle_free(Z, t):
    """Whether every block's tangle set has at most t reveals."""
    report = classify_reveals(Z)
    return all(size <= int(t) for size in report["tangle_sizes"])


def satisfies_conditions(Z, starred=False):
    """Check the combinatorial side conditions of a hyper-walk.

    Plain conditions: every step's full index tuple is repeat-free on each
    track, the two tracks' step index multisets share at most (k-3)/2
    entries, and no step undoes the previous one on both tracks at once.
    Starred adds: consecutive blocks share their junction middle index
    (cyclically), and every hyper-edge traversed an odd number of times
    shares at least k-1 indices with some block-initial hyper-edge."""
    k = Z.k
    allow = (k - 3) // 2
    pre_ok = True
    nb_ok = True
    for i in range(len(Z.alphas)):
        for j in range(Z.z):
            left = Z.alphas[i][j] + Z.alphas[i][j + 1] + (Z.ells[i][j],)
            right = Z.betas[i][j] + Z.betas[i][j + 1] + (Z.ells[i][j],)
            if len(set(left)) != k or len(set(right)) != k:
                pre_ok = False
            lcount = Counter(Z.alphas[i][j] + Z.alphas[i][j + 1])
            rcount = Counter(Z.betas[i][j] + Z.betas[i][j + 1])
            shared = sum((lcount & rcount).values())
            if shared > allow:
                pre_ok = False
        for j in range(Z.z - 1):
            if (Z.alphas[i][j] == Z.alphas[i][j + 2]
                    and Z.betas[i][j] == Z.betas[i][j + 2]):
                nb_ok = False
    out = {
        "preprocessing": pre_ok,
        "nonbacktracking": nb_ok,
        "block": True,
    }
    if starred:
        blocks = len(Z.alphas)
        ell_ok = all(
            Z.ells[i][Z.z - 1] == Z.ells[(i + 1) % blocks][0]
            for i in range(blocks))
        counts = Counter()
        for i in range(blocks):
            for j in range(Z.z):
                for side in ("alpha", "beta"):
                    counts[Z.hyper_edge(i, j, side)] += 1
        initial = {Z.hyper_edge(i, 0, side)
                   for i in range(blocks) for side in ("alpha", "beta")}
        odd_ok = True
        for edge, c in counts.items():
            if c % 2 == 0:
                continue
            if not any(len(set(edge) & set(e0)) >= k - 1 for e0 in initial):
                odd_ok = False
        out["ell_link"] = ell_ok
        out["odd_multiplicity"] = odd_ok
    out["all"] = all(v for key, v in out.items() if key != "all")
    return out

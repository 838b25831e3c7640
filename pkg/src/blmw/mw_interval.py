"""Multiwavelet representation of a saturation field on the unit interval.

A node ``(n, i)`` of the dyadic tree covers ``[i/2**n, (i+1)/2**n]`` and
carries a block of ``k`` scaling coefficients in the orthonormal basis

    phi_a(xi) = 2**(n/2) * sqrt(2a+1) * P_a(2 * (2**n * xi - i) - 1),  a < k,

with ``P_a`` the Legendre polynomials.  Wavelet functions are never formed;
the detail carried by a node is the part of its two children's blocks that
its own block does not reproduce, and by orthogonality its squared norm is
``|s_left|**2 + |s_right|**2 - |s_parent|**2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import DimensionMismatchError, DomainError, NonDyadicError

DEFAULT_ORDER = 8
QUADRATURE_POINTS = 8


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise NonDyadicError(f"expected a power of two, got {n}")
    return n.bit_length() - 1


def _basis_on_unit(k: int, y):
    """Orthonormal shifted Legendre basis on [0, 1] at local coordinates ``y``."""
    V = legendre.legvander(2.0 * np.asarray(y, dtype=float) - 1.0, k - 1)
    return V * np.sqrt(2.0 * np.arange(k) + 1.0)


@lru_cache(maxsize=16)
def two_scale_matrices(k: int):
    """Restriction matrices ``(H0, H1)`` of shape (k, k).

    ``s_parent = H0 @ s_left + H1 @ s_right``.  Entries are inner products
    of parent and child basis functions, integrated exactly with k-point
    Gauss-Legendre on each half.
    """
    x, w = legendre.leggauss(k)
    y = 0.5 * (x + 1.0)  # nodes on [0, 1]
    w = 0.5 * w
    mats = []
    for half in (0, 1):
        xi = 0.5 * (y + half)  # parent-local coordinate of the child nodes
        parent = _basis_on_unit(k, xi)
        child = np.sqrt(2.0) * _basis_on_unit(k, y)
        # integral over the child interval (length 1/2 of the parent)
        mats.append(0.5 * (parent * w[:, None]).T @ child)
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def basis_gram(k: int, n: int = 0, i: int = 0, points: int | None = None) -> np.ndarray:
    """Gram matrix of node ``(n, i)``'s basis under Gauss-Legendre quadrature on [0, 1]."""
    points = 2 * k if points is None else points
    x, w = legendre.leggauss(points)
    h = 2.0 ** -n
    xi = i * h + 0.5 * h * (x + 1.0)
    B = 2.0 ** (n / 2) * _basis_on_unit(k, xi / h - i)
    return (B * (0.5 * h * w)[:, None]).T @ B


@dataclass(frozen=True)
class MWTree:
    """Dyadic multiwavelet tree.

    ``scaling[n]`` has shape (2**n, k); rows of absent nodes are zero.
    ``present[n]`` and ``leaf[n]`` are boolean masks over the 2**n nodes of
    level ``n``.  ``length`` maps physical x to xi = x / length.
    """

    order: int
    scaling: tuple
    present: tuple
    leaf: tuple
    length: float = 1.0
    precision: float = 0.0
    pruned: int = 0

    @property
    def max_level(self) -> int:
        return len(self.scaling) - 1

    @property
    def nodes(self) -> dict:
        out = {}
        for n, (blocks, mask) in enumerate(zip(self.scaling, self.present)):
            for i in np.nonzero(mask)[0]:
                out[(n, int(i))] = blocks[i]
        return out

    @property
    def leaves(self) -> list:
        return [(n, int(i)) for n, m in enumerate(self.leaf) for i in np.nonzero(m)[0]]

    def node_detail_norms(self, n: int) -> np.ndarray:
        """Detail norm of every node at level ``n`` (zero for leaves and absent nodes)."""
        if n >= self.max_level:
            return np.zeros(2 ** n)
        # residual formed explicitly: differencing squared norms cancels badly
        H0, H1 = two_scale_matrices(self.order)
        kids = self.scaling[n + 1]
        parent = self.scaling[n]
        d = np.hstack([kids[0::2] - parent @ H0, kids[1::2] - parent @ H1])
        inner = self.present[n] & ~self.leaf[n]
        return np.where(inner, np.linalg.norm(d, axis=1), 0.0)


def decompose(fine: np.ndarray):
    """Two-scale transform from finest-level blocks to all coarser levels.

    Returns ``(scaling, details)``: ``scaling[n]`` of shape (2**n, k) and
    ``details[n]`` of shape (2**n, 2k), the child-space residual of each
    node at levels ``n < m``.
    """
    fine = np.asarray(fine, dtype=float)
    m = _log2_exact(fine.shape[0])
    k = fine.shape[1]
    H0, H1 = two_scale_matrices(k)
    scaling = [None] * (m + 1)
    details = [None] * m
    scaling[m] = fine
    for n in range(m - 1, -1, -1):
        kids = scaling[n + 1]
        left, right = kids[0::2], kids[1::2]
        parent = left @ H0.T + right @ H1.T
        scaling[n] = parent
        details[n] = np.hstack([left - parent @ H0, right - parent @ H1])
    return scaling, details


def recompose(root: np.ndarray, details):
    """Inverse of :func:`decompose`; returns the finest-level blocks."""
    H0, H1 = two_scale_matrices(root.shape[-1])
    k = root.shape[-1]
    cur = np.atleast_2d(np.asarray(root, dtype=float))
    for d in details:
        left = cur @ H0 + d[:, :k]
        right = cur @ H1 + d[:, k:]
        nxt = np.empty((2 * cur.shape[0], k))
        nxt[0::2], nxt[1::2] = left, right
        cur = nxt
    return cur


def _full_tree(scaling, order, length) -> MWTree:
    m = len(scaling) - 1
    present = tuple(np.ones(2 ** n, dtype=bool) for n in range(m + 1))
    leaf = tuple(np.full(2 ** n, n == m) for n in range(m + 1))
    return MWTree(order, tuple(scaling), present, leaf, length)


def project_cell_averages(state, grid, k: int = DEFAULT_ORDER, eps: float = 0.0) -> MWTree:
    """Embed cell averages as a piecewise-constant function and project it.

    On the uniform level log2(N) the projection is exact: only the degree-0
    coefficient of each leaf is nonzero.  Coarser levels follow from the
    two-scale transform; with ``eps > 0`` the tree is then compressed.
    """
    values = getattr(state, "averages", state)
    values = np.asarray(values, dtype=float)
    N = values.shape[0]
    if grid is not None and grid.cells != N:
        raise DimensionMismatchError(f"state has {N} cells, grid has {grid.cells}")
    if k < 1:
        raise ValueError("order must be >= 1")
    m = _log2_exact(N)
    fine = np.zeros((N, k))
    fine[:, 0] = values * 2.0 ** (-m / 2)
    scaling, _ = decompose(fine)
    tree = _full_tree(scaling, k, grid.length if grid is not None else 1.0)
    return compress(tree, eps) if eps > 0 else tree


def _leaf_index(tree: MWTree, xi: np.ndarray):
    """Level and index of the leaf containing each xi (right-closed at 1)."""
    level = np.zeros(xi.shape, dtype=int)
    index = np.zeros(xi.shape, dtype=int)
    active = ~tree.leaf[0][index]
    for n in range(1, tree.max_level + 1):
        if not np.any(active):
            break
        idx = np.minimum(np.floor(xi * 2 ** n).astype(int), 2 ** n - 1)
        level = np.where(active, n, level)
        index = np.where(active, idx, index)
        active = active & ~tree.leaf[n][idx]
    return level, index


def evaluate(tree: MWTree, xi):
    """Value of the represented function at normalized coordinates ``xi``.

    A point on an interior breakpoint takes the value of the right-hand
    leaf; ``xi = 1`` belongs to the last leaf.
    """
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    if np.any((xi < 0.0) | (xi > 1.0)) or not np.all(np.isfinite(xi)):
        raise DomainError("xi must lie in [0, 1]")
    level, index = _leaf_index(tree, xi)
    blocks = np.empty((xi.size, tree.order))
    for n in np.unique(level):
        sel = level == n
        blocks[sel] = tree.scaling[n][index[sel]]
    scale = 2.0 ** (level / 2.0)
    y = xi * 2.0 ** level - index
    out = scale * np.sum(blocks * _basis_on_unit(tree.order, y), axis=1)
    return float(out[0]) if scalar else out


def reconstruct_cell_averages(tree: MWTree, N: int, points: int = QUADRATURE_POINTS) -> np.ndarray:
    """Cell averages ``N * integral`` over ``[j/N, (j+1)/N]`` by Gauss-Legendre.

    Each cell is split at the leaf breakpoints inside it, so the rule is
    exact whenever the leaf polynomials have degree < 2*points.
    """
    _log2_exact(N)
    edges = [np.linspace(0.0, 1.0, N + 1)]
    for n, mask in enumerate(tree.leaf):
        idx = np.nonzero(mask)[0]
        edges.append(idx * 2.0 ** -n)
    breaks = np.unique(np.concatenate(edges + [[1.0]]))
    a, b = breaks[:-1], breaks[1:]
    x, w = legendre.leggauss(points)
    q = (a[:, None] + 0.5 * (b - a)[:, None] * (x + 1.0)).ravel()
    qw = (0.5 * (b - a)[:, None] * w).ravel()
    vals = evaluate(tree, q)
    cell = np.minimum(np.floor(0.5 * (a + b) * N).astype(int), N - 1)
    cell = np.repeat(cell, points)
    return N * np.bincount(cell, weights=qw * vals, minlength=N)


def detail_norms(tree: MWTree) -> np.ndarray:
    """Per-level sum of squared node detail norms, levels 0 .. max_level-1."""
    out = np.zeros(tree.max_level)
    for n in range(tree.max_level):
        out[n] = np.sum(tree.node_detail_norms(n) ** 2)
    return out


def subtree_detail_norms(tree: MWTree):
    """Root-sum-square of detail norms over each node's subtree, per level."""
    m = tree.max_level
    cum = [None] * (m + 1)
    cum[m] = np.zeros(2 ** m)
    for n in range(m - 1, -1, -1):
        own = tree.node_detail_norms(n)
        below = cum[n + 1][0::2] ** 2 + cum[n + 1][1::2] ** 2
        cum[n] = np.sqrt(own ** 2 + below)
    return cum


def compress(tree: MWTree, eps: float) -> MWTree:
    """Prune every subtree whose cumulative detail norm is at most ``eps``.

    The L2 error introduced equals the root-sum-square of the pruned
    cumulative norms, hence at most ``eps * sqrt(pruned)``.  ``eps == 0``
    disables truncation and returns the tree unchanged.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0:
        return tree
    cum = subtree_detail_norms(tree)
    m = tree.max_level
    present = [tree.present[0].copy()]
    leaf = []
    pruned = 0
    for n in range(m + 1):
        here = present[n]
        cut = here & ~tree.leaf[n] & (cum[n] <= eps)
        pruned += int(np.count_nonzero(cut & (cum[n] > 0)))
        is_leaf = here & (tree.leaf[n] | cut)
        leaf.append(is_leaf)
        if n < m:
            expand = here & ~is_leaf
            present.append(np.repeat(expand, 2))
    scaling = tuple(np.where(pres[:, None], s, 0.0) for s, pres in zip(tree.scaling, present))
    return MWTree(tree.order, scaling, tuple(present), tuple(leaf), tree.length,
                  precision=eps, pruned=tree.pruned + pruned)


def post_filter(fv, mw, theta: float, bounds):
    """Relaxed blend ``(1 - theta) * fv + theta * mw`` clipped to ``bounds``."""
    fv = np.asarray(fv, dtype=float)
    mw = np.asarray(mw, dtype=float)
    if fv.shape != mw.shape:
        raise DimensionMismatchError(f"shapes {fv.shape} and {mw.shape} differ")
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    lo, hi = bounds
    return np.clip((1.0 - theta) * fv + theta * mw, lo, hi)

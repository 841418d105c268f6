"""Finite qudit chains: embedding site operators, translations, supports.

Operators live on the full d^L tensor-product space. Dense ndarrays are
used up to a configurable cap; above it (or for very sparse content)
storage switches to scipy CSR. Embedding and translation are exact
(entry permutations and Kronecker placements, no float arithmetic beyond
copying), which several invariants rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import SizeCapError

DENSE_CAP = 4096          # largest d^L handled as dense ndarrays by default
SPARSE_DENSITY_CUTOFF = 0.05
_SVD_CUTOFF = 256         # spectral norms use full SVD below this dimension
_NORM_SEED = 1905         # fixed seed for the power-iteration start vector
_SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class ChainGeometry:
    """A finite chain of L qudits with open or periodic ends."""

    L: int
    d: int
    boundary: str = "open"

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"need at least one site, got L={self.L}")
        if self.d < 2:
            raise ValueError(f"site dimension must be >= 2, got d={self.d}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be open or periodic, got {self.boundary!r}")

    @property
    def dim(self) -> int:
        return self.d ** self.L

    def check_site(self, x: int):
        if not 0 <= x < self.L:
            raise ValueError(f"site {x} outside chain of length {self.L}")

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs; the wrap bond is included for periodic L > 2."""
        pairs = [(x, x + 1) for x in range(self.L - 1)]
        if self.boundary == "periodic" and self.L > 2:
            pairs.append((self.L - 1, 0))
        return pairs


@dataclass(frozen=True)
class LatticeOperator:
    """A chain operator with its support (sites where it acts nontrivially).

    Constructors (embed_at, embed_pair, model assembly) produce minimal
    supports. Algebraic combinations carry the union of supports, which
    may overestimate; ``minimized`` recomputes the true support.
    Instances are treated as immutable values.
    """

    matrix: object  # ndarray or scipy sparse matrix
    support: frozenset[int]
    geometry: ChainGeometry

    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        if self.is_sparse():
            if self.geometry.dim > DENSE_CAP:
                raise SizeCapError(
                    f"refusing to densify a {self.geometry.dim}-dimensional operator"
                )
            return np.asarray(self.matrix.todense())
        return self.matrix

    def dag(self) -> "LatticeOperator":
        return LatticeOperator(self.matrix.conj().T, self.support, self.geometry)

    def __matmul__(self, other: "LatticeOperator") -> "LatticeOperator":
        _check_geometry(self, other)
        return LatticeOperator(self.matrix @ other.matrix,
                               self.support | other.support, self.geometry)

    def __add__(self, other: "LatticeOperator") -> "LatticeOperator":
        _check_geometry(self, other)
        return LatticeOperator(self.matrix + other.matrix,
                               self.support | other.support, self.geometry)

    def __sub__(self, other: "LatticeOperator") -> "LatticeOperator":
        _check_geometry(self, other)
        return LatticeOperator(self.matrix - other.matrix,
                               self.support | other.support, self.geometry)

    def __rmul__(self, scalar) -> "LatticeOperator":
        return LatticeOperator(scalar * self.matrix, self.support, self.geometry)

    def minimized(self, tol: float = _SUPPORT_TOL) -> "LatticeOperator":
        return LatticeOperator(self.matrix, estimate_support(self, tol), self.geometry)


def _check_geometry(a: LatticeOperator, b: LatticeOperator):
    if a.geometry != b.geometry:
        raise ValueError(f"geometry mismatch: {a.geometry} vs {b.geometry}")


def _want_sparse(geom: ChainGeometry, density: float) -> bool:
    if geom.dim > DENSE_CAP:
        return True
    return geom.dim >= 1024 and density < SPARSE_DENSITY_CUTOFF


def identity(geom: ChainGeometry) -> LatticeOperator:
    if geom.dim > DENSE_CAP:
        return LatticeOperator(sp.identity(geom.dim, dtype=complex, format="csr"),
                               frozenset(), geom)
    return LatticeOperator(np.eye(geom.dim, dtype=complex), frozenset(), geom)


def zero(geom: ChainGeometry) -> LatticeOperator:
    if geom.dim > DENSE_CAP:
        return LatticeOperator(sp.csr_matrix((geom.dim, geom.dim), dtype=complex),
                               frozenset(), geom)
    return LatticeOperator(np.zeros((geom.dim, geom.dim), dtype=complex), frozenset(), geom)


def _is_scalar_matrix(a: np.ndarray) -> bool:
    return np.array_equal(a, a[0, 0] * np.eye(a.shape[0]))


def embed_at(site_op: np.ndarray, x: int, geom: ChainGeometry) -> LatticeOperator:
    """Place a single-site operator at slot x, identity everywhere else."""
    geom.check_site(x)
    a = np.asarray(site_op, dtype=complex)
    if a.shape != (geom.d, geom.d):
        raise ValueError(f"site operator is {a.shape}, geometry wants ({geom.d}, {geom.d})")
    support = frozenset() if _is_scalar_matrix(a) else frozenset({x})
    left, right = geom.d ** x, geom.d ** (geom.L - 1 - x)
    density = np.count_nonzero(a) * left * right / geom.dim ** 2
    if _want_sparse(geom, density):
        m = sp.kron(sp.kron(sp.identity(left, dtype=complex), sp.csr_matrix(a)),
                    sp.identity(right, dtype=complex), format="csr")
        return LatticeOperator(m, support, geom)
    m = np.kron(np.kron(np.eye(left, dtype=complex), a), np.eye(right, dtype=complex))
    return LatticeOperator(m, support, geom)


def embed_pair(pair_op: np.ndarray, x: int, y: int, geom: ChainGeometry) -> LatticeOperator:
    """Place a two-site operator on sites (x, y); handles the wrap bond y < x."""
    geom.check_site(x)
    geom.check_site(y)
    if x == y:
        raise ValueError("pair embedding needs two distinct sites")
    d, L = geom.d, geom.L
    a = np.asarray(pair_op, dtype=complex)
    if a.shape != (d * d, d * d):
        raise ValueError(f"pair operator is {a.shape}, geometry wants ({d*d}, {d*d})")
    # Build on the reordered chain (x, y, rest...) then permute slots into place.
    rest = [s for s in range(L) if s not in (x, y)]
    order = [x, y] + rest
    full = np.kron(a, np.eye(d ** (L - 2), dtype=complex))
    tensor = full.reshape((d,) * (2 * L))
    # Axis i of `tensor` belongs to chain site order[i]; invert the placement.
    slot_of_site = {site: slot for slot, site in enumerate(order)}
    perm = [slot_of_site[s] for s in range(L)]
    tensor = tensor.transpose(perm + [p + L for p in perm])
    m = tensor.reshape(geom.dim, geom.dim)
    support = frozenset({x, y})
    density = np.count_nonzero(a) * d ** (L - 2) / geom.dim ** 2
    if _want_sparse(geom, density):
        return LatticeOperator(sp.csr_matrix(m), support, geom)
    return LatticeOperator(m, support, geom)


def _site_permutation(geom: ChainGeometry, y: int) -> np.ndarray:
    """Basis-index permutation realizing the slot map site -> site + y (mod L)."""
    d, L = geom.d, geom.L
    idx = np.arange(geom.dim)
    digits = np.empty((L, geom.dim), dtype=np.int64)
    rem = idx.copy()
    for slot in range(L - 1, -1, -1):
        digits[slot] = rem % d
        rem //= d
    out = np.zeros(geom.dim, dtype=np.int64)
    for slot in range(L):
        out = out * d + digits[(slot - y) % L]
    return out


def shift(op: LatticeOperator, y: int) -> LatticeOperator:
    """Translate an operator by y sites.

    Exact: only entries are permuted. On open chains the translated support
    must stay inside the chain.
    """
    geom = op.geometry
    if y % geom.L == 0 and geom.boundary == "periodic":
        return op
    if geom.boundary == "open":
        moved = {s + y for s in op.support}
        if any(not 0 <= s < geom.L for s in moved):
            raise ValueError(f"shift by {y} pushes support {sorted(op.support)} off the chain")
        new_support = frozenset(moved)
    else:
        new_support = frozenset((s + y) % geom.L for s in op.support)
    perm = _site_permutation(geom, y)
    if op.is_sparse():
        coo = op.matrix.tocoo()
        m = sp.csr_matrix((coo.data, (perm[coo.row], perm[coo.col])),
                          shape=op.matrix.shape)
        return LatticeOperator(m, new_support, geom)
    m = np.zeros_like(op.matrix)
    m[np.ix_(perm, perm)] = op.matrix
    return LatticeOperator(m, new_support, geom)


def partial_trace_site(matrix, x: int, geom: ChainGeometry):
    """Trace out site x, returning a d^(L-1) matrix on the remaining sites."""
    d, L = geom.d, geom.L
    pre, post = d ** x, d ** (L - 1 - x)
    if sp.issparse(matrix):
        coo = matrix.tocoo()
        r_pre, r_rem = np.divmod(coo.row, d * post)
        r_s, r_post = np.divmod(r_rem, post)
        c_pre, c_rem = np.divmod(coo.col, d * post)
        c_s, c_post = np.divmod(c_rem, post)
        keep = r_s == c_s
        rows = r_pre[keep] * post + r_post[keep]
        cols = c_pre[keep] * post + c_post[keep]
        n = pre * post
        return sp.csr_matrix((coo.data[keep], (rows, cols)), shape=(n, n))
    t = matrix.reshape(pre, d, post, pre, d, post)
    return np.einsum("iajkal->ijkl", t).reshape(pre * post, pre * post)


def expand_site(matrix, x: int, geom: ChainGeometry):
    """Tensor a d^(L-1) rest-operator with the identity at slot x."""
    d, L = geom.d, geom.L
    pre, post = d ** x, d ** (L - 1 - x)
    if sp.issparse(matrix):
        coo = matrix.tocoo()
        r_pre, r_post = np.divmod(coo.row, post)
        c_pre, c_post = np.divmod(coo.col, post)
        rows, cols, data = [], [], []
        for s in range(d):
            rows.append((r_pre * d + s) * post + r_post)
            cols.append((c_pre * d + s) * post + c_post)
            data.append(coo.data)
        return sp.csr_matrix((np.concatenate(data),
                              (np.concatenate(rows), np.concatenate(cols))),
                             shape=(geom.dim, geom.dim))
    t = matrix.reshape(pre, post, pre, post)
    out = np.zeros((pre, d, post, pre, d, post), dtype=complex)
    for s in range(d):
        out[:, s, :, :, s, :] = t
    return out.reshape(geom.dim, geom.dim)


def average_out_site(matrix, x: int, geom: ChainGeometry):
    """Conditional expectation at site x: A -> 1_x (x) tr_x(A)/d."""
    return expand_site(partial_trace_site(matrix, x, geom), x, geom) / geom.d


def site_action_residual(op: LatticeOperator, x: int) -> float:
    """Normalized HS distance between the operator and its site-x average."""
    geom = op.geometry
    diff = op.matrix - average_out_site(op.matrix, x, geom)
    if sp.issparse(diff):
        sq = abs((diff.multiply(diff.conj())).sum())
    else:
        sq = float(np.vdot(diff, diff).real)
    return float(np.sqrt(sq / geom.dim))


def estimate_support(op: LatticeOperator, tol: float = _SUPPORT_TOL) -> frozenset[int]:
    """Sites whose removal changes the operator by more than tol in HS norm."""
    return frozenset(x for x in range(op.geometry.L)
                     if site_action_residual(op, x) > tol)


def hs_inner(a: LatticeOperator, b: LatticeOperator) -> complex:
    """Trace-normalized Hilbert-Schmidt pairing tr(a^dag b)/d^L."""
    _check_geometry(a, b)
    if a.is_sparse() or b.is_sparse():
        prod = sp.csr_matrix(a.matrix).conj().multiply(sp.csr_matrix(b.matrix))
        return complex(prod.sum()) / a.geometry.dim
    return complex(np.vdot(a.matrix, b.matrix)) / a.geometry.dim


def hs_norm(a: LatticeOperator) -> float:
    return float(np.sqrt(max(hs_inner(a, a).real, 0.0)))


def commutator(a: LatticeOperator, b: LatticeOperator) -> LatticeOperator:
    return a @ b - b @ a


def spectral_norm(matrix, tol: float = 1e-10, seed: int = _NORM_SEED) -> float:
    """Largest singular value; exact SVD for small dense, else power iteration."""
    n = matrix.shape[0]
    if not sp.issparse(matrix) and n < _SVD_CUTOFF:
        return float(np.linalg.norm(np.asarray(matrix), 2))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    mh = matrix.conj().T
    est = 0.0
    for _ in range(10000):
        w = mh @ (matrix @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        if abs(nw - est) <= tol * max(nw, 1.0):
            return float(np.sqrt(nw))
        est, v = nw, v_new
    return float(np.sqrt(est))


def commutator_norm(a: LatticeOperator, b: LatticeOperator) -> float:
    """Spectral norm of [a, b]; exactly zero for disjoint supports."""
    _check_geometry(a, b)
    if not (a.support & b.support):
        return 0.0
    return spectral_norm(commutator(a, b).matrix)

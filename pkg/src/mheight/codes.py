"""Generator matrices for the geometric analog code families.

A code here is the row space of a real ``k x n`` generator matrix ``G``:
codewords are ``c = u @ G`` for information vectors ``u``.  Three built-in
families are provided:

* ``dual_polygonal(n)`` -- k=2, columns are unit vectors at angles
  ``pi*j/n`` spread evenly over a half circle;
* ``dual_icosahedral()`` -- k=3, columns are the six vertex axes of the
  regular icosahedron;
* ``dual_dodecahedral()`` -- k=3, columns are the ten vertex axes of the
  regular dodecahedron.

Polyhedral columns are kept at their natural (uniform) norms rather than
being rescaled to unit length; m-height ratios are invariant to a global
column scaling, so nothing downstream depends on the choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameterError

#: Golden ratio, evaluated at full working precision.
PHI = (1.0 + math.sqrt(5.0)) / 2.0

DUAL_POLYGONAL = "dual-polygonal"
DUAL_ICOSAHEDRAL = "dual-icosahedral"
DUAL_DODECAHEDRAL = "dual-dodecahedral"
CUSTOM = "custom"

_KNOWN_KINDS = (DUAL_POLYGONAL, DUAL_ICOSAHEDRAL, DUAL_DODECAHEDRAL, CUSTOM)

#: Determinant threshold for rank decisions, relative to the product of the
#: participating column norms.
RANK_TOL = 1e-9


@dataclass(frozen=True)
class Family:
    """Tag identifying which construction produced a generator matrix.

    ``n`` is the code length for the polygonal family and ``None`` for the
    other kinds.
    """

    kind: str
    n: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KNOWN_KINDS:
            raise InvalidParameterError(f"unknown family kind {self.kind!r}")
        if self.kind == DUAL_POLYGONAL:
            if self.n is None or self.n < 2:
                raise InvalidParameterError("polygonal family needs n >= 2")

    @property
    def label(self) -> str:
        return self.kind

    def __str__(self) -> str:
        if self.kind == DUAL_POLYGONAL:
            return f"{self.kind}(n={self.n})"
        return self.kind


class GeneratorMatrix:
    """Immutable real ``k x n`` generator matrix with tagged origin.

    Columns are the per-coordinate weight vectors ``g_j``; encoding an
    information vector ``u`` produces the codeword with entries ``u . g_j``.
    """

    __slots__ = ("_matrix", "_family")

    def __init__(self, matrix: np.ndarray | Sequence[Sequence[float]],
                 family: Family) -> None:
        mat = np.array(matrix, dtype=float)
        if mat.ndim != 2:
            raise InvalidParameterError("generator matrix must be 2-D")
        k, n = mat.shape
        if k < 1 or n < k:
            raise InvalidParameterError(
                f"generator matrix needs n >= k >= 1, got k={k}, n={n}")
        if not np.all(np.isfinite(mat)):
            raise InvalidParameterError("generator entries must be finite")
        mat.setflags(write=False)
        self._matrix = mat
        self._family = family

    @property
    def matrix(self) -> np.ndarray:
        """Read-only ``(k, n)`` array."""
        return self._matrix

    @property
    def family(self) -> Family:
        return self._family

    @property
    def k(self) -> int:
        return self._matrix.shape[0]

    @property
    def n(self) -> int:
        return self._matrix.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self._matrix[:, j]

    @property
    def columns(self) -> np.ndarray:
        """Read-only ``(n, k)`` view: row ``j`` is the column vector ``g_j``."""
        return self._matrix.T

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self._matrix, axis=0)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "family": self._family.label,
            "columns": [[float(x) for x in self._matrix[:, j]]
                        for j in range(self.n)],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GeneratorMatrix":
        try:
            kind = doc["family"]
            cols = doc["columns"]
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"malformed matrix document: {exc}")
        n = doc.get("n", len(cols))
        family = Family(kind, n if kind == DUAL_POLYGONAL else None)
        mat = np.array(cols, dtype=float).T
        return cls(mat, family)

    def __repr__(self) -> str:
        return f"GeneratorMatrix(k={self.k}, n={self.n}, family={self._family})"


@dataclass(frozen=True)
class Codeword:
    """A codeword together with its sorted absolute-value order statistics.

    ``order_stats[0] >= order_stats[1] >= ...`` are the magnitudes of the
    entries in nonincreasing order, and ``order_perm`` gives the producing
    indices (sort ties broken by ascending index).
    """

    entries: np.ndarray
    order_stats: np.ndarray
    order_perm: np.ndarray

    def __post_init__(self) -> None:
        for name in ("entries", "order_stats", "order_perm"):
            getattr(self, name).setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def height(self, m: int) -> float:
        """Ratio of the largest magnitude to the (m+1)-th largest.

        Returns ``inf`` when the denominator is zero and the codeword is
        nonzero; a zero codeword has no defined height.
        """
        if not 1 <= m <= self.n - 1:
            raise InvalidParameterError(f"m must be in [1, {self.n - 1}], got {m}")
        num = float(self.order_stats[0])
        den = float(self.order_stats[m])
        if den == 0.0:
            if num == 0.0:
                raise InvalidParameterError("zero codeword has no height")
            return math.inf
        return num / den


def encode(generator: GeneratorMatrix, u: Sequence[float] | np.ndarray) -> Codeword:
    """Encode the information vector ``u`` and compute its order statistics."""
    vec = np.asarray(u, dtype=float)
    if vec.shape != (generator.k,):
        raise InvalidParameterError(
            f"information vector must have shape ({generator.k},), got {vec.shape}")
    entries = vec @ generator.matrix
    mags = np.abs(entries)
    # stable sort on the negated magnitudes -> ties broken by ascending index
    perm = np.argsort(-mags, kind="stable")
    return Codeword(entries=entries, order_stats=mags[perm], order_perm=perm)


def dual_polygonal(n: int) -> GeneratorMatrix:
    """k=2 generator whose columns are unit vectors at angles ``pi*j/n``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidParameterError(f"dual_polygonal needs an integer n >= 2, got {n!r}")
    theta = np.pi * np.arange(n) / n
    mat = np.vstack([np.cos(theta), np.sin(theta)])
    return GeneratorMatrix(mat, Family(DUAL_POLYGONAL, int(n)))


def dual_icosahedral() -> GeneratorMatrix:
    """k=3 generator whose columns are the six icosahedron vertex axes."""
    p = PHI
    mat = np.array([
        [0.0, 0.0, 1.0, 1.0, p, p],
        [1.0, 1.0, p, -p, 0.0, 0.0],
        [p, -p, 0.0, 0.0, 1.0, -1.0],
    ])
    return GeneratorMatrix(mat, Family(DUAL_ICOSAHEDRAL))


def dual_dodecahedral() -> GeneratorMatrix:
    """k=3 generator whose columns are the ten dodecahedron vertex axes."""
    p = PHI
    q = 1.0 / PHI
    mat = np.array([
        [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, q, q, p, p],
        [1.0, 1.0, -1.0, -1.0, p, p, 0.0, 0.0, q, -q],
        [1.0, -1.0, 1.0, -1.0, q, -q, p, -p, 0.0, 0.0],
    ])
    return GeneratorMatrix(mat, Family(DUAL_DODECAHEDRAL))


def from_columns(columns: Iterable[Sequence[float]]) -> GeneratorMatrix:
    """Build a custom-tagged generator from explicit column vectors.

    All columns must share one dimension ``k >= 1`` and there must be at
    least ``k`` of them.  No rank condition is imposed here; use
    :func:`is_mds` for that.
    """
    cols = [np.asarray(c, dtype=float) for c in columns]
    if not cols:
        raise InvalidParameterError("from_columns needs at least one column")
    k = cols[0].shape[0] if cols[0].ndim == 1 else -1
    for c in cols:
        if c.ndim != 1 or c.shape[0] != k:
            raise InvalidParameterError("columns must be 1-D vectors of equal dimension")
    if k < 1:
        raise InvalidParameterError("columns must have dimension >= 1")
    if len(cols) < k:
        raise InvalidParameterError(
            f"need at least k={k} columns, got {len(cols)}")
    return GeneratorMatrix(np.column_stack(cols), Family(CUSTOM))


def is_mds(generator: GeneratorMatrix, rank_tol: float = RANK_TOL) -> bool:
    """True iff every ``k``-subset of columns is linearly independent.

    Independence is decided by ``|det| > rank_tol * prod(column norms)`` so
    the threshold is invariant to a global rescaling of the matrix.
    """
    mat = generator.matrix
    k, n = mat.shape
    norms = generator.column_norms()
    subsets = np.array(list(combinations(range(n), k)))
    blocks = mat.T[subsets]            # (num_subsets, k, k); rows are columns of G
    dets = np.abs(np.linalg.det(blocks))
    scale = np.prod(norms[subsets], axis=1)
    return bool(np.all(dets > rank_tol * scale))

"""Constructors for the analysis dictionaries D used throughout the package.

Every generator returns a dense float64 matrix with no zero rows. Randomized
generators take an explicit seed and never touch global RNG state.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SchemaError, ZeroWeight

KINDS = (
    "identity",
    "difference_1d",
    "fused",
    "grid_tv",
    "random_graph",
    "complete_graph",
    "conditioned",
)

# Fields each kind reads from a config mapping, beyond "kind" itself.
_KIND_FIELDS = {
    "identity": {"required": ("p",), "optional": ()},
    "difference_1d": {"required": ("p",), "optional": ()},
    "fused": {"required": ("p",), "optional": ("lam1", "lam2")},
    "grid_tv": {"required": ("dims",), "optional": ()},
    "random_graph": {"required": ("p", "m"), "optional": ("seed",)},
    "complete_graph": {"required": ("p",), "optional": ()},
    "conditioned": {"required": ("p", "kappa"), "optional": ("seed",)},
}


def _check_p(p):
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p!r}")
    return int(p)


def identity_dictionary(p):
    """D = I_p: plain LASSO penalty on theta itself."""
    return np.eye(_check_p(p))


def difference_matrix_1d(p):
    """First-difference operator: row k is e_k - e_{k+1}, shape (p-1) x p."""
    p = _check_p(p)
    d = np.zeros((p - 1, p))
    idx = np.arange(p - 1)
    d[idx, idx] = 1.0
    d[idx, idx + 1] = -1.0
    return d


def fused_lasso_dictionary(p, lam1=1.0, lam2=1.0):
    """Fused penalty operator [lam1 * I; lam2 * Q], shape (2p-1) x p.

    Q is the 1-D difference operator. Both weights must be positive, else
    the stack would contain zero rows.
    """
    p = _check_p(p)
    if not lam1 > 0.0:
        raise ZeroWeight(f"lam1 must be positive, got {lam1!r}")
    if not lam2 > 0.0:
        raise ZeroWeight(f"lam2 must be positive, got {lam2!r}")
    return np.vstack([float(lam1) * np.eye(p), float(lam2) * difference_matrix_1d(p)])


def grid_tv_dictionary(dims):
    """Total-variation operator on a K-dimensional grid.

    One row per axis-aligned adjacent pair of grid cells, +1/-1 on the pair.
    Axes are emitted in order; within an axis, pairs follow C-order of the
    grid, so ``dims=[p]`` reproduces ``difference_matrix_1d(p)`` exactly.
    """
    dims = [int(d) for d in dims]
    if len(dims) == 0:
        raise ValueError("dims must contain at least one axis")
    if any(d < 2 for d in dims):
        raise ValueError(f"every grid dimension must be >= 2, got {dims}")
    total = math.prod(dims)
    cells = np.arange(total).reshape(dims)
    heads, tails = [], []
    for axis, extent in enumerate(dims):
        heads.append(cells.take(range(extent - 1), axis=axis).ravel())
        tails.append(cells.take(range(1, extent), axis=axis).ravel())
    head = np.concatenate(heads)
    tail = np.concatenate(tails)
    d = np.zeros((head.size, total))
    rows = np.arange(head.size)
    d[rows, head] = 1.0
    d[rows, tail] = -1.0
    return d


def random_graph_dictionary(p, m, seed=0):
    """Incidence rows of m random edges on p nodes.

    Each row picks an ordered pair of distinct columns uniformly at random
    and sets them to +1 and -1. Repeated edges are allowed, so the result
    is an (m x p) multigraph incidence matrix, deterministic per seed.
    """
    p = _check_p(p)
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    m = int(m)
    rng = np.random.default_rng(seed)
    head = rng.integers(0, p, size=m)
    tail = rng.integers(0, p - 1, size=m)
    tail[tail >= head] += 1
    d = np.zeros((m, p))
    rows = np.arange(m)
    d[rows, head] = 1.0
    d[rows, tail] = -1.0
    return d


def complete_graph_dictionary(p):
    """Incidence matrix of the complete graph K_p: one row per pair i < j.

    The Gram D'D is the K_p Laplacian, whose nonzero eigenvalues all equal
    p, so the nonzero singular values are all sqrt(p) and kappa(D) = 1.
    """
    p = _check_p(p)
    pairs = list(itertools.combinations(range(p), 2))
    d = np.zeros((len(pairs), p))
    for row, (i, j) in enumerate(pairs):
        d[row, i] = 1.0
        d[row, j] = -1.0
    return d


def conditioned_random_dictionary(p, kappa, seed=0):
    """Square invertible D with condition number exactly kappa.

    D = D0 @ V where D0 is diagonal with entries log-uniformly spaced
    between 1 and kappa, shuffled into a seeded random order, and V is a
    seeded Haar-like orthogonal matrix (sign-fixed QR of a Gaussian draw).
    Right-multiplying by an orthogonal V leaves the singular values equal
    to the D0 diagonal, so kappa is exact. Shuffling makes the
    conditioning exchangeable across coordinates: a signal planted on any
    fixed coordinate subset sees a representative mix of well- and
    ill-conditioned directions instead of only the extremes.
    """
    p = _check_p(p)
    kappa = float(kappa)
    if not kappa >= 1.0:
        raise ValueError(f"kappa must be >= 1, got {kappa!r}")
    rng = np.random.default_rng(seed)
    diag = np.logspace(np.log10(kappa), 0.0, p) if kappa > 1.0 else np.ones(p)
    diag = rng.permutation(diag)
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    q = q * np.where(np.diag(r) >= 0.0, 1.0, -1.0)
    return diag[:, None] * q


@dataclass(frozen=True)
class DictionarySpec:
    """Serializable description of a dictionary generator.

    ``kind`` selects the generator; the remaining fields are read or ignored
    depending on the kind (see ``_KIND_FIELDS``). Instances round-trip
    through ``to_dict``/``from_dict`` for experiment config files.
    """

    kind: str
    p: int = 0
    lam1: float = 1.0
    lam2: float = 1.0
    dims: tuple = field(default_factory=tuple)
    m: int = 0
    kappa: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(
                f"unknown dictionary kind {self.kind!r}; expected one of {KINDS}"
            )
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        self.build()  # validate parameters eagerly

    def build(self):
        """Construct the dictionary matrix this spec describes."""
        if self.kind == "identity":
            return identity_dictionary(self.p)
        if self.kind == "difference_1d":
            return difference_matrix_1d(self.p)
        if self.kind == "fused":
            return fused_lasso_dictionary(self.p, self.lam1, self.lam2)
        if self.kind == "grid_tv":
            return grid_tv_dictionary(list(self.dims))
        if self.kind == "random_graph":
            return random_graph_dictionary(self.p, self.m, self.seed)
        if self.kind == "complete_graph":
            return complete_graph_dictionary(self.p)
        return conditioned_random_dictionary(self.p, self.kappa, self.seed)

    def to_dict(self):
        out = {"kind": self.kind}
        fields = _KIND_FIELDS[self.kind]
        for name in fields["required"] + fields["optional"]:
            value = getattr(self, name)
            out[name] = list(value) if name == "dims" else value
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise SchemaError(f"dictionary spec must be a mapping, got {type(data).__name__}")
        if "kind" not in data:
            raise SchemaError("dictionary spec is missing the 'kind' field")
        kind = data["kind"]
        if kind not in _KIND_FIELDS:
            raise SchemaError(
                f"unknown dictionary kind {kind!r}; expected one of {KINDS}"
            )
        fields = _KIND_FIELDS[kind]
        allowed = {"kind", *fields["required"], *fields["optional"]}
        extras = sorted(set(data) - allowed)
        if extras:
            raise SchemaError(f"unexpected fields for kind {kind!r}: {extras}")
        missing = sorted(set(fields["required"]) - set(data))
        if missing:
            raise SchemaError(f"missing fields for kind {kind!r}: {missing}")
        kwargs = {k: v for k, v in data.items() if k != "kind"}
        try:
            return cls(kind=kind, **kwargs)
        except (ValueError, ZeroWeight) as exc:
            raise SchemaError(f"invalid parameters for kind {kind!r}: {exc}") from exc


def make_dictionary(spec):
    """Build the matrix for a DictionarySpec (or a mapping describing one)."""
    if isinstance(spec, dict):
        spec = DictionarySpec.from_dict(spec)
    return spec.build()

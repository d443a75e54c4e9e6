"""Folding, noise injection and decoding.

Design quantities stay exact; residues and estimates are floats because
noise is continuous. Every decoder has a scalar form returning a
:class:`DecodeResult` and a batch form working on ``(n, L)`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError, ConsistencyError, DomainError
from .flat import ModuliSet
from .layered import LayeredDesign, layered_from_pair

AUTO = "auto"

__all__ = [
    "AUTO",
    "ResidueVector",
    "DecodeResult",
    "CandidateTable",
    "fold",
    "fold_batch",
    "add_noise",
    "candidate_table",
    "decode_layered",
    "decode_layered_batch",
    "decode_full",
    "decode_full_batch",
    "is_robust",
]


def _gammas(design) -> tuple[int, ...]:
    if isinstance(design, LayeredDesign):
        return design.gammas
    if isinstance(design, ModuliSet):
        return design.gammas
    raise TypeError(f"expected a LayeredDesign or ModuliSet, got {type(design).__name__}")


@dataclass(frozen=True)
class ResidueVector:
    design: object
    residues: tuple[float, ...]
    folding: Optional[tuple[int, ...]] = None
    true_x: Optional[float] = None

    @property
    def moduli(self) -> tuple[float, ...]:
        return self.design.moduli


@dataclass(frozen=True)
class DecodeResult:
    folding: tuple[int, ...]
    estimate: float
    layer_used: int
    residual_score: float


def fold(x, design) -> ResidueVector:
    """r_i = x - floor(x / m_i) m_i for every modulus.

    Exact for int/Fraction inputs; floats are folded in double precision
    with the remainder nudged back into ``[0, m_i)``.
    """
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    gammas = _gammas(design)
    exact = isinstance(x, (int, Fraction)) and not isinstance(x, bool)
    n, r = [], []
    for g in gammas:
        if exact:
            mi = design.m * g
            ni = math.floor(Fraction(x) / mi)
            n.append(ni)
            r.append(float(Fraction(x) - ni * mi))
        else:
            mi = float(design.m * g)
            ni = math.floor(x / mi)
            ri = x - ni * mi
            if ri < 0:
                ni, ri = ni - 1, ri + mi
            elif ri >= mi:
                ni, ri = ni + 1, ri - mi
            n.append(ni)
            r.append(ri)
    return ResidueVector(design, tuple(r), tuple(n), float(x))


def fold_batch(x, design) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`fold`: returns ``(residues, folding)`` of shape ``(n, L)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be non-negative")
    mods = np.array(design.moduli)
    n = np.floor(x[:, None] / mods)
    r = x[:, None] - n * mods
    low, high = r < 0, r >= mods
    n = n - low + high
    r = r + low * mods - high * mods
    return r, n.astype(np.int64)


def add_noise(rv: ResidueVector, noise, rng) -> ResidueVector:
    """r~_i = r_i + e_i with independent draws from ``noise``."""
    e = noise.sample(rng, len(rv.residues))
    return replace(rv, residues=tuple(float(a + b) for a, b in zip(rv.residues, e)))


@dataclass(frozen=True)
class CandidateTable:
    """Valid folding pairs for x/m in ``[0, limit)``, sorted by line offset.

    Offsets ``n2 gamma2 - n1 gamma1`` are kept in integer units of m.
    """

    gamma1: int
    gamma2: int
    limit: int
    offsets: np.ndarray
    n1: np.ndarray
    n2: np.ndarray

    @property
    def min_gap(self) -> int:
        if len(self.offsets) < 2:
            return 0
        return int(np.diff(self.offsets).min())


@lru_cache(maxsize=256)
def _table(gamma1: int, gamma2: int, limit: int) -> CandidateTable:
    events = np.union1d(np.arange(gamma1, limit, gamma1), np.arange(gamma2, limit, gamma2))
    t = np.concatenate(([0], events)).astype(np.int64)
    n1, n2 = t // gamma1, t // gamma2
    offsets = n2 * gamma2 - n1 * gamma1
    order = np.argsort(offsets, kind="stable")
    arrays = [a[order] for a in (offsets, n1, n2)]
    for a in arrays:
        a.setflags(write=False)
    return CandidateTable(gamma1, gamma2, limit, *arrays)


def candidate_table(design: LayeredDesign, layer: int) -> CandidateTable:
    """Cached table for ``[0, P_layer)``; checks the minimum offset gap."""
    if not 1 <= layer <= design.K + 1:
        raise ConfigurationError(f"layer must lie in [1, {design.K + 1}], got {layer}")
    limit = design.breakpoints[layer - 1] / design.m
    if limit.denominator != 1:
        raise ConsistencyError(f"P_{layer} / m = {limit} is not an integer")
    limit = int(limit)
    if limit < design.gamma1:
        raise ConfigurationError(f"P_{layer} is shorter than the smallest modulus")
    table = _table(design.gamma1, design.gamma2, limit)
    sigma = design.sigma[layer - 1]
    if len(table.offsets) > 1 and table.min_gap < sigma:
        raise ConsistencyError(f"offset gap {table.min_gap} below sigma_{layer} = {sigma} for {design.gammas}")
    return table


def _as_layered(design) -> LayeredDesign:
    if isinstance(design, LayeredDesign):
        return design
    if isinstance(design, ModuliSet) and design.L == 2:
        return layered_from_pair(*design.gammas, design.m)
    raise ConfigurationError("layered decoding needs exactly two moduli")


def _resolve_layer(design: LayeredDesign, layer) -> int:
    if layer is None or layer == AUTO:
        return design.K + 1
    return int(layer)


def _pick(table: CandidateTable, m: float, mods, r: np.ndarray):
    """Nearest offset per row of ``r`` (shape (n, 2)); ties go to the smaller estimate."""
    d = r[:, 0] - r[:, 1]
    off = table.offsets * m
    hi = np.clip(np.searchsorted(off, d), 0, len(off) - 1)
    lo = np.clip(hi - 1, 0, len(off) - 1)

    def unfold(i):
        return (table.n1[i] * mods[0] + r[:, 0] + table.n2[i] * mods[1] + r[:, 1]) / 2

    dist_lo, dist_hi = np.abs(d - off[lo]), np.abs(d - off[hi])
    x_lo, x_hi = unfold(lo), unfold(hi)
    take_lo = (dist_lo < dist_hi) | ((dist_lo == dist_hi) & (x_lo <= x_hi))
    idx = np.where(take_lo, lo, hi)
    xhat = np.maximum(np.where(take_lo, x_lo, x_hi), 0.0)
    score = np.where(take_lo, dist_lo, dist_hi)
    return idx, xhat, score


def decode_layered(design, rv: ResidueVector, layer=AUTO) -> DecodeResult:
    """Pick the folding pair whose line offset is nearest to r~_1 - r~_2.

    Exact whenever x lies in ``[0, P_layer)`` and ``|e1 - e2| < m sigma_layer / 2``.
    """
    design = _as_layered(design)
    j = _resolve_layer(design, layer)
    table = candidate_table(design, j)
    r = np.array([rv.residues], dtype=float)
    idx, xhat, score = _pick(table, float(design.m), design.moduli, r)
    i = int(idx[0])
    return DecodeResult((int(table.n1[i]), int(table.n2[i])), float(xhat[0]), j, float(score[0]))


def decode_layered_batch(design, residues, layer=AUTO) -> tuple[np.ndarray, np.ndarray]:
    """Batch decoder; ``layer`` may be a scalar or one layer per row."""
    design = _as_layered(design)
    r = np.asarray(residues, dtype=float).reshape(-1, 2)
    if np.ndim(layer) == 0:
        layers = np.full(len(r), _resolve_layer(design, layer))
    else:
        layers = np.asarray(layer, dtype=np.int64)
    folding = np.zeros((len(r), 2), dtype=np.int64)
    xhat = np.zeros(len(r))
    m = float(design.m)
    for j in np.unique(layers):
        rows = layers == j
        table = candidate_table(design, int(j))
        idx, xh, _ = _pick(table, m, design.moduli, r[rows])
        folding[rows, 0] = table.n1[idx]
        folding[rows, 1] = table.n2[idx]
        xhat[rows] = xh
    return folding, xhat


def _full_search(gammas, mods, r: np.ndarray):
    span = math.prod(gammas[:-1])
    cand = np.arange(span)[None, :] * mods[-1] + r[:, -1:]
    unfolded = []
    for i in range(len(gammas)):
        n_i = np.rint((cand - r[:, i : i + 1]) / mods[i])
        unfolded.append((n_i, n_i * mods[i] + r[:, i : i + 1]))
    score = sum(np.abs(cand - u) for _, u in unfolded)
    best = np.argmin(score, axis=1)
    rows = np.arange(len(r))
    folding = np.stack([n[rows, best] for n, _ in unfolded], axis=1).astype(np.int64)
    xhat = np.mean([u[rows, best] for _, u in unfolded], axis=0)
    return folding, np.maximum(xhat, 0.0), score[rows, best]


def decode_full(design, rv: ResidueVector) -> DecodeResult:
    """Search every n_L in ``[0, prod_{i<L} gamma_i)`` and keep the most consistent one.

    Exact when x lies in ``[0, P)`` and every ``|e_L - e_i| < m / 2``, which
    holds in particular when all ``|e_i| < m / 4``.
    """
    gammas = _gammas(design)
    r = np.array([rv.residues], dtype=float)
    folding, xhat, score = _full_search(gammas, design.moduli, r)
    layer = design.K + 1 if isinstance(design, LayeredDesign) else 1
    return DecodeResult(tuple(int(v) for v in folding[0]), float(xhat[0]), layer, float(score[0]))


def decode_full_batch(design, residues, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    gammas = _gammas(design)
    r = np.asarray(residues, dtype=float).reshape(-1, len(gammas))
    span = math.prod(gammas[:-1])
    step = max(1, min(chunk, (1 << 22) // span))
    parts = [_full_search(gammas, design.moduli, r[i : i + step]) for i in range(0, len(r), step)]
    if not parts:
        return np.zeros((0, len(gammas)), dtype=np.int64), np.zeros(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def is_robust(result: DecodeResult, truth: ResidueVector) -> bool:
    if truth.folding is None:
        raise DomainError("ground-truth folding integers are missing")
    return tuple(result.folding) == tuple(truth.folding)

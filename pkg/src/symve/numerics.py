"""Deterministic numeric kernels: bracketed maximization, bisection, guarded
hyperbolic transforms and seeded binomial sampling."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryError, BracketError, DomainError, NumericError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_UINT64 = 2**64


@dataclass(frozen=True)
class OptimizerConfig:
    arg_tolerance: float = 1e-10
    max_iterations: int = 500

    def __post_init__(self):
        if not self.arg_tolerance > 0:
            raise DomainError(f"arg_tolerance must be positive, got {self.arg_tolerance}")
        if self.max_iterations < 1:
            raise DomainError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class RngSeed:
    """Identifies one random stream.

    The pair is used verbatim as the 128-bit key of a Philox4x64 counter-based
    generator (``key = [master_seed, stream_id]``), so distinct pairs always
    give distinct streams and the mapping is platform independent.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and 0 <= v < _UINT64):
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def stream_id(*parts) -> int:
    """Stable 64-bit stream id from hashable, repr-able parts."""
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _as_score(v: float) -> float:
    # NaN and -inf are both "strictly worse than any finite value"
    return -math.inf if v != v else v


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: OptimizerConfig | None = None,
) -> tuple[float, float]:
    """Golden-section search for the maximum of ``f`` on the open interval (lo, hi).

    Returns ``(argmax, max)``. For a unimodal ``f`` the result is the global
    maximizer to within ``cfg.arg_tolerance``. ``f`` may return ``-inf``
    at isolated points; such values never win over a finite evaluation.
    """
    cfg = cfg or OptimizerConfig()
    if not lo < hi:
        raise DomainError(f"need lo < hi, got lo={lo}, hi={hi}")

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _as_score(f(c))
    fd = _as_score(f(d))
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)

    it = 0
    while b - a > cfg.arg_tolerance:
        it += 1
        if it > cfg.max_iterations:
            raise NumericError(
                "maximize_scalar did not converge",
                lo=a, hi=b, iterations=it - 1, best_x=best_x,
            )
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _as_score(f(c))
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _as_score(f(d))
            if fd > best_f:
                best_x, best_f = d, fd

    mid = 0.5 * (a + b)
    fm = _as_score(f(mid))
    if fm >= best_f:
        best_x, best_f = mid, fm
    return best_x, best_f


def find_root(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9) -> float:
    """Bisection root of ``g`` on [lo, hi]; requires ``g(lo) * g(hi) <= 0``."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    glo = g(lo)
    if glo == 0:
        return lo
    ghi = g(hi)
    if ghi == 0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise BracketError("no sign change on bracket", lo=lo, hi=hi, g_lo=glo, g_hi=ghi)
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_roots(
    g: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-9,
) -> np.ndarray:
    """Element-wise bisection for a vectorised ``g``.

    ``lo`` and ``hi`` need not be ordered; each pair must bracket a sign change.
    Returns the midpoint of the final bracket, whose width is at most ``tol``.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    glo = np.asarray(g(lo), dtype=float)
    ghi = np.asarray(g(hi), dtype=float)
    bad = (glo > 0) == (ghi > 0)
    bad &= (glo != 0) & (ghi != 0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise BracketError("no sign change on bracket", index=i, lo=lo[i], hi=hi[i])
    lo_pos = glo > 0
    # exact zeros at an end are returned as-is by collapsing the bracket
    hi = np.where(glo == 0, lo, hi)
    lo = np.where(ghi == 0, hi, lo)
    width = np.abs(hi - lo).max(initial=0.0)
    n_iter = 0 if width <= tol else int(math.ceil(math.log2(width / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        gm = np.asarray(g(mid), dtype=float)
        same = (gm > 0) == lo_pos
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def guarded_atanh(x: float) -> float:
    if not -1.0 < x < 1.0:
        raise BoundaryError(f"atanh is unbounded at {x}; use the profile method instead")
    return math.atanh(x)


def guarded_tanh(u: float) -> float:
    if math.isnan(u):
        raise DomainError("tanh of NaN")
    return math.tanh(u)


def binomial_draws(n: int, p: float, size: int, rng: np.random.Generator,
                   chunk: int = 2048) -> np.ndarray:
    """``size`` Binomial(n, p) draws as sums of Bernoulli(p) indicators.

    The result depends only on the generator state, not on ``chunk``.
    """
    if n < 0 or not 0.0 <= p <= 1.0:
        raise DomainError(f"invalid binomial parameters n={n}, p={p}")
    out = np.empty(size, dtype=np.int64)
    if n == 0:
        out[:] = 0
        return out
    rows = max(1, min(chunk, (1 << 22) // n))
    for start in range(0, size, rows):
        stop = min(size, start + rows)
        u = rng.random((stop - start, n))
        out[start:stop] = np.count_nonzero(u < p, axis=1)
    return out


def binomial_sample(n: int, p: float, seed: RngSeed) -> int:
    """One Binomial(n, p) draw, fully determined by ``(n, p, seed)``."""
    return int(binomial_draws(n, p, 1, seed.generator())[0])

"""Rationalized multiresolution DFT.

The transform is computed level by level over an ``m * n`` working buffer.
Block 1 is turned into 2-point spectra by a butterfly pass; every later
block ``i`` reuses the finished spectra of block ``i - 1`` for its even bins
and runs a twiddled half-size DIF FFT on time-domain window differences for
its odd bins.  Frames stay in bit-reversed bin order until the final
permutation.
"""

from __future__ import annotations

import enum
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

MAX_M = 24


class Layout(str, enum.Enum):
    NATURAL = "natural"
    BITREVERSED = "bitreversed"


class ContractViolation(RuntimeError):
    """Raised when a stage is applied to a buffer in the wrong state."""


def bit_reverse_index(bits: int, p: int) -> int:
    """Reverse the lowest ``bits`` binary digits of ``p``."""
    if bits < 0:
        raise ValueError(f"bits must be non-negative, got {bits}")
    if not 0 <= p < (1 << bits):
        raise ValueError(f"index {p} out of range [0, {1 << bits}) for {bits} bits")
    r = 0
    for _ in range(bits):
        r = (r << 1) | (p & 1)
        p >>= 1
    return r


def _bit_reverse_table(bits: int) -> np.ndarray:
    p = np.arange(1 << bits, dtype=np.int64)
    r = np.zeros_like(p)
    for k in range(bits):
        r |= ((p >> k) & 1) << (bits - 1 - k)
    return r


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MrPlan:
    """Precomputed constants for a transform of length ``n = 2**m``.

    ``twiddles``, ``bitrev`` and ``trivial_mask`` are indexed by level
    ``i = 1..m``; entry 0 is a placeholder for the empty level-0 table.

    ``twiddles[i][k] = exp(-2j*pi*k / 2**i)`` for ``k < 2**(i-1)``.  These
    also serve the inner FFT stages, since a stage of sub-size ``L`` uses
    exactly the level ``log2(L)`` table.  ``trivial_mask[i]`` flags ``k = 0``
    (factor 1) and ``k = 2**(i-2)`` (factor ``-j``).
    """

    m: int
    n: int
    twiddles: tuple
    bitrev: tuple
    trivial_mask: tuple


def make_plan(m: int, max_m: int = MAX_M) -> MrPlan:
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= max_m:
        raise ValueError(f"m must be in the interval [1, {max_m}], got {m!r}")
    m = int(m)
    twiddles = [_frozen(np.zeros(0, dtype=np.complex128))]
    bitrev = [_frozen(np.zeros(1, dtype=np.int64))]
    masks = [_frozen(np.zeros(0, dtype=bool))]
    for i in range(1, m + 1):
        half = 1 << (i - 1)
        angle = -2.0 * np.pi * np.arange(half) / (1 << i)
        w = np.empty(half, dtype=np.complex128)
        w.real = np.cos(angle)
        w.imag = np.sin(angle)
        mask = np.zeros(half, dtype=bool)
        mask[0] = True
        if i >= 2:
            mask[half // 2] = True
        twiddles.append(_frozen(w))
        bitrev.append(_frozen(_bit_reverse_table(i)))
        masks.append(_frozen(mask))
    return MrPlan(m, 1 << m, tuple(twiddles), tuple(bitrev), tuple(masks))


@dataclass
class OpCounter:
    """Complex operation tallies keyed by iteration (level) number."""

    mults_per_iter: Counter = field(default_factory=Counter)
    nontrivial_per_iter: Counter = field(default_factory=Counter)
    adds_per_iter: Counter = field(default_factory=Counter)

    def merge(self, other: "OpCounter") -> None:
        self.mults_per_iter.update(other.mults_per_iter)
        self.nontrivial_per_iter.update(other.nontrivial_per_iter)
        self.adds_per_iter.update(other.adds_per_iter)

    def rows(self, m: int) -> list[tuple[int, int, int, int]]:
        """``(i, mults, nontrivial, adds)`` for ``i = 1..m``."""
        return [
            (i, self.mults_per_iter[i], self.nontrivial_per_iter[i], self.adds_per_iter[i])
            for i in range(1, m + 1)
        ]


@dataclass
class MrSpectrum:
    """Output vector of length ``m * n``.

    Level ``i`` occupies ``data[(i-1)*n : i*n]`` and is split into
    ``2**(m-i)`` frames of ``2**i`` bins.
    """

    m: int
    n: int
    data: np.ndarray
    layout: Layout = Layout.NATURAL

    def __post_init__(self):
        if self.data.shape != (self.m * self.n,):
            raise ValueError(
                f"spectrum data must have length m*n = {self.m * self.n}, got shape {self.data.shape}"
            )
        self.layout = Layout(self.layout)

    def _check_level(self, level: int) -> None:
        if not 1 <= level <= self.m:
            raise ValueError(f"level {level} out of range [1, {self.m}]")

    def flat_index(self, level: int, frame: int, bin: int) -> int:
        self._check_level(level)
        size = 1 << level
        if not 0 <= frame < self.n // size or not 0 <= bin < size:
            raise IndexError(f"(frame={frame}, bin={bin}) out of range for level {level}")
        return (level - 1) * self.n + frame * size + bin

    def level(self, level: int) -> np.ndarray:
        """View of one level as a ``(frames, bins)`` array."""
        self._check_level(level)
        size = 1 << level
        seg = self.data[(level - 1) * self.n : level * self.n]
        return seg.reshape(self.n // size, size)

    def levels(self) -> list[np.ndarray]:
        return [self.level(i) for i in range(1, self.m + 1)]


def _split_last(x: np.ndarray, shape: tuple) -> np.ndarray:
    # every kernel works in place, so a silent copy here would lose results
    v = x.reshape(x.shape[:-1] + shape)
    if x.size and not np.may_share_memory(v, x):
        raise ContractViolation("buffer view cannot be reshaped without copying")
    return v


def _cmul(x: np.ndarray, w: np.ndarray) -> None:
    # separate real ufuncs: numpy's complex multiply may use FMA on some
    # vector paths, which makes rounding depend on how frames are chunked
    xr = x.real.copy()
    xi = x.imag.copy()
    x.real = xr * w.real - xi * w.imag
    x.imag = xr * w.imag + xi * w.real


def _apply_twiddles(
    x: np.ndarray, table_level: int, plan: MrPlan, counter: OpCounter, iteration: int
) -> None:
    """Scale ``x[..., k]`` by ``plan.twiddles[table_level][k]`` in place.

    The factor 1 is skipped and ``-j`` becomes a swap of real and imaginary
    parts with one sign change.  Every diagonal entry counts as a
    multiplication; only the non-flagged ones count as nontrivial.
    """
    w = plan.twiddles[table_level]
    h = w.size
    rows = x.size // h if h else 0
    counter.mults_per_iter[iteration] += rows * h
    counter.nontrivial_per_iter[iteration] += rows * int(np.count_nonzero(~plan.trivial_mask[table_level]))
    if h < 2:
        return
    q = h // 2
    if q > 1:
        _cmul(x[..., 1:q], w[1:q])
        _cmul(x[..., q + 1 :], w[q + 1 :])
    col = x[..., q]
    re = col.real.copy()
    col.real = col.imag
    col.imag = -re


def stage_one(block: np.ndarray, counter: OpCounter) -> None:
    """First iteration: 2-point butterflies over adjacent sample pairs."""
    pairs = _split_last(block, (block.shape[-1] // 2, 2))
    a = pairs[..., 0]
    b = pairs[..., 1]
    d = a - b
    a += b
    b[...] = d
    counter.adds_per_iter[1] += block.size
    # the w_2^0 diagonal is an identity; tallied but never executed
    counter.mults_per_iter[1] += block.size // 2


def sub_fft_dif(
    buffer: np.ndarray,
    size: int,
    plan: MrPlan,
    counter: OpCounter,
    level: Optional[int] = None,
) -> None:
    """In-place radix-2 DIF FFT along the last axis, output in bit-reversed order.

    Any leading axes are treated as independent transforms.  Each pass splits
    blocks of length ``L`` into halves, writes ``(a + b, (a - b) * w_L^k)`` and
    halves ``L``; there is no final reordering.

    Parameters
    ----------
    buffer : ndarray
        Complex array whose last axis has length ``size``.
    size : int
        Transform length, a power of two.
    plan : MrPlan
        Supplies the twiddle tables; must cover ``log2(size)``.
    counter : OpCounter
        Operations are credited to iteration ``level``.
    level : int, optional
        Defaults to ``log2(size) + 1``, the iteration whose odd-bin
        transform has this size.
    """
    if size < 1 or size & (size - 1):
        raise ValueError(f"size must be a power of two, got {size}")
    if buffer.shape[-1] != size:
        raise ValueError(f"last axis has length {buffer.shape[-1]}, expected {size}")
    bits = size.bit_length() - 1
    if level is None:
        level = bits + 1
    length = size
    while length >= 2:
        v = _split_last(buffer, (size // length, 2, length // 2))
        a = v[..., 0, :]
        b = v[..., 1, :]
        d = a - b
        a += b
        b[...] = d
        counter.adds_per_iter[level] += buffer.size
        _apply_twiddles(b, length.bit_length() - 1, plan, counter, level)
        length //= 2


def stage_combine(
    prev: np.ndarray, cur: np.ndarray, level: int, plan: MrPlan, counter: OpCounter
) -> None:
    """Compute level ``level`` frames in ``cur`` from level ``level - 1`` in ``prev``.

    ``cur`` must still hold raw samples.  Even bins are the sum of the two
    previous-level spectra covering each window; odd bins come from the
    twiddled, half-size transform of the difference between the window's
    halves.
    """
    size = 1 << level
    half = size >> 1
    p = _split_last(prev, (prev.shape[-1] // size, 2, half))
    c = _split_last(cur, (cur.shape[-1] // size, 2, half))
    top = c[..., 0, :]
    bottom = c[..., 1, :]
    np.subtract(top, bottom, out=bottom)
    np.add(p[..., 0, :], p[..., 1, :], out=top)
    counter.adds_per_iter[level] += cur.size
    _apply_twiddles(bottom, level, plan, counter, level)
    sub_fft_dif(bottom, half, plan, counter, level)


def gamma_permute(data: np.ndarray, plan: MrPlan) -> np.ndarray:
    """Return a copy of a flat ``m * n`` vector with every frame bit-reversed."""
    out = np.empty_like(data)
    blocks = data.reshape(plan.m, plan.n)
    out_blocks = out.reshape(plan.m, plan.n)
    for i in range(1, plan.m + 1):
        size = 1 << i
        frames = blocks[i - 1].reshape(-1, size)
        out_blocks[i - 1].reshape(-1, size)[...] = frames[:, plan.bitrev[i]]
    return out


def apply_gamma(spectrum: MrSpectrum, plan: MrPlan) -> None:
    if spectrum.layout is not Layout.BITREVERSED:
        raise ContractViolation("spectrum is already in natural order")
    if (spectrum.m, spectrum.n) != (plan.m, plan.n):
        raise ValueError(f"plan is for m={plan.m}, spectrum has m={spectrum.m}")
    spectrum.data[...] = gamma_permute(spectrum.data, plan)
    spectrum.layout = Layout.NATURAL


def _chunked(
    pool: Optional[ThreadPoolExecutor],
    workers: int,
    frames: int,
    counter: OpCounter,
    body: Callable[[int, int, OpCounter], None],
) -> None:
    if pool is None or frames < 2:
        body(0, frames, counter)
        return
    k = min(workers, frames)
    bounds = [frames * j // k for j in range(k + 1)]
    local = [OpCounter() for _ in range(k)]
    futures = [pool.submit(body, bounds[j], bounds[j + 1], local[j]) for j in range(k)]
    for f in futures:
        f.result()
    for c in local:
        counter.merge(c)


def mrdft_fast(
    x,
    plan: MrPlan,
    counter: Optional[OpCounter] = None,
    layout: Layout | str = Layout.NATURAL,
    threads: int = 1,
) -> MrSpectrum:
    """Multiresolution DFT of ``x`` via the level-reusing factorization.

    Level ``i`` of the result holds the ``2**i``-point DFTs of the
    ``2**(m-i)`` consecutive rectangular windows of ``x``.  With
    ``layout="bitreversed"`` the final permutation is skipped.  ``threads > 1``
    splits each level's frames across a thread pool; results do not depend
    on the thread count.
    """
    layout = Layout(layout)
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (plan.n,):
        raise ValueError(f"signal length {x.size} does not match plan length n={plan.n}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if counter is None:
        counter = OpCounter()

    m, n = plan.m, plan.n
    buf = np.empty(m * n, dtype=np.complex128)
    blocks = buf.reshape(m, n)
    blocks[...] = x

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        def first(lo, hi, c):
            stage_one(blocks[0, 2 * lo : 2 * hi], c)

        _chunked(pool, threads, n // 2, counter, first)
        for i in range(2, m + 1):
            size = 1 << i

            def combine(lo, hi, c, i=i, size=size):
                sl = slice(lo * size, hi * size)
                stage_combine(blocks[i - 2, sl], blocks[i - 1, sl], i, plan, c)

            _chunked(pool, threads, n // size, counter, combine)
    finally:
        if pool is not None:
            pool.shutdown()

    spectrum = MrSpectrum(m, n, buf, Layout.BITREVERSED)
    if layout is Layout.NATURAL:
        apply_gamma(spectrum, plan)
    return spectrum

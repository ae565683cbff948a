"""Reference implementations of the multiresolution DFT.

Three independent routes to the same result:

* :func:`mrdft_direct` multiplies every window by a dense DFT matrix.
* :func:`mrdft_per_level_fft` runs a separate radix-2 FFT on every window
  with no reuse between levels, and serves as the operation-count baseline.
* :func:`mrdft_dense_pipeline` materializes each factor of the fast
  algorithm as a dense matrix (small ``m`` only) and multiplies them out.
  It checks that the fast kernels implement that exact factorization.

Dense matrices are plain 2-D ``numpy`` arrays.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional

import numpy as np

from .core import Layout, MrSpectrum, OpCounter, make_plan, sub_fft_dif

DENSE_MAX_M = 4

H2 = np.array([[1, 1], [1, -1]], dtype=np.complex128)


def _is_pow2(k: int) -> bool:
    return k >= 1 and not k & (k - 1)


def _signal(x, m: int) -> np.ndarray:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (1 << m,):
        raise ValueError(f"signal of length {x.size} does not match 2**m = {1 << m}")
    return x


@lru_cache(maxsize=16)
def _def_matrix(size: int) -> np.ndarray:
    # exponent reduced mod size before scaling keeps each entry at unit accuracy
    nk = np.outer(np.arange(size), np.arange(size)) % size
    angle = -2.0 * np.pi * np.arange(size) / size
    roots = np.cos(angle) + 1j * np.sin(angle)
    e = roots[nk]
    e.setflags(write=False)
    return e


def def_matrix(size: int) -> np.ndarray:
    """DFT matrix with entries ``exp(-2j*pi*n*k/size)``.

    The returned array is cached and read-only.
    """
    if size < 2 or not _is_pow2(size):
        raise ValueError(f"size must be a power of two >= 2, got {size}")
    return _def_matrix(size)


def mrdft_direct(x, m: int) -> MrSpectrum:
    """Apply the DFT matrix of each level to each of its windows."""
    x = _signal(x, m)
    n = 1 << m
    data = np.empty(m * n, dtype=np.complex128)
    for i in range(1, m + 1):
        size = 1 << i
        windows = x.reshape(n // size, size)
        data[(i - 1) * n : i * n] = (windows @ def_matrix(size).T).ravel()
    return MrSpectrum(m, n, data, Layout.NATURAL)


def mrdft_per_level_fft(x, m: int, counter: Optional[OpCounter] = None) -> MrSpectrum:
    """Independent FFT of every window at every level, no cross-level reuse.

    Each ``2**i`` window costs ``i * 2**(i-1)`` multiplications, all credited
    to iteration ``i``.
    """
    x = _signal(x, m)
    plan = make_plan(m)
    counter = OpCounter() if counter is None else counter
    n = plan.n
    data = np.empty(m * n, dtype=np.complex128)
    for i in range(1, m + 1):
        size = 1 << i
        windows = x.reshape(n // size, size).copy()
        sub_fft_dif(windows, size, plan, counter, level=i)
        data[(i - 1) * n : i * n] = windows[:, plan.bitrev[i]].ravel()
    return MrSpectrum(m, n, data, Layout.NATURAL)


# -- dense combinators -------------------------------------------------------

def eye(k: int) -> np.ndarray:
    return np.eye(k, dtype=np.complex128)


def ones(rows: int, cols: int = 1) -> np.ndarray:
    return np.ones((rows, cols), dtype=np.complex128)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.complex128)


def kron(*factors: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = np.kron(out, f)
    return out


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix; blocks may be rectangular or empty."""
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def diag(values) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=np.complex128))


def twiddle(n: int, k: int) -> complex:
    """``w_n^k = exp(-2j*pi*k/n)``."""
    return complex(np.exp(-2j * np.pi * k / n))


def twiddle_diag(n: int, count: int) -> np.ndarray:
    return diag([twiddle(n, k) for k in range(count)])


def _reverse_bits(p: int, bits: int) -> int:
    if bits == 0:
        return 0
    return int(format(p, f"0{bits}b")[::-1], 2)


def t_matrix(i: int) -> np.ndarray:
    """Permutation ``T`` of size ``2**i`` sending position ``k`` to its bit reversal."""
    size = 1 << i
    t = zeros(size, size)
    for k in range(size):
        t[k, _reverse_bits(k, i)] = 1
    return t


# -- factors of the fast algorithm -------------------------------------------

def u_matrix(m: int, i: int) -> np.ndarray:
    h = 1 << (i - 1)
    block = np.vstack([kron(ones(1, 2), eye(h)), zeros(h, 2 * h)])
    return kron(eye(1 << (m - i)), block)


def v_matrix(m: int, i: int) -> np.ndarray:
    h = 1 << (i - 1)
    block = np.vstack([zeros(h, 2 * h), np.hstack([eye(h), -eye(h)])])
    return kron(eye(1 << (m - i)), block)


def d_tilde(i: int) -> np.ndarray:
    h = 1 << (i - 1)
    return direct_sum(eye(h), twiddle_diag(1 << i, h))


def s_matrix(i: int, j: int) -> np.ndarray:
    """Butterfly layer ``j`` of the size ``2**(i-1)`` odd-bin transform."""
    return kron(eye(1 << (j - 1)), H2, eye(1 << (i - j - 1)))


def w_matrix(i: int, j: int) -> np.ndarray:
    """Twiddle layer ``j`` of the size ``2**(i-1)`` odd-bin transform."""
    h = 1 << (i - j - 1)
    return kron(eye(1 << (j - 1)), direct_sum(eye(h), twiddle_diag(1 << (i - j), h)))


def r_matrix(i: int) -> np.ndarray:
    """Product ``(W S)^(i-1) ... (W S)^(1)``; the identity of size 1 when ``i == 1``."""
    r = eye(1 << (i - 1))
    for j in range(1, i):
        r = w_matrix(i, j) @ s_matrix(i, j) @ r
    return r


def gamma_matrix(m: int) -> np.ndarray:
    return direct_sum(*(kron(eye(1 << (m - i)), t_matrix(i)) for i in range(1, m + 1)))


def _check_dense(m: int) -> None:
    if not 1 <= m <= DENSE_MAX_M:
        raise ValueError(
            f"dense matrices are limited to 1 <= m <= {DENSE_MAX_M} (got m={m}); "
            "use mrdft_direct for larger sizes"
        )


def build_stage_matrices(m: int, i: int) -> list[np.ndarray]:
    """Dense ``[P, A, D, F]`` for iteration ``i`` of an ``m``-level transform.

    Iteration 1 has ``P`` of shape ``(mN, N)`` and square ``A``; later
    iterations expand to ``(m+1)N`` rows in ``P`` and contract back in ``A``.
    """
    _check_dense(m)
    if not 1 <= i <= m:
        raise ValueError(f"iteration {i} out of range [1, {m}]")
    n = 1 << m
    frames = 1 << (m - i)
    if i == 1:
        p = kron(ones(m), eye(n))
        a = direct_sum(kron(eye(frames), H2), eye((m - 1) * n))
    else:
        p = direct_sum(eye((i - 2) * n), kron(ones(2), eye(n)), eye((m - i + 1) * n))
        uv = np.hstack([u_matrix(m, i), v_matrix(m, i)])
        a = direct_sum(eye((i - 1) * n), uv, eye((m - i) * n))
    d = direct_sum(eye((i - 1) * n), kron(eye(frames), d_tilde(i)), eye((m - i) * n))
    if i == 1:
        f = eye(m * n)
    else:
        r_tilde = direct_sum(eye(1 << (i - 1)), r_matrix(i))
        f = direct_sum(eye((i - 1) * n), kron(eye(frames), r_tilde), eye((m - i) * n))
    return [p, a, d, f]


def mrdft_dense_pipeline(x, m: int) -> MrSpectrum:
    """Evaluate ``Gamma (F D A P)^(m) ... (F D A P)^(1) x`` with dense matrices."""
    _check_dense(m)
    x = _signal(x, m)
    y = x
    for i in range(1, m + 1):
        p, a, d, f = build_stage_matrices(m, i)
        y = f @ (d @ (a @ (p @ y)))
    y = gamma_matrix(m) @ y
    return MrSpectrum(m, 1 << m, y, Layout.NATURAL)

"""
Arithmetic over GF(2^w) for w in {8, 16}, plus dense matrix rank and solve.

Elements are unsigned integers in [0, 2^w) stored in numpy arrays; bit i is the
coefficient of alpha^i. Addition is XOR, multiplication goes through log/antilog
tables built from a primitive polynomial with generator alpha = 2.
"""

from __future__ import annotations

import numpy as np

from .errors import RankDeficient

# x^8 + x^4 + x^3 + x^2 + 1 and x^16 + x^12 + x^3 + x + 1, both primitive.
DEFAULT_POLY = {8: 0x11D, 16: 0x1100B}


class GF:
    """The field GF(2^w) with vectorised element and matrix operations.

    Parameters
    ----------
    w : int
        Word size in bits; 8 or 16.
    poly : int, optional
        Primitive polynomial including the x^w term.
    """

    def __init__(self, w: int = 8, poly: int | None = None):
        if w not in DEFAULT_POLY:
            raise ValueError(f"unsupported word size {w}; choose 8 or 16")
        poly = DEFAULT_POLY[w] if poly is None else poly
        if poly >> w != 1:
            raise ValueError(f"polynomial {poly:#x} does not have degree {w}")
        self.w = w
        self.order = 1 << w
        self.poly = poly
        self.dtype = np.uint8 if w == 8 else np.uint16

        n = self.order - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            if i and x == 1:
                raise ValueError(f"polynomial {poly:#x} is not primitive")
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial {poly:#x} is not primitive")
        exp[n:] = exp[:n]
        self._exp = exp
        self._log = log

    def __repr__(self) -> str:
        return f"GF(2^{self.w}, poly={self.poly:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.w, self.poly) == (other.w, other.poly)

    def __hash__(self) -> int:
        return hash((self.w, self.poly))

    # -- elements ---------------------------------------------------------

    def mul(self, a, b):
        """Elementwise product with numpy broadcasting."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out).astype(self.dtype)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)].astype(self.dtype)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.int64).astype(self.dtype)

    # -- matrices ---------------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of an (r, n) and an (n, L) matrix over the field."""
        a = np.asarray(a)
        b = np.asarray(b)
        squeeze = b.ndim == 1
        if squeeze:
            b = b[:, None]
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        out = np.zeros((a.shape[0], b.shape[1]), dtype=self.dtype)
        for k in range(a.shape[1]):
            out ^= self.mul(a[:, k, None], b[None, k, :])
        return out[:, 0] if squeeze else out

    def _eliminate(self, m: np.ndarray, ncols: int) -> list[int]:
        """In-place reduced row echelon form on the first ``ncols`` columns.

        Returns the pivot columns in order.
        """
        rows = m.shape[0]
        pivots = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            p = r + nz[0]
            if p != r:
                m[[r, p]] = m[[p, r]]
            m[r] = self.mul(m[r], self.inv(m[r, c]))
            col = m[:, c].copy()
            col[r] = 0
            hit = np.nonzero(col)[0]
            if hit.size:
                m[hit] ^= self.mul(col[hit, None], m[r][None, :])
            pivots.append(c)
            r += 1
        return pivots

    def rank(self, a) -> int:
        a = np.array(a, dtype=self.dtype, ndmin=2)
        if a.size == 0:
            return 0
        return len(self._eliminate(a, a.shape[1]))

    def solve(self, a, b) -> np.ndarray:
        """Solve ``a @ x = b`` for a square or tall ``a`` with full column rank.

        ``b`` may be a vector or a matrix whose columns are independent
        right-hand sides. Raises RankDeficient when ``a`` has dependent columns
        and ValueError when the system is inconsistent.
        """
        a = np.array(a, dtype=self.dtype, ndmin=2)
        b = np.asarray(b, dtype=self.dtype)
        vec = b.ndim == 1
        b2 = b[:, None] if vec else b
        m, n = a.shape
        if m < n:
            raise RankDeficient(f"{m} equations for {n} unknowns")
        if b2.shape[0] != m:
            raise ValueError(f"rhs has {b2.shape[0]} rows, expected {m}")
        aug = np.concatenate([a, b2], axis=1)
        pivots = self._eliminate(aug, n)
        if len(pivots) < n:
            raise RankDeficient(f"rank {len(pivots)} < {n} unknowns")
        if np.any(aug[n:, n:]):
            raise ValueError("inconsistent system")
        x = aug[:n, n:]
        return x[:, 0] if vec else x

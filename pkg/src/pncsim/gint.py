"""Exact Gaussian-integer arithmetic over the ideal chain generated by phi = 1+j.

Everything here is integer-exact: scalars are pairs of Python ints, vectors are
pairs of int64 arrays.  The coset-representative tables for Z[i] mod phi^k are
the constellation alphabets of the lattice modulator, so their contents are
pinned (k = 1, 2, 3) or derived by a deterministic minimum-norm rule (k = 4..6).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_LEVEL_EXP = 6


class NotDivisible(ValueError):
    """Raised when an exact division by a power of phi leaves a remainder."""


@dataclass(frozen=True)
class GaussInt:
    """A Gaussian integer re + im*j."""

    re: int
    im: int

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def norm2(self) -> int:
        """Squared Euclidean norm |z|^2."""
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __repr__(self) -> str:
        return f"GaussInt({self.re}, {self.im})"


PHI = GaussInt(1, 1)
ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)


def phi_pow(k: int) -> GaussInt:
    """(1+j)**k computed exactly; k >= 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = ONE
    for _ in range(k):
        out = out * PHI
    return out


def mod_phi(z: GaussInt) -> int:
    """Fold z onto the binary digit of the phi-adic expansion.

    phi divides z exactly when re+im is even, so the fold is coordinate-sum
    parity; 0 means z is in the ideal (1+j)Z[i].
    """
    return (z.re + z.im) & 1


def is_divisible_phi_pow(z: GaussInt, k: int) -> bool:
    """True when phi^k divides z."""
    p = phi_pow(k)
    n = 1 << k  # |phi^k|^2
    a = z.re * p.re + z.im * p.im
    b = z.im * p.re - z.re * p.im
    return a % n == 0 and b % n == 0


def exact_div_phi(z: GaussInt, k: int) -> GaussInt:
    """q with q * phi^k = z; raises NotDivisible on remainder."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = phi_pow(k)
    n = 1 << k
    a = z.re * p.re + z.im * p.im
    b = z.im * p.re - z.re * p.im
    if a % n or b % n:
        raise NotDivisible(f"{z} is not divisible by phi^{k}")
    return GaussInt(a // n, b // n)


# Paper-pinned representative sets; higher k filled in by minimum norm with a
# deterministic tie-break (largest re, then largest im).
_PINNED_REPS = {
    1: ((0, 0), (1, 0)),
    2: ((0, 0), (0, 1), (-1, 0), (-1, -1)),
    3: ((0, 0), (0, 1), (-1, 0), (-1, -1), (0, -1), (1, 0), (1, -1), (0, -2)),
}


@dataclass(frozen=True)
class CosetTable:
    """Canonical representatives of Z[i] / phi^k Z[i]."""

    k: int
    reps: tuple[GaussInt, ...]


@lru_cache(maxsize=None)
def representative_set(k: int) -> CosetTable:
    """Coset representatives for 1 <= k <= 6.

    k = 1..3 reproduce the published constellations bit-exactly; larger k uses
    minimum-norm representatives (ties toward largest re, then largest im).
    """
    if not 1 <= k <= MAX_LEVEL_EXP:
        raise ValueError(f"unsupported level exponent k={k}")
    if k in _PINNED_REPS:
        reps = tuple(GaussInt(a, b) for a, b in _PINNED_REPS[k])
    else:
        # Enumerate one coset key grid; search a box wide enough to contain
        # the minimum-norm element of every coset.
        m = 1 << ((k + 1) // 2)
        reps = []
        for a in range(m):
            for b in range(m):
                best = None
                for re in range(a - 2 * m, a + 2 * m + 1, m):
                    for im in range(b - 2 * m, b + 2 * m + 1, m):
                        z = GaussInt(re, im)
                        if not is_divisible_phi_pow(z - GaussInt(a, b), k):
                            continue
                        key = (z.norm2(), -z.re, -z.im)
                        if best is None or key < best[0]:
                            best = (key, z)
                reps.append(best[1])
        # Deduplicate cosets: the key grid is finer than the ideal for odd k.
        seen, uniq = set(), []
        for r in reps:
            c = _coset_key(r, k)
            if c not in seen:
                seen.add(c)
                uniq.append(r)
        reps = tuple(uniq)
    if len(reps) != 1 << k:
        raise AssertionError(f"coset table for k={k} has {len(reps)} entries")
    return CosetTable(k, reps)


def _coset_key(z: GaussInt, k: int) -> tuple[int, int]:
    # z ~ z' mod phi^k  iff  z*conj(phi^k) ~ z'*conj(phi^k) mod |phi^k|^2 = 2^k.
    p = phi_pow(k)
    n = 1 << k
    a = z.re * p.re + z.im * p.im
    b = z.im * p.re - z.re * p.im
    return (a % n, b % n)


@lru_cache(maxsize=None)
def _mod_tables(k: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Lookup arrays mapping (re mod m, im mod m) -> representative."""
    m = 1 << ((k + 1) // 2)
    reps = representative_set(k).reps
    tab_re = np.zeros((m, m), dtype=np.int64)
    tab_im = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            z = GaussInt(a, b)
            hit = [r for r in reps if is_divisible_phi_pow(z - r, k)]
            if len(hit) != 1:
                raise AssertionError("coset table is not a complete residue system")
            tab_re[a, b] = hit[0].re
            tab_im[a, b] = hit[0].im
    return tab_re, tab_im, m


def mod_phi_pow(z: GaussInt, k: int) -> GaussInt:
    """The unique table representative congruent to z modulo phi^k."""
    tab_re, tab_im, m = _mod_tables(k)
    return GaussInt(int(tab_re[z.re % m, z.im % m]), int(tab_im[z.re % m, z.im % m]))


def avg_energy(k: int) -> Fraction:
    """Mean squared norm of the k-th representative set (symbol power p_u)."""
    reps = representative_set(k).reps
    return Fraction(sum(r.norm2() for r in reps), len(reps))


class GaussVec:
    """Batched vector of Gaussian integers backed by int64 arrays.

    Shape is arbitrary (typically (frames, N)); arithmetic stays exact.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = np.asarray(re, dtype=np.int64)
        self.im = np.asarray(im, dtype=np.int64)
        if self.re.shape != self.im.shape:
            raise ValueError("re/im shape mismatch")

    @classmethod
    def zeros(cls, shape) -> "GaussVec":
        return cls(np.zeros(shape, np.int64), np.zeros(shape, np.int64))

    @property
    def shape(self):
        return self.re.shape

    def copy(self) -> "GaussVec":
        return GaussVec(self.re.copy(), self.im.copy())

    def __add__(self, other: "GaussVec") -> "GaussVec":
        return GaussVec(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussVec") -> "GaussVec":
        return GaussVec(self.re - other.re, self.im - other.im)

    def mul_gauss(self, g: GaussInt) -> "GaussVec":
        return GaussVec(self.re * g.re - self.im * g.im, self.re * g.im + self.im * g.re)

    def mul_phi_pow(self, k: int) -> "GaussVec":
        return self.mul_gauss(phi_pow(k))

    def mod_phi(self) -> np.ndarray:
        """Per-element binary fold (uint8)."""
        return ((self.re + self.im) & 1).astype(np.uint8)

    def div_phi_exact(self) -> "GaussVec":
        """Elementwise z/phi; caller guarantees divisibility (checked)."""
        a = self.re + self.im
        b = self.im - self.re
        if np.any(a & 1) or np.any(b & 1):
            raise NotDivisible("vector has elements not divisible by phi")
        return GaussVec(a >> 1, b >> 1)

    def peel_digit(self) -> tuple[np.ndarray, "GaussVec"]:
        """One phi-adic step: (digit, (z - digit)/phi)."""
        d = self.mod_phi()
        rest = GaussVec(self.re - d.astype(np.int64), self.im).div_phi_exact()
        return d, rest

    def mod_phi_pow(self, k: int) -> "GaussVec":
        tab_re, tab_im, m = _mod_tables(k)
        a = self.re % m
        b = self.im % m
        return GaussVec(tab_re[a, b], tab_im[a, b])

    def to_complex(self) -> np.ndarray:
        return self.re.astype(np.complex128) + 1j * self.im.astype(np.complex128)

    def energy(self) -> np.ndarray:
        return (self.re * self.re + self.im * self.im).astype(np.float64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GaussVec)
            and np.array_equal(self.re, other.re)
            and np.array_equal(self.im, other.im)
        )

    def __repr__(self) -> str:
        return f"GaussVec(shape={self.shape})"


def from_bits(bits) -> GaussVec:
    """Natural embedding of {0,1} codeword bits into Z[i] (pi in the construction)."""
    b = np.asarray(bits, dtype=np.int64)
    return GaussVec(b, np.zeros_like(b))

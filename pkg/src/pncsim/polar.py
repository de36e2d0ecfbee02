"""Polar component codes: encoder, successive-cancellation decoding, construction.

One code object serves three front ends: soft-LLR channel decoding of the
per-level binary lattice channels, hard-input BSC decoding of the shaping
repair step, and (via the transform helpers) the lossless source codec.

All bit arrays are uint8 with an arbitrary leading batch shape and a trailing
block axis; the decoder is vectorized over the batch.
"""

from __future__ import annotations

import hashlib
import os
import sys
from dataclasses import dataclass, field
from math import floor, log2
from pathlib import Path

import numpy as np

LLR_MAX = 40.0
MC_TRIALS = 100_000
_MC_CHUNK = 20_000


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def entropy_h(p: float) -> float:
    """Binary entropy H(p) in bits, with H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * log2(p) - (1.0 - p) * log2(1.0 - p)


def inv_entropy(h: float) -> float:
    """The p in [0, 0.5] with H(p) = h, by bisection to |H(p) - h| <= 1e-12."""
    if not 0.0 <= h <= 1.0:
        raise ValueError("h must be in [0, 1]")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = entropy_h(mid)
        if abs(val - h) <= 1e-12:
            return mid
        if val < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """c = u F^{otimes n} over F2 (involutory), batched over leading axes."""
    x = np.ascontiguousarray(bits, dtype=np.uint8).copy()
    n = x.shape[-1]
    if not _is_pow2(n):
        raise ValueError("block length must be a power of 2")
    step = 1
    while step < n:
        view = x.reshape(x.shape[:-1] + (n // (2 * step), 2, step))
        view[..., 0, :] ^= view[..., 1, :]
        step *= 2
    return x


@dataclass(frozen=True)
class PolarCode:
    """Block length, information set and design parameter of one polar code.

    ``e_len`` < ``n_len`` marks a shortened code: only the first ``e_len``
    coded bits are transmitted, the rest are structurally zero.
    """

    n_len: int
    info_set: np.ndarray  # sorted indices, dtype int64
    design_param: float
    channel_kind: str = "soft-awgn"
    e_len: int = 0  # 0 means n_len
    _frozen_mask: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not _is_pow2(self.n_len):
            raise ValueError("n_len must be a power of 2")
        info = np.asarray(self.info_set, dtype=np.int64)
        info = np.sort(info)
        if len(np.unique(info)) != len(info) or (len(info) and (info[0] < 0 or info[-1] >= self.n_len)):
            raise ValueError("info_set indices must be unique and in [0, n_len)")
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "e_len", self.e_len or self.n_len)
        mask = np.ones(self.n_len, dtype=bool)
        mask[info] = False
        object.__setattr__(self, "_frozen_mask", mask)

    @property
    def k(self) -> int:
        return len(self.info_set)

    @property
    def rate(self) -> float:
        return self.k / self.e_len


def encode(code: PolarCode, info: np.ndarray) -> np.ndarray:
    """Polar-transform the info bits scattered on the information set.

    Linear over XOR; frozen positions are zero.
    """
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != code.k:
        raise ValueError(f"expected {code.k} info bits, got {info.shape[-1]}")
    u = np.zeros(info.shape[:-1] + (code.n_len,), dtype=np.uint8)
    if code.k:
        u[..., code.info_set] = info
    return polar_transform(u)[..., : code.e_len]


def transform_info(code: PolarCode, word: np.ndarray) -> np.ndarray:
    """Projection T(word) restricted to the information set.

    For a rate-1 code this inverts :func:`encode` exactly; in general it is the
    relay's K-bit digest of a raw digit stream whose frozen-side content the
    end users reconstruct locally.
    """
    word = np.asarray(word, dtype=np.uint8)
    if word.shape[-1] != code.n_len:
        raise ValueError("word length must equal n_len")
    return polar_transform(word)[..., code.info_set]


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    out = m + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return np.clip(out, -LLR_MAX, LLR_MAX)


def _g(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.clip(b + (1.0 - 2.0 * u) * a, -LLR_MAX, LLR_MAX)


def _sc_recurse(llr, start, u_out, frozen_mask, frozen_vals, flip_mask):
    n = llr.shape[-1]
    if n == 1:
        if frozen_mask[start]:
            u = frozen_vals[..., start]
        else:
            u = (llr[..., 0] < 0).astype(np.uint8)
            if flip_mask is not None:
                u = u ^ flip_mask[..., start]
        u_out[..., start] = u
        return u[..., None]
    h = n // 2
    a, b = llr[..., :h], llr[..., h:]
    xl = _sc_recurse(_f(a, b), start, u_out, frozen_mask, frozen_vals, flip_mask)
    xr = _sc_recurse(_g(a, b, xl.astype(np.float64)), start + h, u_out, frozen_mask, frozen_vals, flip_mask)
    return np.concatenate([xl ^ xr, xr], axis=-1)


def sc_decode_full(code: PolarCode, llrs: np.ndarray, frozen_vals=None, flip_mask=None):
    """Successive cancellation returning (u decisions, re-encoded codeword)."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape[-1] == code.e_len and code.e_len < code.n_len:
        pad = np.full(llrs.shape[:-1] + (code.n_len - code.e_len,), LLR_MAX)
        llrs = np.concatenate([llrs, pad], axis=-1)
    if llrs.shape[-1] != code.n_len:
        raise ValueError("LLR length mismatch")
    llrs = np.clip(llrs, -LLR_MAX, LLR_MAX)
    if frozen_vals is None:
        frozen_vals = np.zeros(llrs.shape[:-1] + (code.n_len,), dtype=np.uint8)
    u_out = np.zeros(llrs.shape[:-1] + (code.n_len,), dtype=np.uint8)
    cw = _sc_recurse(llrs, 0, u_out, code._frozen_mask, frozen_vals, flip_mask)
    return u_out, cw[..., : code.e_len]


def sc_decode(code: PolarCode, llrs: np.ndarray) -> np.ndarray:
    """SC estimate of the information bits (tie LLR = 0 decodes to 0)."""
    u, _ = sc_decode_full(code, llrs)
    return u[..., code.info_set]


def bsc_decode(code: PolarCode, observed: np.ndarray, p: float) -> np.ndarray:
    """SC decoding of hard bits through a BSC(p) likelihood model."""
    if not 0.0 < p < 0.5:
        raise ValueError("flip probability must be in (0, 0.5)")
    obs = np.asarray(observed, dtype=np.float64)
    l0 = min(np.log((1.0 - p) / p), LLR_MAX)
    return sc_decode(code, (1.0 - 2.0 * obs) * l0)


def genie_leaf_llrs(llrs: np.ndarray, u_true: np.ndarray) -> np.ndarray:
    """Leaf decision LLRs of an SC pass whose decisions are forced to u_true.

    This is what every leaf would see if all earlier decisions were correct;
    it drives both the Monte-Carlo construction and the source-codec encoder.
    """
    llrs = np.clip(np.asarray(llrs, dtype=np.float64), -LLR_MAX, LLR_MAX)
    u_true = np.asarray(u_true, dtype=np.uint8)

    def rec(llr, u):
        n = llr.shape[-1]
        if n == 1:
            return llr, u
        h = n // 2
        a, b = llr[..., :h], llr[..., h:]
        left, xl = rec(_f(a, b), u[..., :h])
        right, xr = rec(_g(a, b, xl.astype(np.float64)), u[..., h:])
        return np.concatenate([left, right], axis=-1), np.concatenate([xl ^ xr, xr], axis=-1)

    leaves, _ = rec(llrs, u_true)
    return leaves


# ---------------------------------------------------------------------------
# Reliability ordering: genie-aided Monte-Carlo, cached on disk.
# ---------------------------------------------------------------------------


def _cache_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get("PNC_SIM_CACHE")
    if env:
        dirs.append(Path(env))
    dirs.append(Path(__file__).parent / "data" / "polar_orders")
    dirs.append(Path.home() / ".cache" / "pncsim" / "polar_orders")
    return dirs


def _order_key(n_len: int, kind: str, design_param: float, e_len: int) -> str:
    return f"{kind}-n{n_len}-e{e_len}-d{design_param:.8g}".replace("+", "")


def _order_seed(key: str) -> int:
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "big")


def reliability_order(n_len: int, channel_kind: str, design_param: float, e_len: int = 0) -> np.ndarray:
    """Indices ordered most-reliable-first for (n_len, channel, design param).

    Computed by genie-aided Monte-Carlo over the all-zero codeword (1e5 trials,
    seed fixed by the cache key) and cached as a text file of indices.
    """
    e_len = e_len or n_len
    key = _order_key(n_len, channel_kind, design_param, e_len)
    fname = key + ".txt"
    for d in _cache_dirs():
        f = d / fname
        if f.is_file():
            order = np.loadtxt(f, dtype=np.int64)
            if order.shape == (n_len,):
                return order
    order = _mc_order(n_len, channel_kind, design_param, e_len)
    for d in _cache_dirs():
        try:
            d.mkdir(parents=True, exist_ok=True)
            np.savetxt(d / fname, order, fmt="%d")
            break
        except OSError:
            continue
    return order


def _mc_order(n_len: int, channel_kind: str, design_param: float, e_len: int) -> np.ndarray:
    print(f"pncsim: building polar reliability order {_order_key(n_len, channel_kind, design_param, e_len)}",
          file=sys.stderr)
    rng = np.random.Generator(np.random.PCG64(_order_seed(_order_key(n_len, channel_kind, design_param, e_len))))
    err = np.zeros(n_len, dtype=np.float64)
    done = 0
    while done < MC_TRIALS:
        t = min(_MC_CHUNK, MC_TRIALS - done)
        if channel_kind == "soft-awgn":
            sigma2 = design_param
            y = 1.0 + np.sqrt(sigma2) * rng.standard_normal((t, e_len))
            llr = 2.0 * y / sigma2
        elif channel_kind == "bsc":
            p = design_param
            l0 = min(np.log((1.0 - p) / p), LLR_MAX)
            flips = rng.random((t, e_len)) < p
            llr = np.where(flips, -l0, l0)
        else:
            raise ValueError(f"unknown channel kind {channel_kind!r}")
        if e_len < n_len:
            llr = np.concatenate([llr, np.full((t, n_len - e_len), LLR_MAX)], axis=-1)
        leaves = genie_leaf_llrs(llr, np.zeros((t, n_len), dtype=np.uint8))
        err += (leaves < 0).sum(axis=0) + 0.5 * (leaves == 0).sum(axis=0)
        done += t
    return np.argsort(err, kind="stable").astype(np.int64)


def construct_code(n_len: int, rate: float, design_param: float, channel_kind: str = "soft-awgn",
                   e_len: int = 0) -> PolarCode:
    """K = floor(rate * block) most reliable indices under the MC construction.

    ``block`` is the transmitted length (e_len for shortened codes), matching
    the floor arithmetic that reproduces the Table I/II payload totals.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    e_len = e_len or n_len
    k = floor(rate * e_len)
    if k == e_len == n_len:
        info = np.arange(n_len, dtype=np.int64)
    elif k == 0:
        info = np.zeros(0, dtype=np.int64)
    else:
        order = reliability_order(n_len, channel_kind, design_param, e_len)
        allowed = order[order < e_len] if e_len < n_len else order
        info = np.sort(allowed[:k])
    return PolarCode(n_len, info, design_param, channel_kind, e_len)

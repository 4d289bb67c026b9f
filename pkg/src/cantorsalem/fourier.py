"""Fourier analysis of Cantor-series step measures.

Sign convention: mu_hat(k) = integral of exp(-2 pi i k x) dmu(x).

For a level-n step measure with cells [c/Q, (c+1)/Q) of mass 1/P each,

    mu_hat(k) = (1/P) * sum_c exp(-i pi k (2c+1) / Q) * sinc(pi k / Q),

with sinc(u) = sin(u)/u.  Both trig arguments are reduced in exact integer
arithmetic before any float conversion: the phase integer k(2c+1) is
reduced mod 2Q and split as sign * residue with residue in [0, Q), and the
sinc numerator uses k mod Q with a parity sign.  Two consequences that the
diagnostics rely on:

  * phase error is independent of |k| and of the size of Q (Q can be a
    factorial-sized big integer and the phase stays accurate to an ulp);
  * aliased frequencies k and k + Q*l reuse bit-identical trig values, so
    the exact modulation identity (k + Ql) mu_hat(k + Ql) = k mu_hat(k)
    survives in floating point to machine precision, and mu_hat vanishes
    exactly at nonzero multiples of Q.

Cell sums use math.fsum (exactly rounded), so batch results do not depend
on chunking or thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np

from .cantor_tree import MeasureTree, Schedule, StepMeasure, level_intervals

DEFAULT_K_CAP = 1 << 20
_CHUNK = 2048

# int64 fast path: residues must convert to float64 exactly, and k*(2c+1)
# must not overflow int64 before the mod
_INT64_TWOQ_LIMIT = 1 << 53

_AT_ZERO_TOL = 1e-12
_HERMITIAN_TOL = 1e-12


def worker_count() -> int:
    """Worker cap from SALEM_THREADS; 0 or unset means automatic."""
    raw = os.environ.get("SALEM_THREADS", "0").strip()
    try:
        v = int(raw)
    except ValueError:
        raise ValueError(f"SALEM_THREADS must be an integer, got {raw!r}")
    if v < 0:
        raise ValueError("SALEM_THREADS must be >= 0")
    if v == 0:
        return min(8, os.cpu_count() or 1)
    return v


def _sinc_reduced(k: int, Q: int) -> float:
    """sin(pi k/Q) / (pi k/Q) with the numerator argument reduced mod Q.

    Exactly 0.0 at nonzero multiples of Q and exactly 1.0 at k = 0; for
    astronomically large Q the ratio underflows and the limit value 1.0 is
    returned.
    """
    if k == 0:
        return 1.0
    r = k % Q
    if r == 0:
        return 0.0
    ratio = k / Q  # big-int true division is correctly rounded
    if ratio == 0.0:
        return 1.0
    # symmetric remainder keeps the sine argument away from pi, where the
    # small result would carry a large relative error
    if 2 * r > Q:
        s = -math.sin(math.pi * ((r - Q) / Q))
    else:
        s = math.sin(math.pi * (r / Q))
    if (k // Q) & 1:
        s = -s
    return s / (math.pi * ratio)


def interval_ft(c: int, Q: int, k: int) -> complex:
    """Exact-phase transform of one cell: integral over [c/Q, (c+1)/Q).

    Value is (1/Q) exp(-2 pi i k (2c+1)/(2Q)) sinc(pi k/Q).  The phase
    integer k(2c+1) is reduced mod 2Q before float conversion.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if not 0 <= c < Q:
        raise ValueError(f"offset {c} outside [0, {Q})")
    u = (k * (2 * c + 1)) % (2 * Q)
    sign = 1.0
    if u >= Q:
        u -= Q
        sign = -1.0
    ang = math.pi * (u / Q)
    s = _sinc_reduced(k, Q)
    inv_q = 1 / Q
    return complex(sign * math.cos(ang) * s * inv_q, -sign * math.sin(ang) * s * inv_q)


class _LevelEvaluator:
    """Per-level kernel: mu_hat at one frequency, int64-vectorized when safe.

    Route selection is a pure function of (k, Q), so a frequency always
    takes the same path no matter how a batch is composed; this keeps
    scalar and batch evaluation bit-equal.
    """

    def __init__(self, step: StepMeasure):
        self.Q = step.Q
        self.two_q = 2 * step.Q
        self.P = step.cell_count
        self.offsets = step.offsets
        self.int64_ok = self.two_q <= _INT64_TWOQ_LIMIT
        if self.int64_ok:
            self.k_limit = ((1 << 63) - 1) // self.two_q
            self.cp1 = np.array([2 * c + 1 for c in step.offsets], dtype=np.int64)
            self.q_float = float(self.Q)
        else:
            self.k_limit = -1

    def __call__(self, k: int) -> complex:
        if k == 0:
            return complex(1.0, 0.0)
        if self.int64_ok and -self.k_limit <= k <= self.k_limit:
            sr, si = self._terms_int64(k)
        else:
            sr, si = self._terms_bigint(k)
        s = _sinc_reduced(k, self.Q)
        return complex((sr * s) / self.P, (si * s) / self.P)

    def _terms_int64(self, k: int) -> Tuple[float, float]:
        u = (k * self.cp1) % self.two_q
        neg = u >= self.Q
        u = np.where(neg, u - self.Q, u)
        ang = np.pi * (u.astype(np.float64) / self.q_float)
        sign = np.where(neg, -1.0, 1.0)
        re_terms = sign * np.cos(ang)
        im_terms = -(sign * np.sin(ang))
        return math.fsum(re_terms.tolist()), math.fsum(im_terms.tolist())

    def _terms_bigint(self, k: int) -> Tuple[float, float]:
        re_terms: List[float] = []
        im_terms: List[float] = []
        q = self.Q
        two_q = self.two_q
        for c in self.offsets:
            u = (k * (2 * c + 1)) % two_q
            sign = 1.0
            if u >= q:
                u -= q
                sign = -1.0
            ang = math.pi * (u / q)
            re_terms.append(sign * math.cos(ang))
            im_terms.append(-sign * math.sin(ang))
        return math.fsum(re_terms), math.fsum(im_terms)


@dataclass(frozen=True)
class FourierCoeffs:
    """Coefficients of one level, keyed by integer frequency.

    Construction validates the two cheap exactness contracts: the value at
    k = 0 is 1 within 1e-12, and conjugate pairs are Hermitian within
    1e-12 whenever both frequencies are present.
    """

    level: int
    ks: Tuple[int, ...]
    values: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.ks) != len(self.values):
            raise ValueError("ks and values length mismatch")
        by_k = {}
        for k, v in zip(self.ks, self.values):
            by_k[k] = v
        object.__setattr__(self, "_by_k", by_k)
        v0 = by_k.get(0)
        if v0 is not None and abs(v0 - 1.0) > _AT_ZERO_TOL:
            raise ValueError(f"value at k = 0 is {v0}, expected 1")
        for k, v in by_k.items():
            if k > 0 and -k in by_k:
                if abs(by_k[-k] - v.conjugate()) > _HERMITIAN_TOL:
                    raise ValueError(f"Hermitian symmetry violated at k = {k}")

    def value(self, k: int) -> complex:
        return self._by_k[k]

    def __len__(self) -> int:
        return len(self.ks)


def mu_hat(tree: MeasureTree, n: int, k: int) -> complex:
    """Level-n coefficient at one frequency; delegates to the batch kernel."""
    return mu_hat_batch(tree, n, (k,)).values[0]


def mu_hat_batch(
    tree: MeasureTree,
    n: int,
    k_set: Iterable[int],
    workers: Optional[int] = None,
) -> FourierCoeffs:
    """Coefficients for every frequency in k_set, in the given order.

    Results equal per-frequency mu_hat calls bit for bit regardless of
    chunking or worker count: each frequency is evaluated by an identical
    fixed-shape kernel and summed with fsum.
    """
    ks = [int(k) for k in k_set]
    step = level_intervals(tree, n)
    ev = _LevelEvaluator(step)
    if workers is None:
        workers = worker_count()
    if workers <= 1 or len(ks) < 2 * _CHUNK:
        values = [ev(k) for k in ks]
    else:
        chunks = [ks[i:i + _CHUNK] for i in range(0, len(ks), _CHUNK)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda chunk: [ev(k) for k in chunk], chunks)
            values = [v for part in parts for v in part]
    return FourierCoeffs(n, tuple(ks), tuple(values))


def write_coeffs_csv(coeffs: FourierCoeffs, path: str) -> None:
    """CSV with header k,re,im,abs; rows in ascending frequency order."""
    rows = sorted(zip(coeffs.ks, coeffs.values))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,re,im,abs\n")
        for k, v in rows:
            fh.write(f"{k},{v.real!r},{v.imag!r},{abs(v)!r}\n")


@dataclass(frozen=True)
class DecayProfile:
    """Dyadic-band suprema with a fitted power-law envelope.

    sigma_hat = -2 * slope of the least-squares line through
    (log 2^b, log sup_b); C_hat = exp(intercept).  Bands whose sup is
    exactly zero are excluded from the fit and listed in excluded_bands.
    When every band sup is at most 1e-12 the fit is skipped and flat_zero
    is set.
    """

    k_min: int
    band_lows: Tuple[int, ...]
    band_sups: Tuple[float, ...]
    sigma_hat: Optional[float]
    C_hat: Optional[float]
    flat_zero: bool
    excluded_bands: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(s < 0 for s in self.band_sups):
            raise ValueError("band sups must be non-negative")
        if len(self.band_lows) != len(self.band_sups):
            raise ValueError("band arrays length mismatch")


_FLAT_ZERO_TOL = 1e-12


def decay_profile(coeffs: FourierCoeffs, k_min: int = 1) -> DecayProfile:
    """Fit |value| against the dyadic-band envelope above k_min.

    A band [2^b, 2^(b+1)) participates only when every integer frequency
    in it is present (positive frequencies; the transform is Hermitian).
    Requires at least three complete bands.
    """
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    present = {k: abs(v) for k, v in zip(coeffs.ks, coeffs.values) if k > 0}
    if not present:
        raise ValueError("no positive frequencies")
    k_top = max(present)
    band_lows: List[int] = []
    band_sups: List[float] = []
    b = 0
    while (1 << b) <= k_top:
        lo, hi = 1 << b, 1 << (b + 1)
        b += 1
        if lo < k_min or hi - 1 > k_top:
            continue
        sup = -1.0
        complete = True
        for k in range(lo, hi):
            a = present.get(k)
            if a is None:
                complete = False
                break
            if a > sup:
                sup = a
        if complete:
            band_lows.append(lo)
            band_sups.append(sup)
    if len(band_lows) < 3:
        raise ValueError(f"need >= 3 complete dyadic bands above k_min, got {len(band_lows)}")

    if all(s <= _FLAT_ZERO_TOL for s in band_sups):
        return DecayProfile(k_min, tuple(band_lows), tuple(band_sups), None, None, True)

    excluded = tuple(lo for lo, s in zip(band_lows, band_sups) if s == 0.0)
    fit_pairs = [(lo, s) for lo, s in zip(band_lows, band_sups) if s > 0.0]
    if len(fit_pairs) < 2:
        raise ValueError("not enough nonzero bands to fit a line")
    xs = np.log([float(lo) for lo, _ in fit_pairs])
    ys = np.log([s for _, s in fit_pairs])
    slope, intercept = np.polyfit(xs, ys, 1)
    return DecayProfile(
        k_min,
        tuple(band_lows),
        tuple(band_sups),
        float(-2.0 * slope),
        float(math.exp(intercept)),
        False,
        excluded,
    )


def modulation_check(tree: MeasureTree, n: int, k: int, ell: int) -> float:
    """Relative defect of (k + Q l) mu_hat(k + Q l) = k mu_hat(k)."""
    if ell == 0:
        raise ValueError("ell must be nonzero")
    q = tree.schedule.Q(n)
    if not -q < k < q:
        raise ValueError(f"need |k| < Q_n = {q}")
    coeffs = mu_hat_batch(tree, n, (k, k + q * ell))
    base = k * coeffs.values[0]
    shifted = (k + q * ell) * coeffs.values[1]
    return abs(shifted - base) / max(1.0, abs(base))


def hoeffding_bound(kappa: float, R: float, J: int) -> float:
    """Tail bound 4 exp(-kappa^2 / (4 R^2 J)); may exceed 1 (vacuous)."""
    if kappa <= 0 or R <= 0:
        raise ValueError("kappa and R must be positive")
    if J < 1:
        raise ValueError("J must be >= 1")
    return 4.0 * math.exp(-(kappa * kappa) / (4.0 * R * R * J))


@dataclass(frozen=True)
class IncrementBound:
    """Theoretical per-frequency bound for the level n -> n+1 increment."""

    level: int
    sigma: float
    per_k: float
    union_proxy: float  # min(1, 2 Q_{n+1} * per_k)


def increment_bound(schedule: Schedule, n: int, sigma: float) -> IncrementBound:
    """Concentration bound 4 exp(-L^2 P Q^(-sigma) / (16 M^(2+sigma))).

    Here L and M belong to the refining level and P, Q to the coarse one.
    The exponent is evaluated in log space with 50-digit arithmetic since
    Q can be far beyond double-precision range.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if not 0 <= n < schedule.depth_limit:
        raise ValueError(f"no transition at level {n}")
    L = schedule.L[n]
    M = schedule.M[n]
    P = schedule.P(n)
    Q = schedule.Q(n)
    q_next = schedule.Q(n + 1)
    with mp.workdps(50):
        s = mp.mpf(sigma)
        log_mag = 2 * mp.log(L) + mp.log(P) - s * mp.log(Q) - mp.log(16) - (2 + s) * mp.log(M)
        per_k = 4 * mp.exp(-mp.exp(log_mag))
        proxy = min(mp.mpf(1), 2 * mp.mpf(q_next) * per_k)
        return IncrementBound(n, float(sigma), float(per_k), float(proxy))


@dataclass(frozen=True)
class IncrementReport:
    """Observed martingale increments |mu_hat_{n+1}(k) - mu_hat_n(k)|.

    Only positive frequencies are evaluated; Hermitian symmetry makes the
    increment at -k identical, so scanned and exceedance counts are
    doubled to cover 0 < |k| < Q_{n+1}.
    """

    level: int
    sigma: float
    threshold: float  # Q_{n+1}^(-sigma/2)
    k_cap: int
    ks: Tuple[int, ...]
    increments: Tuple[float, ...]
    scanned: int
    exceedances: int
    max_increment: float
    bound: IncrementBound
    coverage: float

    def __post_init__(self):
        if self.exceedances > self.scanned:
            raise ValueError("exceedance count cannot exceed scanned count")


def increment_scan(
    tree: MeasureTree,
    n: int,
    sigma: float,
    k_cap: int = DEFAULT_K_CAP,
    workers: Optional[int] = None,
) -> IncrementReport:
    """Scan 0 < |k| < Q_{n+1} (capped) for increments above Q_{n+1}^(-sigma/2)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n + 1 > tree.depth:
        raise ValueError(f"need depth >= {n + 1}, have {tree.depth}")
    if k_cap < 1:
        raise ValueError("k_cap must be >= 1")
    q_next = tree.schedule.Q(n + 1)
    k_hi = min(q_next - 1, k_cap)
    ks = range(1, k_hi + 1)
    coarse = mu_hat_batch(tree, n, ks, workers)
    fine = mu_hat_batch(tree, n + 1, ks, workers)
    increments = tuple(abs(f - c) for f, c in zip(fine.values, coarse.values))
    threshold = math.exp(-0.5 * sigma * math.log(q_next)) if q_next > 1 else 1.0
    exceed = sum(1 for d in increments if d > threshold)
    cov = k_hi / (q_next - 1) if q_next > 1 else 1.0
    return IncrementReport(
        level=n,
        sigma=float(sigma),
        threshold=threshold,
        k_cap=k_cap,
        ks=tuple(ks),
        increments=increments,
        scanned=2 * k_hi,
        exceedances=2 * exceed,
        max_increment=max(increments, default=0.0),
        bound=increment_bound(tree.schedule, n, sigma),
        coverage=cov,
    )


def tail_envelope(schedule: Schedule, sigma: float, n1: int) -> float:
    """Telescoped tail envelope 4 Q_{n1}^(-sigma/2) for |k| >= Q_{n1}."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if not 0 <= n1 <= schedule.depth_limit:
        raise ValueError(f"level {n1} outside schedule")
    for i in range(len(schedule.M)):
        assert schedule.M[i] >= 2, "resolution must at least double per level"
    q = schedule.Q(n1)
    if q == 1:
        return 4.0
    return 4.0 * math.exp(-0.5 * sigma * math.log(q))

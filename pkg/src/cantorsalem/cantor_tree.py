"""Seeded hierarchical construction of Cantor-series step measures.

Level n splits [0, 1) into cells of width 1/(M_1...M_n) along the
mixed-radix (Cantor series) expansion.  A schedule fixes per-level bases
M_n and surviving-child counts L_n with 1 <= L_n <= M_n.  A measure tree
realizes, for every surviving node, a translation derived purely from
(seed, path); the node's children are the translated base residue set when
L_n > 1 and the bare singleton {translation} when L_n = 1.  The level-n
step measure puts mass 1/(L_1...L_n) on each of the P_n = L_1...L_n
surviving cells, so total mass is exactly one at every level.

All interval geometry is exact: offsets are big integers over the big
integer denominator Q_n = M_1...M_n, masses are Fractions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath as mp

from .discrete_ap import ResidueSet, max_property_ii, property_ii_oracle

NodePath = Tuple[int, ...]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# exponent denominators up to this size are compared by exact integer powering
_EXACT_POW_DENOM = 64
_LOG_GUARD = 1e-12


class TreeLoadError(Exception):
    """Raised when a serialized tree violates the schema or its invariants."""


@dataclass(frozen=True)
class Schedule:
    """Per-level bases M, child counts L, and base residue sets.

    Sequences are 0-indexed: digit i of a path ranges over [0, M[i]) and a
    node with i digits has L[i] children.  base_sets[i] is the residue set
    translated at digit i; it is required (with modulus M[i] and size L[i])
    whenever L[i] > 1 and optional when L[i] == 1.
    """

    variant: str  # "A" | "B" | "custom"
    M: Tuple[int, ...]
    L: Tuple[int, ...]
    base_sets: Tuple[Optional[ResidueSet], ...]
    t: Optional[Fraction] = None

    def __post_init__(self):
        if self.variant not in ("A", "B", "custom"):
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "M", tuple(int(m) for m in self.M))
        object.__setattr__(self, "L", tuple(int(x) for x in self.L))
        object.__setattr__(self, "base_sets", tuple(self.base_sets))
        if not (len(self.M) == len(self.L) == len(self.base_sets)):
            raise ValueError("M, L, base_sets must have equal length")
        for i, (m, x, bs) in enumerate(zip(self.M, self.L, self.base_sets)):
            if m < 2:
                raise ValueError(f"level {i}: base must be >= 2")
            if not 1 <= x <= m:
                raise ValueError(f"level {i}: need 1 <= L <= M")
            if bs is not None:
                if bs.modulus != m:
                    raise ValueError(f"level {i}: base set modulus {bs.modulus} != {m}")
                if len(bs) != x:
                    raise ValueError(f"level {i}: |base set| = {len(bs)} != L = {x}")
            elif x > 1:
                raise ValueError(f"level {i}: L > 1 requires a base set")
        if self.variant == "A":
            if self.t is None:
                raise ValueError("variant A requires t")
            if not isinstance(self.t, Fraction):
                object.__setattr__(self, "t", _as_fraction(self.t))
            if self.M and any(m != self.M[0] for m in self.M):
                raise ValueError("variant A uses a constant base")
        else:
            if self.t is not None:
                raise ValueError("t is only meaningful for variant A")
        if self.variant == "B":
            for i, m in enumerate(self.M):
                if m != (2 if i == 0 else i + 1):
                    raise ValueError("variant B bases must be 2, 2, 3, 4, ...")

    @property
    def depth_limit(self) -> int:
        return len(self.M)

    def Q(self, n: int) -> int:
        """Resolution denominator M_1...M_n of level n."""
        if not 0 <= n <= len(self.M):
            raise ValueError(f"level {n} outside schedule")
        return math.prod(self.M[:n])

    def P(self, n: int) -> int:
        """Surviving cell count L_1...L_n of level n."""
        if not 0 <= n <= len(self.L):
            raise ValueError(f"level {n} outside schedule")
        return math.prod(self.L[:n])


def _as_fraction(t) -> Fraction:
    # str() round-trip keeps decimal literals exact (0.4 -> 2/5, not the
    # nearest binary double)
    if isinstance(t, Fraction):
        return t
    if isinstance(t, float):
        return Fraction(str(t))
    return Fraction(t)


def _cmp_pow(P: int, M: int, e: Fraction, scale: int = 1) -> int:
    """Sign of P - scale * M**e for exact integers P, M, scale and rational e.

    Small exponent denominators are settled by exact integer cross-powering.
    Otherwise compare logarithms in double precision, escalating to 60-digit
    arithmetic when the two sides are within the guard band; near-ties must
    never be decided by rounding error.
    """
    if P <= 0 or M < 1 or scale < 1:
        raise ValueError("positive integers required")
    q = e.denominator
    if q <= _EXACT_POW_DENOM:
        lhs = P ** q
        rhs = (scale ** q) * M ** e.numerator
        return (lhs > rhs) - (lhs < rhs)
    lhs_log = math.log(P)
    rhs_log = math.log(scale) + float(e) * math.log(M)
    if abs(lhs_log - rhs_log) > _LOG_GUARD * max(1.0, abs(rhs_log)):
        return 1 if lhs_log > rhs_log else -1
    with mp.workdps(60):
        diff = mp.log(P) - mp.log(scale) - mp.mpf(e.numerator) / e.denominator * mp.log(M)
        if diff > 0:
            return 1
        if diff < 0:
            return -1
        return 0


def schedule_a(M: int, X: ResidueSet, t, n_max: int) -> Schedule:
    """Constant-base schedule keeping P_n within [M^(nt), |X| M^(nt)).

    Level 1 keeps all of X; afterwards level n+1 keeps X again while
    P_n < M^((n+1)t) and collapses to a single random child otherwise.
    Requires |X| > M^t strictly (else the recurrence degenerates) and that
    X carries the structural no-spanning-progression certificate.
    """
    t = _as_fraction(t)
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if M < 2:
        raise ValueError("base must be >= 2")
    if X.modulus != M:
        raise ValueError("base set modulus must equal M")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if _cmp_pow(len(X), M, t) <= 0:
        raise ValueError(f"need |X| > M^t; got |X| = {len(X)}, M^t = {M}^{float(t)}")
    verdict = property_ii_oracle(X)
    if not verdict.holds:
        raise ValueError(f"base set admits a spanning progression, witness {verdict.witness.as_tuple()}")

    L: List[int] = [len(X)]
    P = len(X)
    for n in range(1, n_max):
        if _cmp_pow(P, M, (n + 1) * t) < 0:
            L.append(len(X))
            P *= len(X)
        else:
            L.append(1)
    P = 1
    for n in range(1, n_max + 1):
        P *= L[n - 1]
        assert _cmp_pow(P, M, n * t) >= 0, "lower envelope violated"
        assert _cmp_pow(P, M, n * t, scale=len(X)) < 0, "upper envelope violated"

    base_sets = tuple(X if x > 1 else None for x in L)
    return Schedule("A", (M,) * n_max, tuple(L), base_sets, t)


def schedule_b(n_max: int) -> Schedule:
    """Factorial-type schedule: bases 2, 2, 3, 4, ..., n_max.

    Each level keeps a maximum-size (exact below the search threshold,
    heuristic above) residue set free of spanning progressions; the child
    count is whatever size that search achieves.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    M = tuple(2 if i == 0 else i + 1 for i in range(n_max))
    base_sets = tuple(max_property_ii(m) for m in M)
    L = tuple(len(bs) for bs in base_sets)
    return Schedule("B", M, L, base_sets)


def custom_schedule(M: int, X: ResidueSet, n_max: int) -> Schedule:
    """Constant-base schedule keeping the translates of X at every level.

    No structural certificate is required; this is the entry point for
    negative controls and for uniform (full residue set) trees.
    """
    if X.modulus != M:
        raise ValueError("base set modulus must equal M")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return Schedule("custom", (M,) * n_max, (len(X),) * n_max, (X,) * n_max)


def _mix64(z: int) -> int:
    """Finalizer of the splitmix64 generator; bijective on 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _path_state(seed: int, path: Sequence[int]) -> int:
    state = _mix64(seed & _MASK64)
    for d in path:
        state = _mix64(state ^ ((d + 1) * _GOLDEN & _MASK64))
    return state


def derive_translation(seed: int, path: Sequence[int], M: int) -> int:
    """Uniform draw from [0, M), a pure function of (seed, path, M).

    The path digits are folded into a splitmix64 state; words are then
    drawn from the splitmix64 stream at that state and rejection-sampled
    so every residue has probability exactly 1/M over the word space.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if M == 1:
        return 0
    state = _path_state(seed, path)
    limit = (1 << 64) - ((1 << 64) % M)
    while True:
        state = (state + _GOLDEN) & _MASK64
        word = _mix64(state)
        if word < limit:
            return word % M


def derive_run_seed(master_seed: int, index: int) -> int:
    """Per-run seed for multi-seed experiments; pure and collision-mixed."""
    if index < 0:
        raise ValueError("index must be >= 0")
    return _mix64((master_seed + (index + 1) * _GOLDEN) & _MASK64)


@dataclass
class MeasureTree:
    """Realized random subtree: one translation per internal node.

    Immutable by convention after construction; all queries are read-only.
    `translations` maps each realized node path (levels 0 to depth-1) to
    its translation in [0, M[level]).
    """

    schedule: Schedule
    seed: int
    depth: int
    translations: Dict[NodePath, int] = field(repr=False)

    def children_of(self, path: NodePath) -> Tuple[int, ...]:
        """Sorted surviving digits below the given realized node."""
        level = len(path)
        if level >= self.depth:
            raise ValueError(f"node at level {level} has no realized children (depth {self.depth})")
        ell = self.translations[tuple(path)]
        base = self.schedule.base_sets[level]
        if self.schedule.L[level] == 1:
            return (ell,)
        return tuple(sorted((x + ell) % self.schedule.M[level] for x in base.elements))

    def nodes_at_level(self, n: int) -> List[NodePath]:
        """All realized paths of length n, in lexicographic order."""
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} not realized (depth {self.depth})")
        nodes: List[NodePath] = [()]
        for _ in range(n):
            nodes = [p + (d,) for p in nodes for d in self.children_of(p)]
        return nodes

    def is_realized(self, path: Sequence[int]) -> bool:
        path = tuple(path)
        if len(path) > self.depth:
            raise ValueError(f"path deeper than realized depth {self.depth}")
        for i, d in enumerate(path):
            if not 0 <= d < self.schedule.M[i]:
                raise ValueError(f"digit {d} out of range at position {i}")
            if d not in self.children_of(path[:i]):
                return False
        return True


def build_tree(schedule: Schedule, seed: int, depth: int) -> MeasureTree:
    """Realize translations for every node of levels 0..depth-1."""
    if not 0 <= depth <= schedule.depth_limit:
        raise ValueError(f"depth {depth} exceeds schedule length {schedule.depth_limit}")
    translations: Dict[NodePath, int] = {}
    frontier: List[NodePath] = [()]
    for level in range(depth):
        m = schedule.M[level]
        base = schedule.base_sets[level]
        nxt: List[NodePath] = []
        for path in frontier:
            ell = derive_translation(seed, path, m)
            translations[path] = ell
            if schedule.L[level] == 1:
                nxt.append(path + (ell,))
            else:
                for x in base.elements:
                    nxt.append(path + ((x + ell) % m,))
        frontier = nxt
        assert len(frontier) == schedule.P(level + 1), "realized node count != P_n"
    return MeasureTree(schedule, seed, depth, translations)


def interval_of(path: Sequence[int], schedule: Schedule) -> Tuple[int, int]:
    """Exact cell [c/Q, (c+1)/Q) of a path: returns (c, Q) as big integers."""
    path = tuple(path)
    if len(path) > schedule.depth_limit:
        raise ValueError("path longer than schedule")
    c = 0
    q = 1
    for i, d in enumerate(path):
        m = schedule.M[i]
        if not 0 <= d < m:
            raise ValueError(f"digit {d} out of range at position {i}")
        c = c * m + d
        q *= m
    return c, q


@dataclass(frozen=True)
class StepMeasure:
    """Level-n step measure: equal mass on disjoint width-1/Q cells."""

    level: int
    Q: int
    offsets: Tuple[int, ...]  # strictly increasing numerators in [0, Q)
    mass_per_cell: Fraction

    def __post_init__(self):
        prev = -1
        for c in self.offsets:
            if not 0 <= c < self.Q:
                raise ValueError("offset out of range")
            if c <= prev:
                raise ValueError("offsets must be strictly increasing")
            prev = c
        if len(self.offsets) * self.mass_per_cell != 1:
            raise ValueError("total mass must be exactly one")

    @property
    def cell_count(self) -> int:
        return len(self.offsets)


def level_intervals(tree: MeasureTree, n: int) -> StepMeasure:
    """The P_n surviving cells of level n, sorted by offset."""
    if not 0 <= n <= tree.depth:
        raise ValueError(f"level {n} exceeds realized depth {tree.depth}")
    q = tree.schedule.Q(n)
    offsets = sorted(interval_of(p, tree.schedule)[0] for p in tree.nodes_at_level(n))
    return StepMeasure(n, q, tuple(offsets), Fraction(1, tree.schedule.P(n)))


def cell_mass(tree: MeasureTree, path: Sequence[int]) -> Fraction:
    """Exact mass of the path's cell: 1/P_n if surviving, else 0."""
    if tree.is_realized(path):
        return Fraction(1, tree.schedule.P(len(path)))
    return Fraction(0)


# --- persistence ---

_VERSION = 1


def _t_to_json(t: Optional[Fraction]):
    if t is None:
        return None
    f = float(t)
    # decimal literals survive the float round-trip; anything else is kept
    # exact as a "p/q" string
    if Fraction(str(f)) == t:
        return f
    return f"{t.numerator}/{t.denominator}"


def _t_from_json(v) -> Optional[Fraction]:
    if v is None:
        return None
    if isinstance(v, str):
        num, _, den = v.partition("/")
        return Fraction(int(num), int(den or "1"))
    if isinstance(v, (int, float)):
        return Fraction(str(v))
    raise TreeLoadError(f"cannot parse t from {v!r}")


def _path_key(path: NodePath) -> str:
    return ".".join(str(d) for d in path)


def _key_path(key: str) -> NodePath:
    if key == "":
        return ()
    try:
        return tuple(int(part) for part in key.split("."))
    except ValueError as exc:
        raise TreeLoadError(f"malformed path key {key!r}") from exc


def tree_to_dict(tree: MeasureTree, materialize_translations: bool = True) -> dict:
    sched = tree.schedule
    doc = {
        "version": _VERSION,
        "variant": sched.variant,
        "seed": tree.seed,
        "depth": tree.depth,
        "t": _t_to_json(sched.t),
        "M": list(sched.M),
        "L": list(sched.L),
        "base_sets": [
            None if bs is None else {"m": bs.modulus, "elements": list(bs.elements), "method": bs.method}
            for bs in sched.base_sets
        ],
    }
    if materialize_translations:
        doc["translations"] = {_path_key(p): ell for p, ell in sorted(tree.translations.items())}
    return doc


def tree_from_dict(doc: dict) -> MeasureTree:
    if not isinstance(doc, dict):
        raise TreeLoadError("tree document must be a JSON object")
    if doc.get("version") != _VERSION:
        raise TreeLoadError(f"unsupported version {doc.get('version')!r}")
    for key in ("variant", "seed", "depth", "M", "L", "base_sets"):
        if key not in doc:
            raise TreeLoadError(f"missing key {key!r}")
    try:
        base_sets = tuple(
            None if e is None else ResidueSet(int(e["m"]), tuple(e["elements"]), e.get("method"))
            for e in doc["base_sets"]
        )
        schedule = Schedule(doc["variant"], tuple(doc["M"]), tuple(doc["L"]), base_sets, _t_from_json(doc.get("t")))
    except (ValueError, KeyError, TypeError) as exc:
        raise TreeLoadError(f"invalid schedule: {exc}") from exc
    seed = doc["seed"]
    depth = doc["depth"]
    if not isinstance(seed, int) or not isinstance(depth, int):
        raise TreeLoadError("seed and depth must be integers")
    if not 0 <= depth <= schedule.depth_limit:
        raise TreeLoadError(f"depth {depth} exceeds schedule length {schedule.depth_limit}")

    if "translations" not in doc:
        return build_tree(schedule, seed, depth)

    raw = doc["translations"]
    if not isinstance(raw, dict):
        raise TreeLoadError("translations must be a map")
    translations: Dict[NodePath, int] = {}
    for key, ell in raw.items():
        path = _key_path(key)
        if not isinstance(ell, int):
            raise TreeLoadError(f"translation at {key!r} must be an integer")
        translations[path] = ell
    tree = MeasureTree(schedule, seed, depth, translations)
    # walk the realized subtree: every internal node must carry an
    # in-range translation, and no unreachable entries may remain
    frontier: List[NodePath] = [()]
    seen = 0
    for level in range(depth):
        m = schedule.M[level]
        nxt: List[NodePath] = []
        for path in frontier:
            if path not in translations:
                raise TreeLoadError(f"missing translation for node {_path_key(path)!r}")
            ell = translations[path]
            if not 0 <= ell < m:
                raise TreeLoadError(f"translation {ell} out of range [0, {m}) at {_path_key(path)!r}")
            seen += 1
            nxt.extend(path + (d,) for d in tree.children_of(path))
        frontier = nxt
        if len(frontier) != schedule.P(level + 1):
            raise TreeLoadError(f"level {level + 1} has {len(frontier)} nodes, expected {schedule.P(level + 1)}")
    if seen != len(translations):
        raise TreeLoadError("translations contain entries for unrealized nodes")
    return tree


def save_tree(tree: MeasureTree, path: str, materialize_translations: bool = True) -> None:
    doc = tree_to_dict(tree, materialize_translations)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_tree(path: str) -> MeasureTree:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TreeLoadError(f"not valid JSON: {exc}") from exc
    return tree_from_dict(doc)

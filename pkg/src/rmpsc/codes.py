"""Code construction: reliability orders, RM-polar codes, length doubling,
symmetry-maximising search, and minimum-weight counting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _gf2, _kernels
from .monomials import (
    GeneratorSet,
    evaluate_monomial,
    minimal_generators,
    monomial_from_index,
    reduce_to_antichain,
    upward_closure,
    _mask_leq,
)

__all__ = [
    "CodeSpec",
    "ReliabilityOrder",
    "dim_rm",
    "rm_order",
    "beta_expansion_reliability",
    "load_reliability",
    "rm_polar_construct",
    "extend_code",
    "search_rm_psc",
    "count_min_weight_codewords",
    "min_weight_count_via_dual",
    "weight_distribution_via_dual",
]


def dim_rm(r: int, n: int) -> int:
    """Dimension of the order-r Reed-Muller code of length 2^n (0 for r < 0)."""
    return sum(math.comb(n, d) for d in range(0, r + 1))


def rm_order(k: int, n: int) -> int:
    """Smallest r whose order-r Reed-Muller dimension reaches k."""
    if not 1 <= k <= (1 << n):
        raise ValueError(f"dimension {k} out of range for n={n}")
    r = 0
    while dim_rm(r, n) < k:
        r += 1
    return r


class CodeSpec:
    """A decreasing monomial code, described by its minimal generator indices.

    The information set is the upward closure of ``i_min`` in the index
    order; the generator monomials are the monomials of those indices.
    """

    def __init__(self, i_min, n: int, _info_set=None):
        self.n = int(n)
        self.N = 1 << self.n
        gens = reduce_to_antichain(i_min, self.n)
        if not gens:
            raise ValueError("a code needs at least one generator index")
        self.i_min = tuple(sorted(gens))
        self.info_set = (
            frozenset(_info_set) if _info_set is not None else upward_closure(gens, self.n)
        )
        self.K = len(self.info_set)
        self.gen_set = GeneratorSet.from_indices(self.info_set, self.n)

    @classmethod
    def from_i_min(cls, i_min, n: int) -> "CodeSpec":
        return cls(i_min, n)

    @classmethod
    def from_info_set(cls, info_set, n: int) -> "CodeSpec":
        info = frozenset(int(i) for i in info_set)
        gens = minimal_generators(info, n)  # raises if not closed
        return cls(gens, n, _info_set=info)

    # -- derived quantities ------------------------------------------------

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def frozen_set(self) -> frozenset[int]:
        return frozenset(range(self.N)) - self.info_set

    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=np.uint8)
        mask[sorted(self.info_set)] = 0
        return mask

    @property
    def min_distance(self) -> int:
        max_deg = max(monomial_from_index(i, self.n).degree for i in self.i_min)
        return 1 << (self.n - max_deg)

    @property
    def symmetry(self) -> int:
        from .monomials import symmetry as _symmetry

        return _symmetry(self.gen_set, check=False)

    @property
    def is_rm_polar(self) -> bool:
        """True when the code meets the best minimum distance for its dimension."""
        return self.min_distance == 1 << (self.n - rm_order(self.K, self.n))

    @property
    def is_partially_symmetric(self) -> bool:
        return 2 <= self.symmetry <= self.n - 1

    @property
    def extreme_dimension(self) -> bool:
        """Dimensions below the first-order or above the (n-2)-order
        Reed-Muller dimension; their SC absorption groups are very large."""
        return self.K < dim_rm(1, self.n) or self.K > dim_rm(self.n - 2, self.n)

    @property
    def uses_every_variable(self) -> bool:
        """False when some variable appears in no generator monomial; the
        code is then a shorter code replicated across the unused coordinates
        and permutations of those coordinates never change decoding."""
        from .monomials import derivative_dimensions

        return derivative_dimensions(self.gen_set)[-1] > 0

    # -- matrices ------------------------------------------------------------

    def generator_rows(self) -> np.ndarray:
        """(K, N) evaluation rows, information indices ascending."""
        return np.stack(
            [evaluate_monomial(monomial_from_index(i, self.n)) for i in sorted(self.info_set)]
        )

    def generator_rows_packed(self) -> list[int]:
        return [_gf2.pack_row(r) for r in self.generator_rows()]

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "i_min": list(self.i_min)})

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        obj = json.loads(text)
        return cls(obj["i_min"], int(obj["n"]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "CodeSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def __eq__(self, other):
        return (
            isinstance(other, CodeSpec) and self.n == other.n and self.info_set == other.info_set
        )

    def __hash__(self):
        return hash((self.n, self.info_set))

    def __repr__(self):
        return f"CodeSpec(N={self.N}, K={self.K}, i_min={list(self.i_min)})"


# --------------------------------------------------------------- reliability


@dataclass(frozen=True)
class ReliabilityOrder:
    """Permutation of the bit-channel indices, least to most reliable."""

    n: int
    order: tuple[int, ...]
    _consistent: list = field(default_factory=lambda: [None], repr=False, compare=False)

    def __post_init__(self):
        if sorted(self.order) != list(range(1 << self.n)):
            raise ValueError("order must be a permutation of all channel indices")

    @property
    def upo_consistent(self) -> bool:
        """Whether a channel is always ranked at least as reliable as every
        channel below it in the index order (checked once, then cached)."""
        if self._consistent[0] is None:
            self._consistent[0] = self._check_consistency()
        return self._consistent[0]

    def _check_consistency(self) -> bool:
        n, N = self.n, 1 << self.n
        rank = self.ranks()
        full = N - 1
        for j in range(N):
            mj = ~j & full
            for i in range(N):
                if rank[i] < rank[j] and _mask_leq(~i & full, mj, n):
                    return False
        return True

    def ranks(self) -> np.ndarray:
        rank = np.empty(1 << self.n, dtype=np.int64)
        rank[np.asarray(self.order)] = np.arange(1 << self.n)
        return rank


def beta_expansion_reliability(n: int, beta: float = 2.0 ** 0.25) -> ReliabilityOrder:
    """Deterministic reliability proxy: rank index i by sum of beta^k over its
    set bits, ascending.  Monotone along the index partial order for beta > 1."""
    if beta <= 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    N = 1 << n
    weights = beta ** np.arange(n)
    bits = (np.arange(N)[:, None] >> np.arange(n)[None, :]) & 1
    scores = bits @ weights
    order = tuple(int(i) for i in np.argsort(scores, kind="stable"))
    return ReliabilityOrder(n, order)


def load_reliability(path) -> ReliabilityOrder:
    """Read a reliability sequence file: one index per line, least reliable first."""
    with open(path, "r", encoding="utf-8") as fh:
        entries = [int(line) for line in fh if line.strip()]
    n = len(entries).bit_length() - 1
    if (1 << n) != len(entries):
        raise ValueError(f"sequence length {len(entries)} is not a power of two")
    return ReliabilityOrder(n, tuple(entries))


# --------------------------------------------------------------- construction


def rm_polar_construct(n: int, k: int, rel: ReliabilityOrder | None = None) -> CodeSpec:
    """Pick the dimension-k code of best minimum distance: all monomial rows
    of degree below r, filled up from the degree-r layer in descending
    reliability.  The reliability order must respect the index partial order."""
    if not 1 <= k <= (1 << n):
        raise ValueError(f"dimension {k} out of range for n={n}")
    if rel is None:
        rel = beta_expansion_reliability(n)
    if rel.n != n:
        raise ValueError(f"reliability order is for n={rel.n}, expected {n}")
    if not rel.upo_consistent:
        raise ValueError("reliability order violates the index partial order")
    N = 1 << n
    full = N - 1
    r = rm_order(k, n)
    base = [i for i in range(N) if (~i & full).bit_count() < r]
    need = k - len(base)
    layer = [i for i in range(N) if (~i & full).bit_count() == r]
    rank = rel.ranks()
    layer.sort(key=lambda i: (int(rank[i]), i), reverse=True)
    chosen = set(layer[:need])
    # close the degree-r pick downward; a consistent order never triggers this
    added = True
    while added:
        added = False
        for cand in layer:
            if cand in chosen:
                continue
            mc = ~cand & full
            if any(_mask_leq(mc, ~s & full, n) for s in chosen):
                chosen.add(cand)
                added = True
    if len(chosen) > need:
        raise ValueError(
            "closing the degree-r layer forces more than the requested dimension"
        )
    return CodeSpec.from_info_set(frozenset(base) | chosen, n)


def extend_code(i_min, n: int) -> CodeSpec:
    """Length-doubling: reuse the same generator indices at exponent n+1.

    Each generator monomial gains the new top variable, so the doubled code
    keeps the structure of the original with the last symmetry block grown
    by one.  The base code must be RM-polar.
    """
    base = CodeSpec.from_i_min(i_min, n)
    if not base.is_rm_polar:
        raise ValueError("generator indices do not give an RM-polar code at length 2^n")
    return CodeSpec.from_i_min(base.i_min, n + 1)


# --------------------------------------------------------------------- search


class _MonomialPoset:
    """The monomials of degree <= r over n variables, with dominance order.

    Elements are index masks; a dimension-K decreasing code of maximal
    minimum distance is exactly a K-element downward-closed subset here.
    """

    def __init__(self, n: int, r: int):
        self.n = n
        self.r = r
        full = (1 << n) - 1
        masks = [m for m in range(1 << n) if m.bit_count() <= r]
        masks.sort(key=lambda m: (m.bit_count(), m))  # linear extension
        self.masks = masks
        self.size = len(masks)
        self.pos = {m: i for i, m in enumerate(masks)}
        self.full = full
        self.below = [
            frozenset(
                j for j, mj in enumerate(masks) if j != i and _mask_leq(mj, mi, n)
            )
            for i, mi in enumerate(masks)
        ]
        self.above = [
            frozenset(
                j for j, mj in enumerate(masks) if j != i and _mask_leq(mi, mj, n)
            )
            for i, mi in enumerate(masks)
        ]

    def ideals_of_size(self, size: int):
        """All downward-closed subsets of the given cardinality (position sets)."""
        if size > self.size - size:
            # enumerate the complement side: filters are ideals of the dual
            universe = frozenset(range(self.size))
            for filt in self._ideals(
                self.above, list(range(self.size - 1, -1, -1)), self.size - size
            ):
                yield universe - filt
        else:
            yield from self._ideals(self.below, list(range(self.size)), size)

    def _ideals(self, preds, order, size):
        m = len(order)
        out_sets = []
        in_set: set = set()

        def rec(pos: int, count: int):
            if count == size:
                out_sets.append(frozenset(in_set))
                return
            if pos == m or count + (m - pos) < size:
                return
            e = order[pos]
            if preds[e] <= in_set:
                in_set.add(e)
                rec(pos + 1, count + 1)
                in_set.remove(e)
            rec(pos + 1, count)

        rec(0, 0)
        return out_sets

    def symmetry_of(self, positions) -> int:
        counts = [0] * self.n
        for p in positions:
            m = self.masks[p]
            for v in range(self.n):
                if (m >> v) & 1:
                    counts[v] += 1
        lo = min(counts)
        return sum(1 for c in counts if c == lo)

    def info_indices(self, positions) -> frozenset[int]:
        return frozenset(~self.masks[p] & self.full for p in positions)

    def addable(self, positions: set) -> list[int]:
        return [
            i
            for i in range(self.size)
            if i not in positions and self.below[i] <= positions
        ]

    def removable(self, positions: set) -> list[int]:
        return [i for i in positions if not (self.above[i] & positions)]


def search_max_symmetry(
    n: int,
    k: int,
    mode: str = "exhaustive",
    *,
    seed: int = 0,
    restarts: int = 32,
    rel: ReliabilityOrder | None = None,
) -> tuple[int, list[CodeSpec]]:
    """Best achievable symmetry among dimension-k RM-polar codes.

    Returns ``(max_t, codes)``: exhaustively all maximisers (n <= 6), or the
    best code found by seeded hill-climbing over single-monomial swaps,
    tie-broken toward high reliability sums (``rel`` overrides the default
    beta-expansion order).
    """
    if not 1 <= k <= (1 << n):
        raise ValueError(f"dimension {k} out of range for n={n}")
    if mode not in ("exhaustive", "heuristic"):
        raise ValueError(f"unknown search mode {mode!r}")
    if mode == "exhaustive" and n > 6:
        raise ValueError("exhaustive search is limited to n <= 6")
    r = rm_order(k, n)
    poset = _MonomialPoset(n, r)

    if mode == "exhaustive":
        best_t = 0
        best: list[frozenset] = []
        for ideal in poset.ideals_of_size(k):
            t = poset.symmetry_of(ideal)
            if t > best_t:
                best_t, best = t, [ideal]
            elif t == best_t:
                best.append(ideal)
        codes = sorted(
            (CodeSpec.from_info_set(poset.info_indices(s), n) for s in best),
            key=lambda c: c.i_min,
        )
        return best_t, codes

    return _search_heuristic(n, k, poset, seed=seed, restarts=restarts, rel=rel)


def search_rm_psc(
    n: int,
    k: int,
    mode: str = "exhaustive",
    *,
    seed: int = 0,
    restarts: int = 32,
    rel: ReliabilityOrder | None = None,
) -> list[CodeSpec]:
    """Dimension-k RM-polar codes of maximal symmetry t >= 2, or [] when the
    dimension admits no partially/fully symmetric code."""
    best_t, codes = search_max_symmetry(n, k, mode, seed=seed, restarts=restarts, rel=rel)
    return codes if best_t >= 2 else []


def _search_heuristic(n, k, poset: _MonomialPoset, *, seed, restarts, rel=None):
    rng = np.random.default_rng(seed)
    if rel is None:
        rel = beta_expansion_reliability(n)
    rel_rank = rel.ranks()

    def rel_score(positions):
        return sum(int(rel_rank[~poset.masks[p] & poset.full]) for p in positions)

    def key_of(positions):
        return (poset.symmetry_of(positions), rel_score(positions))

    def seeded_ideal():
        info = rm_polar_construct(n, k, rel if rel.upo_consistent else None).info_set
        return {poset.pos[~i & poset.full] for i in info}

    def random_ideal():
        positions: set = set()
        while len(positions) < k:
            cands = poset.addable(positions)
            positions.add(cands[int(rng.integers(len(cands)))])
        return positions

    best_key, best_pos = None, None
    for attempt in range(max(1, restarts)):
        positions = seeded_ideal() if attempt == 0 else random_ideal()
        key = key_of(positions)
        improved = True
        while improved:
            improved = False
            for e_out in poset.removable(positions):
                rest = positions - {e_out}
                for e_in in poset.addable(rest):
                    if e_in == e_out:
                        continue
                    cand = rest | {e_in}
                    ck = key_of(cand)
                    if ck > key:
                        positions, key, improved = cand, ck, True
                        break
                if improved:
                    break
        if best_key is None or key > best_key:
            best_key, best_pos = key, positions
    code = CodeSpec.from_info_set(poset.info_indices(best_pos), n)
    return best_key[0], [code]


# ------------------------------------------------------------- weight counts


def count_min_weight_codewords(code: CodeSpec, k_limit: int = 24) -> int:
    """Exact count of minimum-weight codewords by walking all 2^K codewords."""
    if code.K > k_limit:
        raise ValueError(f"dimension {code.K} exceeds the brute-force limit {k_limit}")
    rows = code.generator_rows_packed()
    d = code.min_distance
    x = 0
    count = 0
    for g in range(1, 1 << code.K):
        x ^= rows[(g & -g).bit_length() - 1]
        if x.bit_count() == d:
            count += 1
    return count


def weight_distribution_via_dual(code: CodeSpec) -> list[int]:
    """Exact weight distribution from the dual spectrum (MacWilliams).

    Enumerates the 2^(N-K) dual codewords as packed 64-bit words, so it
    needs N <= 64 and a dual dimension small enough to walk.
    """
    N, K = code.N, code.K
    if N > 64:
        raise ValueError("dual-spectrum counting requires N <= 64")
    if N - K > 30:
        raise ValueError("dual dimension too large to enumerate")
    dual_basis = _gf2.nullspace(code.generator_rows_packed(), N)
    assert len(dual_basis) == N - K
    hist = _kernels.gray_weight_histogram(
        np.array(dual_basis, dtype=np.uint64), N
    )
    # MacWilliams transform with exact integer Krawtchouk sums
    dist = []
    scale = 1 << (N - K)
    for j in range(N + 1):
        acc = 0
        for w in range(N + 1):
            bw = int(hist[w])
            if bw == 0:
                continue
            kraw = sum(
                (-1) ** i * math.comb(w, i) * math.comb(N - w, j - i)
                for i in range(max(0, j - (N - w)), min(j, w) + 1)
            )
            acc += bw * kraw
        q, rem = divmod(acc, scale)
        if rem:
            raise ArithmeticError("dual spectrum is inconsistent")
        dist.append(q)
    if dist[0] != 1 or sum(dist) != (1 << K) or any(v < 0 for v in dist):
        raise ArithmeticError("weight distribution failed sanity checks")
    return dist


def min_weight_count_via_dual(code: CodeSpec) -> int:
    """Exact number of minimum-weight codewords via the dual spectrum."""
    dist = weight_distribution_via_dual(code)
    d = code.min_distance
    if any(v != 0 for v in dist[1:d]):
        raise ArithmeticError("nonzero weight below the declared minimum distance")
    return dist[d]

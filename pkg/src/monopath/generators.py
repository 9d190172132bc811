"""Instance generators: G(n, p), random orderings and the layered bipartite construction.

All generators are pure functions of their parameters and seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .graph import GraphShape, OrderedGraph, complete_graph, random_ordering

__all__ = [
    "gnp", "random_ordering", "complete_graph", "AppendixAParams", "AppendixAGraph",
    "appendix_a_layers", "appendix_a_graph", "appendix_a_checks", "AppendixReport",
    "write_layer_metadata", "read_layer_metadata", "integer_power_floor",
]


def gnp(n: int, p: float, seed: int | None) -> GraphShape:
    """Erdős–Rényi ``G(n, p)`` as an unordered shape."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    edges = tuple((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p)
    return GraphShape(n, edges)


# -- exact arithmetic for n^eps ----------------------------------------------------------------


def _iroot(x: int, q: int) -> int:
    """Largest integer ``b`` with ``b**q <= x``."""
    if x < 0 or q < 1:
        raise ValueError("need x >= 0 and q >= 1")
    if x < 2:
        return x
    b = int(round(x ** (1.0 / q))) if x.bit_length() < 1000 else 1 << (x.bit_length() // q)
    while b ** q > x:
        b -= 1
    while (b + 1) ** q <= x:
        b += 1
    return b


def integer_power_floor(n: int, eps: Fraction) -> int:
    """``floor(n ** eps)`` exactly, for rational ``eps >= 0``."""
    eps = Fraction(eps)
    return _iroot(n ** eps.numerator, eps.denominator)


def _floor_log2_power(n: int, eps: Fraction) -> int:
    """``floor(log2(n ** eps))`` exactly, for ``n >= 1`` and ``eps >= 0``."""
    p, q = eps.numerator, eps.denominator
    x = n ** p
    # largest k with 2^(k q) <= n^p
    k = x.bit_length() // q
    while k > 0 and (1 << (k * q)) > x:
        k -= 1
    while (1 << ((k + 1) * q)) <= x:
        k += 1
    return k


def _as_fraction(eps) -> Fraction:
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, float):
        return Fraction(eps).limit_denominator(10**6)
    return Fraction(eps)


@dataclass(frozen=True)
class AppendixAParams:
    n: int
    epsilon: Fraction
    seed: int | None = 0
    pad: bool = False

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _as_fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be positive")


def appendix_a_layers(n: int, epsilon) -> tuple[int, int, list[int]]:
    """``(floor(n^eps), ell, [|B_1|, ..., |B_ell|])``; ``ValueError`` if ``ell < 1``."""
    eps = _as_fraction(epsilon)
    base = integer_power_floor(n, eps)
    ell = _floor_log2_power(n, 1 - eps) - 1
    if ell < 1:
        raise ValueError(f"parameter regime gives ell = {ell} < 1")
    if base < 1:
        raise ValueError("floor(n^eps) must be at least 1")
    return base, ell, [2**i * base for i in range(1, ell + 1)]


@dataclass
class AppendixAGraph:
    shape: GraphShape
    params: AppendixAParams
    base: int
    ell: int
    layers: list[range]  # layers[0] = A, layers[i] = B_i
    probabilities: list[float]
    clamped: bool
    padding: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.params.n

    def layer_of(self, v: int) -> int:
        for i, layer in enumerate(self.layers):
            if v in layer:
                return i
        return -1

    def ordered(self, seed: int | None = None) -> OrderedGraph:
        return random_ordering(self.shape, seed)


def appendix_a_graph(params: AppendixAParams) -> AppendixAGraph:
    """Random bipartite graph with parts ``A`` and ``B_1 .. B_ell``.

    ``A = {0..n-1}``, then the ``B_i`` in order. An ``A``–``B_i`` pair is an
    edge with probability ``4 / (2^i ell)``, clamped to 1 (and flagged).
    """
    n, eps = params.n, params.epsilon
    base, ell, sizes = appendix_a_layers(n, eps)
    layers = [range(0, n)]
    start = n
    for size in sizes:
        layers.append(range(start, start + size))
        start += size
    probs = []
    clamped = False
    for i in range(1, ell + 1):
        p = 4 / (2**i * ell)
        if p > 1:
            p, clamped = 1.0, True
        probs.append(p)
    rng = random.Random(params.seed)
    edges = []
    for i, layer in enumerate(layers[1:], start=1):
        p = probs[i - 1]
        for a in layers[0]:
            for b in layer:
                if rng.random() < p:
                    edges.append((a, b))
    total = start
    padding = 0
    if params.pad:
        padding = 2 * n - total
        total = 2 * n
    res = AppendixAGraph(GraphShape(total, tuple(edges)), params, base, ell, layers, probs, clamped, padding)
    if clamped:
        res.notes.append("edge probability clamped to 1 for small layers")
    return res


def write_layer_metadata(g: AppendixAGraph, path: str | Path) -> None:
    """Sidecar text file: parameters, then one line per layer ``name first count``."""
    lines = [
        f"n {g.params.n}",
        f"epsilon {g.params.epsilon}",
        f"seed {g.params.seed}",
        f"ell {g.ell}",
        f"base {g.base}",
        f"padding {g.padding}",
    ]
    for i, layer in enumerate(g.layers):
        name = "A" if i == 0 else f"B{i}"
        lines.append(f"layer {name} {layer.start} {len(layer)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_layer_metadata(path: str | Path) -> dict:
    meta: dict = {"layers": []}
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "layer":
            start, count = int(parts[2]), int(parts[3])
            meta["layers"].append((parts[1], range(start, start + count)))
        elif parts[0] == "epsilon":
            meta["epsilon"] = Fraction(parts[1])
        elif parts[0] == "seed":
            meta["seed"] = None if parts[1] == "None" else int(parts[1])
        else:
            meta[parts[0]] = int(parts[1])
    return meta


# -- sampled property checks -----------------------------------------------------------------------


@dataclass
class AppendixReport:
    edge_count: int
    edge_threshold_met: bool
    samples: int
    passes: int
    max_ratio: float
    adversarial_samples: int
    adversarial_passes: int
    adversarial_max_ratio: float

    @property
    def pass_rate(self) -> float:
        return self.passes / self.samples if self.samples else 1.0

    @property
    def adversarial_pass_rate(self) -> float:
        return self.adversarial_passes / self.adversarial_samples if self.adversarial_samples else 1.0


def appendix_a_checks(g: AppendixAGraph, samples: int = 10_000, seed: int | None = 0, K: int = 2,
                      adversarial: int = 100) -> AppendixReport:
    """The two listed properties of the construction, the second one sampled.

    (i) ``e(G) >= 2 n^(1+eps)``, decided exactly.
    (ii) for random ``m >= n^(eps/2)``, ``A'`` in ``A`` and ``B'`` in the
    layers above ``r = ceil(log2(m / (4 K^2 n^eps)))`` with ``|A'|, |B'| <= m``:
    ``e(A', B') <= 32 K^2 n^eps m / ell``. The adversarial variant takes
    ``A'`` of highest degree into the allowed layers and ``B'`` of highest
    degree into ``A'``.
    """
    n, eps, ell = g.params.n, g.params.epsilon, g.ell
    e = g.shape.m
    p, q = eps.numerator, eps.denominator
    # e >= 2 n^(1 + p/q)  <=>  e^q >= (2n)^q n^p
    threshold_met = e**q >= (2 * n) ** q * n**p
    n_eps = n ** float(eps)
    adj: dict[int, set[int]] = {v: set() for v in range(g.shape.n)}
    for a, b in g.shape.edges:
        adj[a].add(b)
        adj[b].add(a)
    A = list(g.layers[0])
    m_low = math.ceil(n ** (float(eps) / 2))
    rng = random.Random(seed)

    def pool_for(m: int) -> list[int]:
        r = math.ceil(math.log2(m / (4 * K * K * n_eps)))
        out = []
        for i in range(max(r + 1, 1), ell + 1):
            out.extend(g.layers[i])
        return out

    def bound(m: int) -> float:
        return 32 * K * K * n_eps * m / ell

    def count(A_sub, B_sub) -> int:
        Bs = set(B_sub)
        return sum(len(adj[a] & Bs) for a in A_sub)

    passes, max_ratio = 0, 0.0
    for _ in range(samples):
        m = rng.randint(m_low, n)
        pool = pool_for(m)
        A_sub = rng.sample(A, min(m, len(A)))
        B_sub = rng.sample(pool, min(m, len(pool)))
        val = count(A_sub, B_sub)
        ratio = val / bound(m)
        max_ratio = max(max_ratio, ratio)
        passes += ratio <= 1
    adv_passes, adv_max = 0, 0.0
    for _ in range(adversarial):
        m = rng.randint(m_low, n)
        pool = pool_for(m)
        pool_set = set(pool)
        A_sub = sorted(A, key=lambda a: (-len(adj[a] & pool_set), a))[:m]
        A_set = set(A_sub)
        B_sub = sorted(pool, key=lambda b: (-len(adj[b] & A_set), b))[:m]
        val = count(A_sub, B_sub)
        ratio = val / bound(m)
        adv_max = max(adv_max, ratio)
        adv_passes += ratio <= 1
    return AppendixReport(e, threshold_met, samples, passes, max_ratio, adversarial, adv_passes, adv_max)

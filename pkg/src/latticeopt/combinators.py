"""Optimization lattices and the map/filter/flat_map combinators.

An :class:`OptLattice` pairs a :class:`~latticeopt.lattices.Lattice` with a
label map, a monotone score and a downward-closed feasibility predicate.
Combinators never mutate; each returns a new lattice sharing structure.

Scores are native Python values with a total order: ``int``,
``fractions.Fraction`` or (nested) tuples, which compare lexicographically.
"""

from __future__ import annotations

import random
import threading
from typing import Any, Callable, Iterator

from .lattices import Lattice, Node, ProductLattice

LabelFn = Callable[[Node], Any]
ScoreFn = Callable[[Node], Any]
FeasibleFn = Callable[[Node], bool]

AUDIT_EXHAUSTIVE_LIMIT = 4096
AUDIT_SAMPLES = 10_000


class OptLattice:
    """A lattice with labels, a score and a feasibility predicate.

    The structural operations delegate to :attr:`lattice`.
    """

    def __init__(self, lattice: Lattice, label: LabelFn | None = None,
                 score: ScoreFn | None = None, feasible: FeasibleFn | None = None):
        self.lattice = lattice
        self._label = label or lattice.label
        self._score = score or (lambda n: 0)
        self._feasible = feasible or (lambda n: True)

    def __repr__(self) -> str:
        return f"OptLattice({self.lattice!r})"

    # structure
    @property
    def bottom(self) -> Node:
        return self.lattice.bottom

    @property
    def top(self) -> Node:
        return self.lattice.top

    @property
    def node_count(self) -> int:
        return self.lattice.node_count

    def leq(self, a: Node, b: Node) -> bool:
        return self.lattice.leq(a, b)

    def join(self, a: Node, b: Node) -> Node:
        return self.lattice.join(a, b)

    def meet(self, a: Node, b: Node) -> Node:
        return self.lattice.meet(a, b)

    def successors(self, a: Node) -> Iterator[Node]:
        return self.lattice.successors(a)

    def predecessors(self, a: Node) -> Iterator[Node]:
        return self.lattice.predecessors(a)

    def nodes(self) -> Iterator[Node]:
        return self.lattice.nodes()

    def covering_differences(self, base: Node, cap: Node) -> list[Node]:
        return self.lattice.covering_differences(base, cap)

    def upper_region(self, a: Node, blocked) -> Node:
        return self.lattice.upper_region(a, blocked)

    # optimization surface
    def label(self, a: Node) -> Any:
        return self._label(a)

    def score(self, a: Node) -> Any:
        return self._score(a)

    def is_feasible(self, a: Node) -> bool:
        return self._feasible(a)

    def _derive(self, **kw) -> "OptLattice":
        parts = dict(lattice=self.lattice, label=self._label,
                     score=self._score, feasible=self._feasible)
        parts.update(kw)
        return OptLattice(**parts)

    # combinators
    def with_score(self, f: Callable[[Any], Any]) -> "OptLattice":
        label = self._label
        return self._derive(score=lambda n: f(label(n)))

    def map_score(self, f: Callable[[Any], Any]) -> "OptLattice":
        score = self._score
        return self._derive(score=lambda n: f(score(n)))

    def map(self, g: Callable[[Any], Any]) -> "OptLattice":
        label = self._label
        return self._derive(label=lambda n: g(label(n)))

    def filter(self, pred: Callable[[Any], bool]) -> "OptLattice":
        label, feasible = self._label, self._feasible
        return self._derive(feasible=lambda n: feasible(n) and bool(pred(label(n))))

    def flat_map(self, h: Callable[[Any], "OptLattice"]) -> "OptLattice":
        return flat_map(self, h)

    def cached(self) -> "CachedOptLattice":
        return CachedOptLattice(self)


def with_score(l: OptLattice, f) -> OptLattice:
    return l.with_score(f)


def map_score(l: OptLattice, f) -> OptLattice:
    return l.map_score(f)


def map(l: OptLattice, g) -> OptLattice:  # noqa: A001 - combinator name
    return l.map(g)


def filter(l: OptLattice, pred) -> OptLattice:  # noqa: A001 - combinator name
    return l.filter(pred)


def opt(lattice: Lattice) -> OptLattice:
    """Lift a plain lattice: labels from the lattice, score 0, all feasible."""
    return OptLattice(lattice)


def flat_map(outer: OptLattice, h: Callable[[Any], OptLattice]) -> OptLattice:
    """Product of ``outer`` with the lattice family ``h``.

    Only constant families are supported: ``h`` may vary labels, scores and
    feasibility with the outer label, but every inner lattice must share
    one carrier. Nodes are pairs, the score is the pair (outer, inner) and
    the label is the inner label.
    """
    probe_lo = h(outer.label(outer.bottom))
    probe_hi = h(outer.label(outer.top))
    if probe_lo.lattice != probe_hi.lattice:
        raise ValueError("flat_map needs a constant inner lattice family")
    structure = ProductLattice(outer.lattice, probe_lo.lattice)
    olabel = outer.label

    def inner(a):
        return h(olabel(a))

    def label(n):
        return inner(n[0]).label(n[1])

    def score(n):
        return (outer.score(n[0]), inner(n[0]).score(n[1]))

    def feasible(n):
        return outer.is_feasible(n[0]) and inner(n[0]).is_feasible(n[1])

    return OptLattice(structure, label=label, score=score, feasible=feasible)


class CachedOptLattice(OptLattice):
    """Memoizes feasibility per node and counts queries.

    The cache tolerates concurrent readers: two threads may both compute a
    missing entry, but the oracle must be deterministic so they agree.
    """

    def __init__(self, inner: OptLattice):
        super().__init__(inner.lattice, inner._label, inner._score, inner._feasible)
        self._memo: dict[Node, bool] = {}
        self._lock = threading.Lock()
        self.queries = 0
        self.hits = 0
        self.oracle_calls = 0

    def is_feasible(self, a: Node) -> bool:
        with self._lock:
            self.queries += 1
            if a in self._memo:
                self.hits += 1
                return self._memo[a]
            self.oracle_calls += 1
        value = bool(self._feasible(a))
        with self._lock:
            self._memo.setdefault(a, value)
        return value

    def _derive(self, **kw) -> OptLattice:
        # derived lattices keep using the shared memo
        parts = dict(lattice=self.lattice, label=self._label,
                     score=self._score, feasible=self.is_feasible)
        parts.update(kw)
        return OptLattice(**parts)


def cached(l: OptLattice) -> CachedOptLattice:
    return CachedOptLattice(l)


def _comparable_pairs(l: OptLattice, rng: random.Random, samples: int):
    if l.node_count <= AUDIT_EXHAUSTIVE_LIMIT:
        # Every comparable pair is linked by a chain of covers, so checking
        # all cover edges is exhaustive for both properties.
        for a in l.nodes():
            for b in l.successors(a):
                yield a, b
        return
    for _ in range(samples):
        a = l.lattice.random_node(rng)
        b = a
        for _ in range(rng.randrange(8)):
            succ = list(l.successors(b))
            if not succ:
                break
            b = rng.choice(succ)
        yield a, b


def audit_downward_closed(l: OptLattice, seed: int = 0,
                          samples: int = AUDIT_SAMPLES) -> list[tuple[Node, Node]]:
    """Pairs ``a <= b`` with ``b`` feasible and ``a`` not (empty means sound).

    Exhaustive (over cover edges) up to 4096 nodes, sampled above.
    """
    rng = random.Random(seed)
    feasible: dict[Node, bool] = {}

    def feas(n):
        if n not in feasible:
            feasible[n] = l.is_feasible(n)
        return feasible[n]

    return [(a, b) for a, b in _comparable_pairs(l, rng, samples) if feas(b) and not feas(a)]


def audit_monotone(l: OptLattice, seed: int = 0,
                   samples: int = AUDIT_SAMPLES) -> list[tuple[Node, Node]]:
    """Pairs ``a <= b`` with ``score(a) > score(b)``."""
    rng = random.Random(seed)
    return [(a, b) for a, b in _comparable_pairs(l, rng, samples) if l.score(a) > l.score(b)]

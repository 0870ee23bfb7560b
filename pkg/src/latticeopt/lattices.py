"""Finite lattice families used as search spaces.

Every family implements :class:`Lattice`. Nodes are plain hashable values
whose encoding is private to the owning lattice: ints (bit vectors) for
powersets, :class:`IntervalNode` for interval lattices and tuples for
products. A node must never be handed to a lattice it did not come from.
"""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, NamedTuple, Sequence

Node = Hashable
Blocked = Callable[[Node], bool]


class ForeignNodeError(ValueError):
    """Raised when a node is passed to a lattice that does not own it."""


class Lattice(abc.ABC):
    """A complete lattice on a finite carrier, with labels."""

    @property
    @abc.abstractmethod
    def bottom(self) -> Node: ...

    @property
    @abc.abstractmethod
    def top(self) -> Node: ...

    @abc.abstractmethod
    def leq(self, a: Node, b: Node) -> bool:
        """Return True iff ``a`` is below or equal to ``b``."""

    @abc.abstractmethod
    def join(self, a: Node, b: Node) -> Node: ...

    @abc.abstractmethod
    def meet(self, a: Node, b: Node) -> Node: ...

    @abc.abstractmethod
    def successors(self, a: Node) -> Iterator[Node]:
        """Yield the covers of ``a`` in a fixed order."""

    @abc.abstractmethod
    def predecessors(self, a: Node) -> Iterator[Node]:
        """Yield the co-covers of ``a`` in a fixed order."""

    @abc.abstractmethod
    def label(self, a: Node) -> Any: ...

    @property
    @abc.abstractmethod
    def node_count(self) -> int: ...

    @abc.abstractmethod
    def nodes(self) -> Iterator[Node]:
        """Enumerate the whole carrier. Only sensible for small lattices."""

    @abc.abstractmethod
    def owns(self, a: Node) -> bool:
        """Cheap structural check that ``a`` is a node of this lattice."""

    @abc.abstractmethod
    def covering_differences(self, base: Node, cap: Node) -> list[Node]:
        """Minimal nodes ``x`` with ``base <= x`` and not ``x <= cap``."""

    @abc.abstractmethod
    def cocovering_differences(self, base: Node, cap: Node) -> list[Node]:
        """Maximal nodes ``x`` with ``x <= base`` and not ``cap <= x``.

        This is the order dual of :meth:`covering_differences`; inverted
        lattices need it from their underlying family.
        """

    @abc.abstractmethod
    def random_node(self, rng: random.Random) -> Node: ...

    def upper_region(self, a: Node, blocked: Blocked) -> Node:
        """A node above every ``x >= a`` that lies above no blocked cover of ``a``.

        ``blocked`` marks covers of ``a`` known to be infeasible. The default
        is the (always correct) top; distributive families do better.
        """
        return self.top

    def lower_region(self, a: Node, blocked: Blocked) -> Node:
        """Order dual of :meth:`upper_region`."""
        return self.bottom

    def check(self, *nodes: Node) -> None:
        for n in nodes:
            if not self.owns(n):
                raise ForeignNodeError(f"{n!r} is not a node of {self!r}")

    def lt(self, a: Node, b: Node) -> bool:
        return a != b and self.leq(a, b)


def _minimal(lattice: Lattice, xs: Iterable[Node]) -> list[Node]:
    out: list[Node] = []
    for x in dict.fromkeys(xs):
        if any(lattice.leq(y, x) for y in out):
            continue
        out = [y for y in out if not lattice.leq(x, y)]
        out.append(x)
    return out


def _maximal(lattice: Lattice, xs: Iterable[Node]) -> list[Node]:
    out: list[Node] = []
    for x in dict.fromkeys(xs):
        if any(lattice.leq(x, y) for y in out):
            continue
        out = [y for y in out if not lattice.leq(y, x)]
        out.append(x)
    return out


class PowerSetLattice(Lattice):
    """All subsets of a finite sequence of elements, ordered by inclusion.

    Nodes are ints whose bit ``i`` says whether ``elements[i]`` is present.
    """

    def __init__(self, elements: Iterable[Any]):
        elements = tuple(elements)
        index: dict[Any, int] = {}
        for i, e in enumerate(elements):
            if e in index:
                raise ValueError(f"duplicate element {e!r}")
            index[e] = i
        self.elements = elements
        self._index = index
        self._full = (1 << len(elements)) - 1

    def __repr__(self) -> str:
        return f"PowerSetLattice({list(self.elements)!r})"

    def __eq__(self, other: object) -> bool:
        return type(other) is PowerSetLattice and other.elements == self.elements

    def __hash__(self) -> int:
        return hash((PowerSetLattice, self.elements))

    def node_of(self, subset: Iterable[Any]) -> int:
        mask = 0
        for e in subset:
            try:
                mask |= 1 << self._index[e]
            except KeyError:
                raise ValueError(f"{e!r} is not an element of {self!r}") from None
        return mask

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self._full

    def owns(self, a: Node) -> bool:
        return type(a) is int and 0 <= a <= self._full

    def leq(self, a: int, b: int) -> bool:
        return a & ~b == 0

    def join(self, a: int, b: int) -> int:
        return a | b

    def meet(self, a: int, b: int) -> int:
        return a & b

    def successors(self, a: int) -> Iterator[int]:
        for i in range(len(self.elements)):
            bit = 1 << i
            if not a & bit:
                yield a | bit

    def predecessors(self, a: int) -> Iterator[int]:
        for i in range(len(self.elements)):
            bit = 1 << i
            if a & bit:
                yield a & ~bit

    def label(self, a: int) -> frozenset:
        return frozenset(e for i, e in enumerate(self.elements) if a >> i & 1)

    @property
    def node_count(self) -> int:
        return 1 << len(self.elements)

    def nodes(self) -> Iterator[int]:
        return iter(range(self._full + 1))

    def random_node(self, rng: random.Random) -> int:
        return rng.getrandbits(len(self.elements)) if self.elements else 0

    def covering_differences(self, base: int, cap: int) -> list[int]:
        self.check(base, cap)
        if not self.leq(base, cap):
            return [base]
        return [base | 1 << i for i in range(len(self.elements)) if not cap >> i & 1]

    def cocovering_differences(self, base: int, cap: int) -> list[int]:
        self.check(base, cap)
        if not self.leq(cap, base):
            return [base]
        return [base & ~(1 << i) for i in range(len(self.elements)) if cap >> i & 1]

    def upper_region(self, a: int, blocked: Blocked) -> int:
        # Every feasible x >= a is the join of a with covers of a below x.
        cap = a
        for s in self.successors(a):
            if not blocked(s):
                cap |= s
        return cap

    def lower_region(self, a: int, blocked: Blocked) -> int:
        floor = a
        for p in self.predecessors(a):
            if not blocked(p):
                floor &= p
        return floor


class InvertedLattice(Lattice):
    """The order dual of another lattice, with the same nodes and labels."""

    def __init__(self, inner: Lattice):
        self.inner = inner

    def __repr__(self) -> str:
        return f"InvertedLattice({self.inner!r})"

    def __eq__(self, other: object) -> bool:
        return type(other) is InvertedLattice and other.inner == self.inner

    def __hash__(self) -> int:
        return hash((InvertedLattice, self.inner))

    @property
    def bottom(self) -> Node:
        return self.inner.top

    @property
    def top(self) -> Node:
        return self.inner.bottom

    def owns(self, a: Node) -> bool:
        return self.inner.owns(a)

    def leq(self, a: Node, b: Node) -> bool:
        return self.inner.leq(b, a)

    def join(self, a: Node, b: Node) -> Node:
        return self.inner.meet(a, b)

    def meet(self, a: Node, b: Node) -> Node:
        return self.inner.join(a, b)

    def successors(self, a: Node) -> Iterator[Node]:
        return self.inner.predecessors(a)

    def predecessors(self, a: Node) -> Iterator[Node]:
        return self.inner.successors(a)

    def label(self, a: Node) -> Any:
        return self.inner.label(a)

    @property
    def node_count(self) -> int:
        return self.inner.node_count

    def nodes(self) -> Iterator[Node]:
        return self.inner.nodes()

    def random_node(self, rng: random.Random) -> Node:
        return self.inner.random_node(rng)

    def covering_differences(self, base: Node, cap: Node) -> list[Node]:
        return self.inner.cocovering_differences(base, cap)

    def cocovering_differences(self, base: Node, cap: Node) -> list[Node]:
        return self.inner.covering_differences(base, cap)

    def upper_region(self, a: Node, blocked: Blocked) -> Node:
        return self.inner.lower_region(a, blocked)

    def lower_region(self, a: Node, blocked: Blocked) -> Node:
        return self.inner.upper_region(a, blocked)


def inverted(lattice: Lattice) -> Lattice:
    if isinstance(lattice, InvertedLattice):
        return lattice.inner
    return InvertedLattice(lattice)


@dataclass(frozen=True)
class IntervalNode:
    """An interval over the extended point line, or the empty interval.

    ``lo`` and ``hi`` are positions on the extended line ``0..k+1`` of a
    ``k``-point lattice: position 0 is -inf, position ``i + 1`` is the
    ``i``-th point and position ``k + 1`` is +inf.
    """

    lo: int = 0
    hi: int = 0
    empty: bool = False


EMPTY = IntervalNode(empty=True)


class Interval(NamedTuple):
    """Label of an interval node; ``None`` endpoints are infinite."""

    lo: Any
    hi: Any
    empty: bool = False

    def __str__(self) -> str:
        if self.empty:
            return "{}"
        lo = "(-inf" if self.lo is None else f"[{self.lo}"
        hi = "+inf)" if self.hi is None else f"{self.hi}]"
        return f"{lo},{hi}"

    def contains(self, value: Any) -> bool:
        if self.empty:
            return False
        return (self.lo is None or self.lo <= value) and (self.hi is None or value <= self.hi)


class IntervalLattice(Lattice):
    """Intervals with endpoints drawn from a finite point set, by reverse inclusion.

    Bottom is (-inf, +inf) and top is the empty interval, so walking up
    shrinks the interval.
    """

    def __init__(self, points: Iterable[Any]):
        points = tuple(points)
        if not points:
            raise ValueError("interval lattice needs at least one point")
        if any(not a < b for a, b in zip(points, points[1:])):
            raise ValueError("points must be strictly increasing")
        self.points = points
        self._k = len(points)

    def __repr__(self) -> str:
        return f"IntervalLattice({list(self.points)!r})"

    def __eq__(self, other: object) -> bool:
        return type(other) is IntervalLattice and other.points == self.points

    def __hash__(self) -> int:
        return hash((IntervalLattice, self.points))

    def _valid(self, lo: int, hi: int) -> bool:
        return 0 <= lo <= hi <= self._k + 1 and lo <= self._k and hi >= 1

    def node_of(self, lo: Any, hi: Any) -> IntervalNode:
        """Node for ``[lo, hi]``; ``None`` stands for the infinite endpoint."""
        lpos = 0 if lo is None else self.points.index(lo) + 1
        hpos = self._k + 1 if hi is None else self.points.index(hi) + 1
        if not self._valid(lpos, hpos):
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        return IntervalNode(lpos, hpos)

    @property
    def bottom(self) -> IntervalNode:
        return IntervalNode(0, self._k + 1)

    @property
    def top(self) -> IntervalNode:
        return EMPTY

    def owns(self, a: Node) -> bool:
        if type(a) is not IntervalNode:
            return False
        return a == EMPTY or (not a.empty and self._valid(a.lo, a.hi))

    @staticmethod
    def _within(a: IntervalNode, b: IntervalNode) -> bool:
        # set inclusion a ⊆ b
        if a.empty:
            return True
        if b.empty:
            return False
        return b.lo <= a.lo and a.hi <= b.hi

    def leq(self, a: IntervalNode, b: IntervalNode) -> bool:
        return self._within(b, a)

    def join(self, a: IntervalNode, b: IntervalNode) -> IntervalNode:
        if a.empty or b.empty:
            return EMPTY
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        return IntervalNode(lo, hi) if lo <= hi else EMPTY

    def meet(self, a: IntervalNode, b: IntervalNode) -> IntervalNode:
        if a.empty:
            return b
        if b.empty:
            return a
        return IntervalNode(min(a.lo, b.lo), max(a.hi, b.hi))

    def successors(self, a: IntervalNode) -> Iterator[IntervalNode]:
        if a.empty:
            return
        if a.lo == a.hi:
            yield EMPTY
            return
        if self._valid(a.lo + 1, a.hi):
            yield IntervalNode(a.lo + 1, a.hi)
        if self._valid(a.lo, a.hi - 1):
            yield IntervalNode(a.lo, a.hi - 1)

    def predecessors(self, a: IntervalNode) -> Iterator[IntervalNode]:
        if a.empty:
            for p in range(1, self._k + 1):
                yield IntervalNode(p, p)
            return
        if self._valid(a.lo - 1, a.hi):
            yield IntervalNode(a.lo - 1, a.hi)
        if self._valid(a.lo, a.hi + 1):
            yield IntervalNode(a.lo, a.hi + 1)

    def label(self, a: IntervalNode) -> Interval:
        if a.empty:
            return Interval(None, None, True)
        lo = None if a.lo == 0 else self.points[a.lo - 1]
        hi = None if a.hi == self._k + 1 else self.points[a.hi - 1]
        return Interval(lo, hi)

    @property
    def node_count(self) -> int:
        n = self._k + 2
        # pairs lo <= hi on 0..k+1, minus the two degenerate infinite points, plus empty
        return n * (n + 1) // 2 - 2 + 1

    def nodes(self) -> Iterator[IntervalNode]:
        for lo in range(self._k + 1):
            for hi in range(max(lo, 1), self._k + 2):
                yield IntervalNode(lo, hi)
        yield EMPTY

    def random_node(self, rng: random.Random) -> IntervalNode:
        return rng.choice(list(self.nodes()))

    def covering_differences(self, base: IntervalNode, cap: IntervalNode) -> list[IntervalNode]:
        self.check(base, cap)
        if not self.leq(base, cap):
            return [base]
        if cap.empty:
            return []
        # Largest subintervals of base that do not contain cap.
        out = []
        if self._valid(cap.lo + 1, base.hi):
            out.append(IntervalNode(cap.lo + 1, base.hi))
        if self._valid(base.lo, cap.hi - 1):
            out.append(IntervalNode(base.lo, cap.hi - 1))
        return out or [EMPTY]

    def cocovering_differences(self, base: IntervalNode, cap: IntervalNode) -> list[IntervalNode]:
        self.check(base, cap)
        if not self.leq(cap, base):
            return [base]
        # Smallest superintervals of base that are not inside cap.
        if cap.empty:
            inside = set()
        else:
            inside = set(range(cap.lo, cap.hi + 1))
        if base.empty:
            cands = []
            for e in range(self._k + 2):
                if e in inside:
                    continue
                lo, hi = e, e
                if e == 0:
                    hi = 1
                elif e == self._k + 1:
                    lo = self._k
                cands.append(IntervalNode(lo, hi))
            return _maximal(self, cands)
        out = []
        if cap.lo >= 1:
            out.append(IntervalNode(cap.lo - 1, base.hi))
        if cap.hi <= self._k:
            out.append(IntervalNode(base.lo, cap.hi + 1))
        return out


class ProductLattice(Lattice):
    """Cartesian product of two lattices with the componentwise order."""

    def __init__(self, first: Lattice, second: Lattice):
        self.first = first
        self.second = second

    def __repr__(self) -> str:
        return f"ProductLattice({self.first!r}, {self.second!r})"

    def __eq__(self, other: object) -> bool:
        return (type(other) is ProductLattice
                and other.first == self.first and other.second == self.second)

    def __hash__(self) -> int:
        return hash((ProductLattice, self.first, self.second))

    @property
    def bottom(self) -> tuple:
        return (self.first.bottom, self.second.bottom)

    @property
    def top(self) -> tuple:
        return (self.first.top, self.second.top)

    def owns(self, a: Node) -> bool:
        return (type(a) is tuple and len(a) == 2
                and self.first.owns(a[0]) and self.second.owns(a[1]))

    def leq(self, a: tuple, b: tuple) -> bool:
        return self.first.leq(a[0], b[0]) and self.second.leq(a[1], b[1])

    def join(self, a: tuple, b: tuple) -> tuple:
        return (self.first.join(a[0], b[0]), self.second.join(a[1], b[1]))

    def meet(self, a: tuple, b: tuple) -> tuple:
        return (self.first.meet(a[0], b[0]), self.second.meet(a[1], b[1]))

    def successors(self, a: tuple) -> Iterator[tuple]:
        x, y = a
        for s in self.first.successors(x):
            yield (s, y)
        for s in self.second.successors(y):
            yield (x, s)

    def predecessors(self, a: tuple) -> Iterator[tuple]:
        x, y = a
        for p in self.first.predecessors(x):
            yield (p, y)
        for p in self.second.predecessors(y):
            yield (x, p)

    def label(self, a: tuple) -> tuple:
        return (self.first.label(a[0]), self.second.label(a[1]))

    @property
    def node_count(self) -> int:
        return self.first.node_count * self.second.node_count

    def nodes(self) -> Iterator[tuple]:
        for x in self.first.nodes():
            for y in self.second.nodes():
                yield (x, y)

    def random_node(self, rng: random.Random) -> tuple:
        return (self.first.random_node(rng), self.second.random_node(rng))

    def covering_differences(self, base: tuple, cap: tuple) -> list[tuple]:
        self.check(base, cap)
        if not self.leq(base, cap):
            return [base]
        (x, y), (cx, cy) = base, cap
        return ([(d, y) for d in self.first.covering_differences(x, cx)]
                + [(x, d) for d in self.second.covering_differences(y, cy)])

    def cocovering_differences(self, base: tuple, cap: tuple) -> list[tuple]:
        self.check(base, cap)
        if not self.leq(cap, base):
            return [base]
        (x, y), (cx, cy) = base, cap
        return ([(d, y) for d in self.first.cocovering_differences(x, cx)]
                + [(x, d) for d in self.second.cocovering_differences(y, cy)])

    def upper_region(self, a: tuple, blocked: Blocked) -> tuple:
        x, y = a
        return (self.first.upper_region(x, lambda s: blocked((s, y))),
                self.second.upper_region(y, lambda s: blocked((x, s))))

    def lower_region(self, a: tuple, blocked: Blocked) -> tuple:
        x, y = a
        return (self.first.lower_region(x, lambda p: blocked((p, y))),
                self.second.lower_region(y, lambda p: blocked((x, p))))


def powerset(elements: Iterable[Any]) -> PowerSetLattice:
    return PowerSetLattice(elements)


def interval_lattice(points: Sequence[Any]) -> IntervalLattice:
    return IntervalLattice(points)


def product(first: Lattice, second: Lattice) -> ProductLattice:
    return ProductLattice(first, second)


def covering_differences(lattice: Lattice, base: Node, cap: Node) -> list[Node]:
    return lattice.covering_differences(base, cap)

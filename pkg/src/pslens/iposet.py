"""Partially ordered state domains with identical-update structure.

A domain here is a carrier of *states* ordered by ``le``, where
``le(a, b)`` reads "a is less specified than b": everything the update
intention ``a`` asks for is preserved in ``b``.  On top of the order,
each domain distinguishes a reflexive sub-relation ``ident`` of
*identical updates*: ``ident(a, b)`` means that, applied against ``b``,
the state ``a`` requests nothing new.  A domain may also carry

* a least element (an intention that specifies nothing and acts as an
  identical update for every state), and
* a partial binary ``merge`` that soundly computes least upper bounds;
  merging is how simultaneous update intentions from different views
  are combined, and its partiality models genuinely conflicting
  updates.

Finite domains store their relations as explicit tables and validate
the axioms eagerly; infinite domains implement the same interface with
computed predicates and are only ever checked on caller-supplied
samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence


class IPosetError(ValueError):
    """A domain failed its construction-time axioms."""


class InvalidArgsError(IPosetError):
    """A standard construction was given mismatched arguments."""


class NonMonotonePredicateError(IPosetError):
    """A carrier restriction used a non-monotone predicate."""


class MissingMergeError(IPosetError):
    """A duplicability check was asked of a domain without a merge table."""


class _Undefined:
    """Result of a partial operation outside its domain of definition."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "UNDEFINED"


#: Singleton returned by partial operations (``join``, ``merge``) when no
#: result exists.  Always compare with ``is``; carrier elements may be falsy.
UNDEFINED = _Undefined()


def is_defined(x: Any) -> bool:
    return x is not UNDEFINED


class _Omega:
    """Fresh least element introduced by :func:`lift_omega`."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Omega"


#: Default bottom element for lifted domains ("anything", the empty intention).
OMEGA = _Omega()


@dataclass(frozen=True)
class InL:
    """Left injection into a sum domain."""

    value: Any


@dataclass(frozen=True)
class InR:
    """Right injection into a sum domain."""

    value: Any


# ---------------------------------------------------------------------------
# Validation reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One failed axiom instance, with the witnessing elements."""

    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self) -> str:
        msg = f"{self.axiom}: witness {self.witness!r}"
        return f"{msg} ({self.detail})" if self.detail else msg


@dataclass
class ValidationReport:
    """Outcome of an axiom or condition check.

    ``ok`` is true iff no violation was recorded; every violation names
    the failed axiom and carries concrete witnesses, so a report is
    re-checkable by hand.
    """

    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness: tuple, detail: str = "") -> None:
        self.violations.append(Violation(axiom, witness, detail))

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject}: ok"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  - {v}" for v in self.violations]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Domain interface
# ---------------------------------------------------------------------------


class IPoset:
    """Interface shared by all state domains.

    Elements are compared by structural equality only; no hashing
    contract is assumed.  ``elements`` is a list for enumerable (finite)
    domains and ``None`` otherwise.  ``least`` is the distinguished
    bottom element, or ``None`` when the domain is not lower-bounded.
    """

    name: str = ""
    least: Any = None
    has_merge: bool = False

    @property
    def elements(self) -> Optional[list]:
        return None

    def le(self, a: Any, b: Any) -> bool:
        raise NotImplementedError

    def ident(self, a: Any, b: Any) -> bool:
        """True when ``a`` is an identical update relative to ``b``."""
        raise NotImplementedError

    def merge(self, a: Any, b: Any) -> Any:
        return UNDEFINED

    def contains(self, x: Any) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        label = self.name or self.__class__.__name__
        n = len(self.elements) if self.elements is not None else "inf"
        return f"<{label}: {n} elements>"


def _index_of(elements: Sequence, x: Any) -> int:
    """Index of ``x`` under structural equality, or -1."""
    for i, e in enumerate(elements):
        if e == x:
            return i
    return -1


class FiniteIPoset(IPoset):
    """Explicitly tabled finite domain, validated eagerly.

    ``le`` and ``id_rel`` are given as iterables of element pairs and
    ``merge`` as an iterable of ``(a, b, result)`` triples.  Unless
    ``validate=False``, construction runs :func:`verify_iposet` and
    raises :class:`IPosetError` on the first report of violations.
    """

    def __init__(
        self,
        elements: Iterable,
        le: Iterable[tuple],
        id_rel: Iterable[tuple],
        merge: Optional[Iterable[tuple]] = None,
        name: str = "",
        validate: bool = True,
    ):
        self._elements = list(elements)
        self.name = name
        for i, e in enumerate(self._elements):
            if _index_of(self._elements[:i], e) >= 0:
                raise IPosetError(f"duplicate element {e!r}")
        self._le = {self._pair(a, b) for a, b in le}
        self._id = {self._pair(a, b) for a, b in id_rel}
        self._merge: Optional[dict] = None
        if merge is not None:
            self._merge = {}
            for a, b, r in merge:
                key = self._pair(a, b)
                ri = self._idx(r)
                if self._merge.get(key, ri) != ri:
                    raise IPosetError(f"merge not functional at {(a, b)!r}")
                self._merge[key] = ri
        self.has_merge = self._merge is not None
        self.least = self._find_least()
        if validate:
            report = verify_iposet(self)
            if not report.ok:
                raise IPosetError(str(report))

    def _idx(self, x: Any) -> int:
        i = _index_of(self._elements, x)
        if i < 0:
            raise IPosetError(f"{x!r} is not a carrier element of {self!r}")
        return i

    def _pair(self, a: Any, b: Any) -> tuple[int, int]:
        return (self._idx(a), self._idx(b))

    def _find_least(self) -> Any:
        n = len(self._elements)
        for i in range(n):
            if all((i, j) in self._le for j in range(n)):
                return self._elements[i]
        return None

    @property
    def elements(self) -> list:
        return self._elements

    def le(self, a: Any, b: Any) -> bool:
        return self._pair(a, b) in self._le

    def ident(self, a: Any, b: Any) -> bool:
        return self._pair(a, b) in self._id

    def merge(self, a: Any, b: Any) -> Any:
        if self._merge is None:
            return UNDEFINED
        r = self._merge.get(self._pair(a, b))
        return UNDEFINED if r is None else self._elements[r]

    def contains(self, x: Any) -> bool:
        return _index_of(self._elements, x) >= 0

    def le_pairs(self) -> list[tuple]:
        e = self._elements
        return [(e[i], e[j]) for i, j in sorted(self._le)]

    def id_pairs(self) -> list[tuple]:
        e = self._elements
        return [(e[i], e[j]) for i, j in sorted(self._id)]

    def merge_triples(self) -> list[tuple]:
        if self._merge is None:
            return []
        e = self._elements
        return [(e[i], e[j], e[k]) for (i, j), k in sorted(self._merge.items())]


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def _require_enumerable(p: IPoset) -> list:
    els = p.elements
    if els is None:
        raise InvalidArgsError(f"{p!r} is not enumerable")
    return els


def join(p: IPoset, a: Any, b: Any) -> Any:
    """Least upper bound of ``a`` and ``b`` in an enumerable domain.

    Computed by enumerating common upper bounds and selecting the unique
    minimum; antisymmetry makes the minimum unique whenever a least
    upper bound exists.  Returns :data:`UNDEFINED` when there is no
    common upper bound or no least one.
    """
    els = _require_enumerable(p)
    ubs = [c for c in els if p.le(a, c) and p.le(b, c)]
    for c in ubs:
        if all(p.le(c, d) for d in ubs):
            return c
    return UNDEFINED


def verify_iposet(p: IPoset) -> ValidationReport:
    """Check every domain axiom over an enumerable carrier.

    Violations are report entries, never exceptions: order axioms
    (reflexive, antisymmetric, transitive), ``ident`` contained in
    ``le`` and reflexive, the least element being an identical update
    for everything, and soundness of the merge table against brute-force
    joins.
    """
    els = _require_enumerable(p)
    if not els:
        raise InvalidArgsError("empty carrier")
    rep = ValidationReport(subject=f"iposet axioms for {p!r}")
    for a in els:
        if not p.le(a, a):
            rep.add("le-reflexive", (a,))
        if not p.ident(a, a):
            rep.add("ident-reflexive", (a,))
    for a, b in itertools.permutations(els, 2):
        if p.le(a, b) and p.le(b, a):
            rep.add("le-antisymmetric", (a, b))
        if p.ident(a, b) and not p.le(a, b):
            rep.add("ident-subset-of-le", (a, b))
    for a, b, c in itertools.product(els, repeat=3):
        if p.le(a, b) and p.le(b, c) and not p.le(a, c):
            rep.add("le-transitive", (a, b, c))
    bottoms = [a for a in els if all(p.le(a, b) for b in els)]
    if bottoms:
        omega = bottoms[0]
        if p.least is not None and not (p.least == omega):
            rep.add("least-designated", (p.least, omega), "designated least differs")
        for b in els:
            if not p.ident(omega, b):
                rep.add("least-is-identical-update", (omega, b))
    if p.has_merge:
        for a, b in itertools.product(els, repeat=2):
            r = p.merge(a, b)
            if r is UNDEFINED:
                continue
            j = join(p, a, b)
            if j is UNDEFINED or not (j == r):
                rep.add("merge-sound", (a, b, r), f"join is {j!r}")
    return rep


def check_duplicable(p: IPoset) -> ValidationReport:
    """Check that ``merge`` makes an enumerable domain duplicable.

    Duplicability requires (i) merge to be sound for joins, and (ii) for
    every state ``z``, merge to be total and closed on the identical
    updates of ``z``.  This is exactly what the duplication lens needs
    to combine per-view updates without losing identical ones.
    """
    els = _require_enumerable(p)
    if not p.has_merge:
        raise MissingMergeError(f"{p!r} has no merge operator")
    rep = ValidationReport(subject=f"duplicability of {p!r}")
    for a, b in itertools.product(els, repeat=2):
        r = p.merge(a, b)
        if r is UNDEFINED:
            continue
        j = join(p, a, b)
        if j is UNDEFINED or not (j == r):
            rep.add("merge-sound", (a, b, r), f"join is {j!r}")
    for z in els:
        ids = [x for x in els if p.ident(x, z)]
        for x, y in itertools.product(ids, repeat=2):
            r = p.merge(x, y)
            if r is UNDEFINED:
                rep.add("ident-merge-total", (x, y, z), "merge undefined on identical updates")
            elif not p.ident(r, z):
                rep.add("ident-merge-closed", (x, y, z), f"merge result {r!r} not identical update")
    return rep


def materialize(p: IPoset, elements: Iterable, name: str = "", on_escape: str = "error") -> FiniteIPoset:
    """Tabulate an abstract domain over an explicit finite sub-carrier.

    Merge results falling outside ``elements`` either raise (default) or
    are dropped from the table with ``on_escape="drop"``.
    """
    els = list(elements)
    le = [(a, b) for a, b in itertools.product(els, repeat=2) if p.le(a, b)]
    idr = [(a, b) for a, b in itertools.product(els, repeat=2) if p.ident(a, b)]
    merge = None
    if p.has_merge:
        merge = []
        for a, b in itertools.product(els, repeat=2):
            r = p.merge(a, b)
            if r is UNDEFINED:
                continue
            if _index_of(els, r) < 0:
                if on_escape == "drop":
                    continue
                raise InvalidArgsError(f"merge result {r!r} escapes the sub-carrier")
            merge.append((a, b, r))
    return FiniteIPoset(els, le, idr, merge, name=name or f"{p.name or 'domain'}@{len(els)}")


# ---------------------------------------------------------------------------
# Standard constructions
# ---------------------------------------------------------------------------


def discrete(elements: Iterable, name: str = "") -> FiniteIPoset:
    """Discrete domain: order and identical updates are equality.

    Carries the diagonal merge ``x + x = x``, which is the only sound
    total-on-identicals choice, so discrete domains are duplicable.
    """
    els = list(elements)
    diag = [(e, e) for e in els]
    return FiniteIPoset(els, diag, diag, [(e, e, e) for e in els], name=name)


def lift_omega(p: IPoset, bottom: Any = OMEGA, name: str = "") -> FiniteIPoset:
    """Add a fresh least element below an enumerable domain.

    The new bottom is below, and an identical update for, every state;
    it is a unit for merge.  ``bottom`` must not already be a carrier
    element.
    """
    els = _require_enumerable(p)
    if _index_of(els, bottom) >= 0:
        raise InvalidArgsError(f"bottom {bottom!r} already in carrier")
    new_els = [bottom] + list(els)
    le = [(bottom, e) for e in new_els]
    idr = [(bottom, e) for e in new_els]
    for a, b in itertools.product(els, repeat=2):
        if p.le(a, b):
            le.append((a, b))
        if p.ident(a, b):
            idr.append((a, b))
    merge = [(bottom, e, e) for e in new_els] + [(e, bottom, e) for e in els]
    if p.has_merge:
        for a, b in itertools.product(els, repeat=2):
            r = p.merge(a, b)
            if r is not UNDEFINED:
                merge.append((a, b, r))
    return FiniteIPoset(new_els, le, idr, merge, name=name or (p.name + "_lifted" if p.name else ""))


class ProductIPoset(IPoset):
    """Point-wise product of two domains; elements are pairs."""

    def __init__(self, left: IPoset, right: IPoset, name: str = ""):
        self.left = left
        self.right = right
        self.name = name
        self.has_merge = left.has_merge and right.has_merge
        if left.least is not None and right.least is not None:
            self.least = (left.least, right.least)
        self._elements: Optional[list] = None

    @property
    def elements(self) -> Optional[list]:
        if self.left.elements is None or self.right.elements is None:
            return None
        if self._elements is None:
            self._elements = [
                (a, b) for a in self.left.elements for b in self.right.elements
            ]
        return self._elements

    def _split(self, x: Any) -> tuple:
        if not (isinstance(x, tuple) and len(x) == 2):
            raise IPosetError(f"{x!r} is not a pair")
        return x

    def le(self, a: Any, b: Any) -> bool:
        a1, a2 = self._split(a)
        b1, b2 = self._split(b)
        return self.left.le(a1, b1) and self.right.le(a2, b2)

    def ident(self, a: Any, b: Any) -> bool:
        a1, a2 = self._split(a)
        b1, b2 = self._split(b)
        return self.left.ident(a1, b1) and self.right.ident(a2, b2)

    def merge(self, a: Any, b: Any) -> Any:
        if not self.has_merge:
            return UNDEFINED
        a1, a2 = self._split(a)
        b1, b2 = self._split(b)
        m1 = self.left.merge(a1, b1)
        m2 = self.right.merge(a2, b2)
        if m1 is UNDEFINED or m2 is UNDEFINED:
            return UNDEFINED
        return (m1, m2)

    def contains(self, x: Any) -> bool:
        if not (isinstance(x, tuple) and len(x) == 2):
            return False
        return self.left.contains(x[0]) and self.right.contains(x[1])


class SumIPoset(IPoset):
    """Tagged sum of two domains; cross-tag elements are incomparable."""

    def __init__(self, left: IPoset, right: IPoset, name: str = ""):
        self.left = left
        self.right = right
        self.name = name
        self.has_merge = left.has_merge and right.has_merge
        self._elements: Optional[list] = None

    @property
    def elements(self) -> Optional[list]:
        if self.left.elements is None or self.right.elements is None:
            return None
        if self._elements is None:
            self._elements = [InL(a) for a in self.left.elements] + [
                InR(b) for b in self.right.elements
            ]
        return self._elements

    def le(self, a: Any, b: Any) -> bool:
        if isinstance(a, InL) and isinstance(b, InL):
            return self.left.le(a.value, b.value)
        if isinstance(a, InR) and isinstance(b, InR):
            return self.right.le(a.value, b.value)
        return False

    def ident(self, a: Any, b: Any) -> bool:
        if isinstance(a, InL) and isinstance(b, InL):
            return self.left.ident(a.value, b.value)
        if isinstance(a, InR) and isinstance(b, InR):
            return self.right.ident(a.value, b.value)
        return False

    def merge(self, a: Any, b: Any) -> Any:
        if not self.has_merge:
            return UNDEFINED
        if isinstance(a, InL) and isinstance(b, InL):
            r = self.left.merge(a.value, b.value)
            return UNDEFINED if r is UNDEFINED else InL(r)
        if isinstance(a, InR) and isinstance(b, InR):
            r = self.right.merge(a.value, b.value)
            return UNDEFINED if r is UNDEFINED else InR(r)
        return UNDEFINED

    def contains(self, x: Any) -> bool:
        if isinstance(x, InL):
            return self.left.contains(x.value)
        if isinstance(x, InR):
            return self.right.contains(x.value)
        return False


class RestrictedIPoset(IPoset):
    """Abstract domain cut down to the elements satisfying a predicate.

    The predicate is trusted to be monotone here (see
    :func:`restrict_iposet` for the exact sense); enumerable domains go
    through :func:`restrict_iposet`, which checks it.
    """

    def __init__(self, base: IPoset, pred: Callable[[Any], bool], name: str = ""):
        self.base = base
        self.pred = pred
        self.name = name
        self.has_merge = base.has_merge
        if base.least is not None and pred(base.least):
            self.least = base.least

    def le(self, a: Any, b: Any) -> bool:
        return self.base.le(a, b)

    def ident(self, a: Any, b: Any) -> bool:
        return self.base.ident(a, b)

    def merge(self, a: Any, b: Any) -> Any:
        r = self.base.merge(a, b)
        if r is UNDEFINED or not self.pred(r):
            return UNDEFINED
        return r

    def contains(self, x: Any) -> bool:
        return self.base.contains(x) and self.pred(x)


def product_iposet(p: IPoset, q: IPoset, name: str = "") -> ProductIPoset:
    return ProductIPoset(p, q, name=name)


def sum_iposet(p: IPoset, q: IPoset, name: str = "") -> SumIPoset:
    return SumIPoset(p, q, name=name)


def powerset_iposet(base: Iterable, include_empty: bool = False, name: str = "") -> FiniteIPoset:
    """Subsets of ``base`` ordered by reverse inclusion.

    A larger subset is *less* specified: it permits more proper states.
    Merge is intersection; with the empty set excluded (the default,
    treating ill-specification as a conflict), intersection is partial.
    """
    universe = frozenset(base)
    sizes = range(0 if include_empty else 1, len(universe) + 1)
    els = [frozenset(c) for n in sizes for c in itertools.combinations(sorted(universe), n)]
    le = [(a, b) for a, b in itertools.product(els, repeat=2) if a >= b]
    merge = []
    for a, b in itertools.product(els, repeat=2):
        r = a & b
        if r or include_empty:
            merge.append((a, b, r))
    return FiniteIPoset(els, le, le, merge, name=name or f"powerset({set(universe)!r})")


def restrict_iposet(p: IPoset, pred: Callable[[Any], bool], name: str = "") -> IPoset:
    """Restrict a domain to the elements satisfying a monotone predicate.

    Monotone here means compatible with specifiedness: a predicate is a
    shape constraint, and anything *less* specified than a satisfying
    state must satisfy it too (``le(a, b)`` and ``pred(b)`` imply
    ``pred(a)``).  This is the sense needed for predicate-guarded
    untagging to stay lawful, and it keeps the least element inside
    every non-empty restriction.  Enumerable domains are re-tabled
    (dropping merge triples that leave the sub-carrier, which keeps
    merge sound) after an exhaustive check; abstract domains get a lazy
    wrapper.
    """
    els = p.elements
    if els is None:
        return RestrictedIPoset(p, pred, name=name)
    for a, b in itertools.product(els, repeat=2):
        if p.le(a, b) and pred(b) and not pred(a):
            raise NonMonotonePredicateError(f"predicate not monotone at {(a, b)!r}")
    sub = [e for e in els if pred(e)]
    le = [(a, b) for a, b in itertools.product(sub, repeat=2) if p.le(a, b)]
    idr = [(a, b) for a, b in itertools.product(sub, repeat=2) if p.ident(a, b)]
    merge = None
    if p.has_merge:
        merge = []
        for a, b in itertools.product(sub, repeat=2):
            r = p.merge(a, b)
            if r is not UNDEFINED and _index_of(sub, r) >= 0:
                merge.append((a, b, r))
    return FiniteIPoset(sub, le, idr, merge, name=name or (p.name + "_restricted" if p.name else ""))


_STANDARD_KINDS: dict[str, Callable] = {
    "discrete": discrete,
    "lift_omega": lift_omega,
    "product": product_iposet,
    "sum": sum_iposet,
    "powerset": powerset_iposet,
    "restrict": restrict_iposet,
}


def build_standard(kind: str, *args: Any, **kwargs: Any) -> IPoset:
    """Dispatch to one of the standard domain constructions by name."""
    try:
        ctor = _STANDARD_KINDS[kind]
    except KeyError:
        raise InvalidArgsError(f"unknown construction {kind!r}; choose from {sorted(_STANDARD_KINDS)}")
    try:
        return ctor(*args, **kwargs)
    except TypeError as exc:
        raise InvalidArgsError(f"bad arguments for {kind!r}: {exc}") from exc


def structurally_equal(p: IPoset, q: IPoset) -> bool:
    """Domain equality as used for composing lenses.

    Identical objects match; products and sums match component-wise;
    finite tables match by carrier and relations.  Distinct abstract
    domains are never considered equal.
    """
    if p is q:
        return True
    if isinstance(p, ProductIPoset) and isinstance(q, ProductIPoset):
        return structurally_equal(p.left, q.left) and structurally_equal(p.right, q.right)
    if isinstance(p, SumIPoset) and isinstance(q, SumIPoset):
        return structurally_equal(p.left, q.left) and structurally_equal(p.right, q.right)
    if isinstance(p, FiniteIPoset) and isinstance(q, FiniteIPoset):
        return (
            p.elements == q.elements
            and p._le == q._le
            and p._id == q._id
            and p._merge == q._merge
        )
    return False


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------
#
# Finite domains with string elements serialize to a line-oriented text
# format (see README for the grammar):
#
#     elem a
#     le a b        # a <= b; reflexive pairs are implied
#     id a b        # a is an identical update for b; reflexive implied
#     merge a b c   # a merged with b gives c
#
# '#' starts a comment; blank lines are ignored.


def dump_iposet(p: IPoset) -> str:
    """Render an enumerable domain with string elements to text."""
    els = _require_enumerable(p)
    for e in els:
        if not isinstance(e, str) or not e or any(ch.isspace() for ch in e) or e.startswith("#"):
            raise InvalidArgsError(f"element {e!r} is not a bare token")
    lines = [f"elem {e}" for e in els]
    lines += sorted(
        f"le {a} {b}" for a in els for b in els if a != b and p.le(a, b)
    )
    lines += sorted(
        f"id {a} {b}" for a in els for b in els if a != b and p.ident(a, b)
    )
    if p.has_merge:
        lines += sorted(
            f"merge {a} {b} {r}"
            for a in els
            for b in els
            for r in [p.merge(a, b)]
            if r is not UNDEFINED
        )
    return "\n".join(lines) + "\n"


def load_iposet(text: str, name: str = "") -> FiniteIPoset:
    """Parse the text format back into a validated finite domain."""
    els: list[str] = []
    le: list[tuple] = []
    idr: list[tuple] = []
    merge: list[tuple] = []
    saw_merge = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag, args = tokens[0], tokens[1:]
        try:
            if tag == "elem" and len(args) == 1:
                els.append(args[0])
            elif tag == "le" and len(args) == 2:
                le.append((args[0], args[1]))
            elif tag == "id" and len(args) == 2:
                idr.append((args[0], args[1]))
            elif tag == "merge" and len(args) == 3:
                merge.append((args[0], args[1], args[2]))
                saw_merge = True
            else:
                raise IPosetError(f"line {lineno}: cannot parse {raw!r}")
        except IPosetError:
            raise
    le += [(e, e) for e in els]
    idr += [(e, e) for e in els]
    return FiniteIPoset(els, le, idr, merge if saw_merge else None, name=name)

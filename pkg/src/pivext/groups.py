"""Finite groups as validated multiplication tables, 0-based element indices.

Construction always validates the full group axioms; every value is
immutable after construction, so sharing across threads is safe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    NoIdentity,
    NoInverse,
    NotAbelian,
    NotAssociative,
    NotClosed,
    NotNormal,
    UnsupportedParameter,
)
from .snf import smith_with_transforms

MAX_ORDER = 64  # construction guard; symmetric:5 is the one documented exception


class FiniteGroup:
    """A finite group given by its multiplication table.

    table[a][b] is the index of the product a*b.  The identity index is
    detected during validation and need not be 0.
    """

    __slots__ = ("order", "table", "labels", "identity", "_inv", "_abelian", "source")

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
        source: Optional[dict] = None,
    ):
        n = len(table)
        rows = []
        for a, row in enumerate(table):
            if len(row) != n:
                raise NotClosed(f"row {a} has length {len(row)}, expected {n}")
            for b, v in enumerate(row):
                if not isinstance(v, int) or not (0 <= v < n):
                    raise NotClosed(f"entry ({a},{b}) = {v!r} out of range 0..{n - 1}")
            rows.append(tuple(row))
        self.order = n
        self.table = tuple(rows)
        if labels is not None:
            if len(labels) != n:
                raise NotClosed(f"got {len(labels)} labels for {n} elements")
            self.labels = tuple(str(x) for x in labels)
        else:
            self.labels = tuple(str(i) for i in range(n))
        self.identity = self._find_identity()
        self._inv = self._find_inverses()
        self._check_associative()
        self._abelian: Optional[bool] = None
        self.source = source

    def _find_identity(self) -> int:
        for e in range(self.order):
            row = self.table[e]
            if all(row[x] == x for x in range(self.order)) and all(
                self.table[x][e] == x for x in range(self.order)
            ):
                return e
        raise NoIdentity("no two-sided identity element")

    def _find_inverses(self) -> tuple[int, ...]:
        inv = []
        e = self.identity
        for a in range(self.order):
            b = next(
                (x for x in range(self.order) if self.table[a][x] == e and self.table[x][a] == e),
                None,
            )
            if b is None:
                raise NoInverse(f"element {a} ({self.labels[a]}) has no two-sided inverse")
            inv.append(b)
        return tuple(inv)

    def _check_associative(self):
        t = self.table
        rng = range(self.order)
        for a in rng:
            ta = t[a]
            for b in rng:
                tab = t[ta[b]]
                tb = t[b]
                for c in rng:
                    if tab[c] != ta[tb[c]]:
                        raise NotAssociative(f"({a}*{b})*{c} != {a}*({b}*{c})")

    # -- queries ---------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conj(self, g: int, x: int) -> int:
        """g^-1 x g, the conjugation convention used throughout."""
        return self.table[self.table[self._inv[g]][x]][g]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def exponent(self) -> int:
        out = 1
        for a in range(self.order):
            o = self.element_order(a)
            out = out * o // _gcd(out, o)
        return out

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = all(
                self.table[a][b] == self.table[b][a]
                for a in range(self.order)
                for b in range(a + 1, self.order)
            )
        return self._abelian

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        for g in gens:
            if not (0 <= g < self.order):
                raise NotClosed(f"generator {g} out of range")
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    def commutator_subgroup_members(self) -> frozenset[int]:
        comms = {
            self.table[self.table[self._inv[a]][self._inv[b]]][self.table[a][b]]
            for a in range(self.order)
            for b in range(self.order)
        }
        return self.closure(comms)

    def center_members(self) -> frozenset[int]:
        return frozenset(
            z
            for z in range(self.order)
            if all(self.table[z][x] == self.table[x][z] for x in range(self.order))
        )

    def label_of(self, a: int) -> str:
        return self.labels[a]

    def index_of_label(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise NotClosed(f"no element labelled {label!r}") from None

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def table_key(self) -> tuple:
        """Hashable identity of the abstract table, used for caching."""
        return self.table


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def group_from_table(
    table: Sequence[Sequence[int]],
    labels: Optional[Sequence[str]] = None,
    source: Optional[dict] = None,
) -> FiniteGroup:
    """Validate a multiplication table and wrap it as a FiniteGroup."""
    return FiniteGroup(table, labels, source)


# -- subgroups -------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """A validated subgroup, stored as a sorted member index tuple."""

    parent: FiniteGroup
    members: tuple[int, ...]
    _group_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        mem = set(self.members)
        G = self.parent
        if G.identity not in mem:
            raise NotClosed("subgroup misses the identity")
        for a in self.members:
            if G.inv(a) not in mem:
                raise NotClosed(f"subgroup misses the inverse of {G.labels[a]}")
            for b in self.members:
                if G.mul(a, b) not in mem:
                    raise NotClosed(
                        f"subgroup not closed: {G.labels[a]}*{G.labels[b]} escapes"
                    )
        object.__setattr__(self, "members", tuple(sorted(mem)))

    @property
    def order(self) -> int:
        return len(self.members)

    def is_normal(self) -> bool:
        return self.normality_witness() is None

    def normality_witness(self) -> Optional[tuple[int, int]]:
        """(g, n) with g^-1 n g outside the subgroup, or None if normal."""
        mem = set(self.members)
        G = self.parent
        for g in range(G.order):
            for n in self.members:
                if G.conj(g, n) not in mem:
                    return (g, n)
        return None

    def require_normal(self):
        w = self.normality_witness()
        if w is not None:
            g, n = w
            G = self.parent
            raise NotNormal(
                f"conjugate {G.labels[g]}^-1 {G.labels[n]} {G.labels[g]} escapes the subgroup"
            )

    def is_abelian(self) -> bool:
        G = self.parent
        return all(
            G.mul(a, b) == G.mul(b, a) for a in self.members for b in self.members
        )

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """The subgroup as a standalone group plus the member index map.

        Element i of the returned group is self.members[i].
        """
        if "group" not in self._group_cache:
            pos = {m: i for i, m in enumerate(self.members)}
            table = [
                [pos[self.parent.mul(a, b)] for b in self.members] for a in self.members
            ]
            labels = [self.parent.labels[m] for m in self.members]
            self._group_cache["group"] = (FiniteGroup(table, labels), self.members)
        return self._group_cache["group"]


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing the given elements (and the identity)."""
    return Subgroup(G, tuple(sorted(G.closure(gens))))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (G.identity,))


def whole_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


# -- quotients ---------------------------------------------------------------


@dataclass(frozen=True)
class QuotientData:
    """Quotient group with projection and a normalized section.

    The section maps each coset to its minimal-index representative, except
    the identity coset which maps to the identity element.
    """

    parent: FiniteGroup
    subgroup: Subgroup
    quotient: FiniteGroup
    projection: tuple[int, ...]
    section: tuple[int, ...]

    def with_section(self, section: Sequence[int]) -> "QuotientData":
        """Same quotient with a different set-theoretic section.

        The replacement must hit each coset once and send the identity
        coset to the identity; used for section-independence experiments.
        """
        sec = tuple(section)
        if len(sec) != self.quotient.order:
            raise NotClosed("section length mismatch")
        for x, rep in enumerate(sec):
            if self.projection[rep] != x:
                raise NotClosed(f"section({x}) lies in the wrong coset")
        if sec[self.quotient.identity] != self.parent.identity:
            raise NotClosed("section must send the identity coset to the identity")
        return QuotientData(self.parent, self.subgroup, self.quotient, self.projection, sec)


def quotient_with_section(G: FiniteGroup, N: Subgroup) -> QuotientData:
    """G/N with the canonical minimal-representative section, N normal."""
    if N.parent is not G:
        raise NotClosed("subgroup belongs to a different group")
    N.require_normal()
    mem = set(N.members)
    coset_of = [-1] * G.order
    reps: list[int] = []
    for a in range(G.order):
        if coset_of[a] >= 0:
            continue
        idx = len(reps)
        members = sorted(G.mul(a, n) for n in N.members)
        for m in members:
            coset_of[m] = idx
        reps.append(members[0])
    # sort cosets by representative for a deterministic element order
    order = sorted(range(len(reps)), key=lambda i: reps[i])
    rank = {old: new for new, old in enumerate(order)}
    coset_of = [rank[c] for c in coset_of]
    reps = [reps[old] for old in order]
    q = len(reps)
    table = [[coset_of[G.mul(reps[x], reps[y])] for y in range(q)] for x in range(q)]
    labels = [G.labels[r] for r in reps]
    quotient = FiniteGroup(table, labels)
    section = list(reps)
    section[quotient.identity] = G.identity
    return QuotientData(G, N, quotient, tuple(coset_of), tuple(section))


def conjugation_map(G: FiniteGroup, N: Subgroup, g: int) -> dict[int, int]:
    """The automorphism n -> g^-1 n g of a normal subgroup, as an index map."""
    N.require_normal()
    return {n: G.conj(g, n) for n in N.members}


# -- abelian structure -------------------------------------------------------


@dataclass(frozen=True)
class AbelianDecomposition:
    """Basis presentation A = <b_1> x ... x <b_k> with d_1 | d_2 | ... | d_k.

    coords[a] gives the coefficient tuple of element a in the basis; the
    basis elements are element indices of the decomposed group.
    """

    group: FiniteGroup
    factors: tuple[int, ...]
    basis: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...]

    def element_from_coords(self, vec: Sequence[int]) -> int:
        g = self.group.identity
        for b, d, c in zip(self.basis, self.factors, vec):
            for _ in range(c % d):
                g = self.group.mul(g, b)
        return g


def abelian_decomposition(
    A: FiniteGroup, preferred: Optional[Sequence[int]] = None
) -> AbelianDecomposition:
    """Invariant-factor decomposition of an abelian group from its table.

    When ``preferred`` holds a single element whose order equals |A|, that
    element is used as the basis of the (necessarily cyclic) group, which
    keeps user-specified generators meaningful in reports.
    """
    if not A.is_abelian:
        raise NotAbelian("decomposition requires an abelian group")
    n = A.order
    if n == 1:
        return AbelianDecomposition(A, (), (), ((),))
    if preferred:
        for g in preferred:
            if A.element_order(g) == n:
                d = (n,)
                coords = [None] * n
                x, k = A.identity, 0
                for _ in range(n):
                    coords[x] = (k,)
                    x = A.mul(x, g)
                    k += 1
                return AbelianDecomposition(A, d, (g,), tuple(coords))
    # relation presentation on all elements: e_a + e_b - e_{ab} = 0
    rel_cols: list[list[int]] = []
    seen = set()
    for a in range(n):
        for b in range(a, n):
            c = A.mul(a, b)
            col = [0] * n
            col[a] += 1
            col[b] += 1
            col[c] -= 1
            key = tuple(col)
            if key not in seen and any(col):
                seen.add(key)
                rel_cols.append(col)
    matrix = [[col[i] for col in rel_cols] for i in range(n)]
    d, s, _, sinv, _ = smith_with_transforms(matrix, need_t=False)
    factors = []
    basis = []
    for i in range(n):
        di = d[i][i] if i < len(rel_cols) else 0
        if di == 0:
            raise NotClosed("relation matrix does not present a finite group")
        if di == 1:
            continue
        factors.append(di)
        # basis element i = product of generators with exponents Sinv[:, i]
        g = A.identity
        for j in range(n):
            e = sinv[j][i] % A.element_order(j)
            for _ in range(e):
                g = A.mul(g, j)
        basis.append(g)
    coords = []
    for a in range(n):
        vec = []
        k = 0
        for i in range(n):
            di = d[i][i] if i < len(rel_cols) else 0
            if di == 1:
                continue
            vec.append(s[i][a] % di)
            k += 1
        coords.append(tuple(vec))
    dec = AbelianDecomposition(A, tuple(factors), tuple(basis), tuple(coords))
    for a in range(n):
        if dec.element_from_coords(dec.coords[a]) != a:
            raise NotClosed("abelian decomposition failed self-check")
    return dec


def product_of_cyclics(factors: Sequence[int]) -> FiniteGroup:
    """Direct sum of Z/d_i with mixed-radix element ordering."""
    factors = tuple(int(d) for d in factors)
    n = 1
    for d in factors:
        n *= d
    strides = []
    acc = 1
    for d in reversed(factors):
        strides.append(acc)
        acc *= d
    strides.reverse()

    def decode(x):
        out = []
        for d, s in zip(factors, strides):
            out.append((x // s) % d)
        return out

    def encode(vec):
        return sum((c % d) * s for c, d, s in zip(vec, factors, strides))

    table = [
        [encode([u + v for u, v in zip(decode(a), decode(b))]) for b in range(n)]
        for a in range(n)
    ]
    labels = ["(" + ",".join(str(c) for c in decode(a)) + ")" for a in range(n)]
    if len(factors) == 1:
        labels = [str(a) for a in range(n)]
    return FiniteGroup(table, labels)


def abelianization(G: FiniteGroup) -> tuple[FiniteGroup, tuple[int, ...]]:
    """G/[G,G] in invariant-factor form, with the projection index map."""
    comm = Subgroup(G, tuple(sorted(G.commutator_subgroup_members())))
    qd = quotient_with_section(G, comm)
    dec = abelian_decomposition(qd.quotient)
    ab = product_of_cyclics(dec.factors)
    strides = []
    acc = 1
    for d in reversed(dec.factors):
        strides.append(acc)
        acc *= d
    strides.reverse()
    proj = []
    for g in range(G.order):
        vec = dec.coords[qd.projection[g]]
        proj.append(sum(c * s for c, s in zip(vec, strides)))
    return ab, tuple(proj)


# -- standard families --------------------------------------------------------


def make_standard(kind: str, params) -> FiniteGroup:
    """Construct a named standard group with its documented element order.

    cyclic n:        residues 0..n-1
    dihedral 2n:     r^a s^b at index 2a+b (lexicographic in (a, b))
    quaternion 8:    1, -1, i, -i, j, -j, k, -k
    quaternion 4n:   x^a y^b at index 2a+b, y^2 = x^n
    symmetric n:     permutations in lexicographic one-line order
    elementary_abelian (p, k): base-p digit tuples
    direct_product (G, H): pair index a*|H| + b
    """
    if kind == "cyclic":
        n = _one_int(params, "cyclic")
        if not (1 <= n <= MAX_ORDER):
            raise UnsupportedParameter(f"cyclic order {n} outside 1..{MAX_ORDER}")
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        return FiniteGroup(table, [str(a) for a in range(n)],
                           source={"standard": {"kind": "cyclic", "params": [n]}})
    if kind == "dihedral":
        m = _one_int(params, "dihedral")
        if m % 2 != 0 or not (2 <= m <= MAX_ORDER):
            raise UnsupportedParameter(f"dihedral order {m} must be even, 2..{MAX_ORDER}")
        n = m // 2

        def enc(a, b):
            return 2 * (a % n) + (b % 2)

        table = [[0] * m for _ in range(m)]
        for a in range(n):
            for b in range(2):
                for c in range(n):
                    for dd in range(2):
                        a2 = a + c if b == 0 else a - c
                        table[enc(a, b)][enc(c, dd)] = enc(a2, b + dd)
        labels = []
        for a in range(n):
            for b in range(2):
                word = ("r" if a == 1 else f"r{a}" if a else "") + ("s" if b else "")
                labels.append(word or "e")
        return FiniteGroup(table, labels,
                           source={"standard": {"kind": "dihedral", "params": [m]}})
    if kind == "quaternion":
        m = _one_int(params, "quaternion")
        if m % 4 != 0 or not (8 <= m <= MAX_ORDER):
            raise UnsupportedParameter(
                f"quaternion order {m} must be a multiple of 4, 8..{MAX_ORDER}"
            )
        n = m // 2  # x has order n = 2k, y^2 = x^k
        k = n // 2
        if m == 8:
            # 1, -1, i, -i, j, -j, k, -k; pair (a, b) means x^a y^b with x=i, y=j
            order = [(0, 0), (2, 0), (1, 0), (3, 0), (0, 1), (2, 1), (1, 1), (3, 1)]
            labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        else:
            order = [(a, b) for a in range(n) for b in range(2)]
            labels = []
            for a, b in order:
                word = ("x" if a == 1 else f"x{a}" if a else "") + ("y" if b else "")
                labels.append(word or "e")
        pos = {ab: i for i, ab in enumerate(order)}

        def qmul(p, q):
            a, b = p
            c, dd = q
            a2 = a + c if b == 0 else a - c
            if b and dd:
                return ((a2 + k) % n, 0)
            return (a2 % n, (b + dd) % 2)

        table = [[pos[qmul(p, q)] for q in order] for p in order]
        return FiniteGroup(table, labels,
                           source={"standard": {"kind": "quaternion", "params": [m]}})
    if kind == "symmetric":
        n = _one_int(params, "symmetric")
        if not (1 <= n <= 5):
            raise UnsupportedParameter(f"symmetric degree {n} outside 1..5")
        perms = list(itertools.permutations(range(n)))
        pos = {p: i for i, p in enumerate(perms)}
        # product p*q applies q first: (p*q)(i) = p[q[i]]
        table = [
            [pos[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms
        ]
        labels = ["".join(str(i) for i in p) for p in perms]
        return FiniteGroup(table, labels,
                           source={"standard": {"kind": "symmetric", "params": [n]}})
    if kind == "elementary_abelian":
        if not (isinstance(params, (list, tuple)) and len(params) == 2):
            raise UnsupportedParameter("elementary_abelian expects (p, k)")
        p, k = int(params[0]), int(params[1])
        if p < 2 or any(p % q == 0 for q in range(2, p)) or k < 1 or p**k > MAX_ORDER:
            raise UnsupportedParameter(f"elementary_abelian({p},{k}) unsupported")
        g = product_of_cyclics([p] * k)
        return FiniteGroup(g.table, g.labels,
                           source={"standard": {"kind": "elementary_abelian", "params": [p, k]}})
    if kind == "direct_product":
        if not (isinstance(params, (list, tuple)) and len(params) == 2):
            raise UnsupportedParameter("direct_product expects a pair of groups")
        g1, g2 = params
        if not isinstance(g1, FiniteGroup) or not isinstance(g2, FiniteGroup):
            raise UnsupportedParameter("direct_product expects FiniteGroup operands")
        n = g1.order * g2.order
        if n > MAX_ORDER:
            raise UnsupportedParameter(f"product order {n} exceeds {MAX_ORDER}")
        m2 = g2.order
        table = [
            [
                (g1.mul(a // m2, b // m2)) * m2 + g2.mul(a % m2, b % m2)
                for b in range(n)
            ]
            for a in range(n)
        ]
        labels = [
            f"({g1.labels[a // m2]},{g2.labels[a % m2]})" for a in range(n)
        ]
        src = None
        if g1.source and g2.source:
            src = {"standard": {"kind": "direct_product",
                                "params": [g1.source, g2.source]}}
        return FiniteGroup(table, labels, source=src)
    raise UnsupportedParameter(f"unknown standard family {kind!r}")


def _one_int(params, name: str) -> int:
    if isinstance(params, int):
        return params
    if isinstance(params, (list, tuple)) and len(params) == 1:
        return int(params[0])
    raise UnsupportedParameter(f"{name} expects a single integer parameter")


def all_subgroups(G: FiniteGroup, max_gens: int = 4) -> list[Subgroup]:
    """Every subgroup generated by at most max_gens elements, plus the whole group.

    Exhaustive for the shipped catalog (order <= 24 needs at most rank 4).
    """
    found: dict[frozenset[int], Subgroup] = {}
    triv = trivial_subgroup(G)
    found[frozenset(triv.members)] = triv
    elems = [x for x in range(G.order) if x != G.identity]
    for size in range(1, max_gens + 1):
        for combo in itertools.combinations(elems, size):
            mem = G.closure(combo)
            if mem not in found:
                found[mem] = Subgroup(G, tuple(sorted(mem)))
    whole = frozenset(range(G.order))
    if whole not in found:
        found[whole] = whole_subgroup(G)
    return sorted(found.values(), key=lambda s: (s.order, s.members))

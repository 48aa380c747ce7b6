"""Exact Q/Z arithmetic, characters of finite abelian groups, twisted modules.

Roots of unity are modelled additively: the fraction a/b stands for
exp(2*pi*i*a/b), so character theory stays in exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import NotAbelian, NotClosed, SchemaError
from .groups import AbelianDecomposition, FiniteGroup, Subgroup, abelian_decomposition
from .snf import lcm_of


class QZ:
    """An element of Q/Z in reduced form, 0 <= num < den, gcd(num, den) = 1.

    >>> QZ(3, 6)
    QZ(1, 2)
    >>> QZ(1, 4) + QZ(3, 4)
    QZ(0, 1)
    >>> (QZ(1, 6) * 4).as_string()
    '2/3'
    """

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        if den == 0:
            raise SchemaError("fraction with zero denominator")
        if den < 0:
            num, den = -num, -den
        num %= den
        g = gcd(num, den)
        self.num = num // g
        self.den = den // g

    @staticmethod
    def zero() -> "QZ":
        return QZ(0, 1)

    @staticmethod
    def parse(text: str) -> "QZ":
        """Parse 'a/b' or a bare integer (which is 0 in Q/Z)."""
        s = text.strip()
        if "/" in s:
            a, _, b = s.partition("/")
            try:
                return QZ(int(a), int(b))
            except ValueError as exc:
                raise SchemaError(f"bad fraction {text!r}") from exc
        try:
            return QZ(int(s), 1)
        except ValueError as exc:
            raise SchemaError(f"bad fraction {text!r}") from exc

    def __add__(self, other: "QZ") -> "QZ":
        return QZ(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "QZ") -> "QZ":
        return QZ(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "QZ":
        return QZ(-self.num, self.den)

    def __mul__(self, k: int) -> "QZ":
        return QZ(self.num * k, self.den)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, QZ) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __lt__(self, other: "QZ") -> bool:
        return self.num * other.den < other.num * self.den

    def __bool__(self) -> bool:
        return self.num != 0

    def order(self) -> int:
        """Additive order, i.e. the reduced denominator."""
        return self.den

    def as_string(self) -> str:
        return "0" if self.num == 0 else f"{self.num}/{self.den}"

    def __repr__(self):
        return f"QZ({self.num}, {self.den})"


@dataclass(frozen=True)
class AbelianGroup:
    """A finite abelian group by invariant factors d_1 | d_2 | ... | d_k."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        f = self.invariant_factors
        for i, d in enumerate(f):
            if d < 2:
                raise SchemaError(f"invariant factor {d} < 2")
            if i and d % f[i - 1] != 0:
                raise SchemaError(f"invariant factors {f} are not a divisibility chain")

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(v % d for v, d in zip(vec, self.invariant_factors))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return tuple((a + b) % d for a, b, d in zip(u, v, self.invariant_factors))

    def neg(self, u: Sequence[int]) -> tuple[int, ...]:
        return tuple((-a) % d for a, d in zip(u, self.invariant_factors))

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def describe(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


class Character:
    """A homomorphism from a finite group into Q/Z, stored per element."""

    __slots__ = ("group", "values")

    def __init__(self, group: FiniteGroup, values: Sequence[QZ]):
        if len(values) != group.order:
            raise SchemaError(f"character needs {group.order} values, got {len(values)}")
        self.group = group
        self.values = tuple(values)
        if self.values[group.identity]:
            raise SchemaError("character is nonzero on the identity")
        for a in range(group.order):
            for b in range(group.order):
                if self.values[group.mul(a, b)] != self.values[a] + self.values[b]:
                    raise SchemaError(
                        f"values are not multiplicative at ({group.labels[a]},{group.labels[b]})"
                    )

    def __call__(self, a: int) -> QZ:
        return self.values[a]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Character)
            and self.group is other.group
            and self.values == other.values
        )

    def __hash__(self):
        return hash(self.values)

    def is_trivial(self) -> bool:
        return all(not v for v in self.values)

    def sort_key(self) -> tuple:
        return tuple((v.num, v.den) for v in self.values)

    def __add__(self, other: "Character") -> "Character":
        if other.group is not self.group:
            raise SchemaError("characters live on different groups")
        return Character(self.group, [a + b for a, b in zip(self.values, other.values)])

    def __neg__(self) -> "Character":
        return Character(self.group, [-v for v in self.values])

    def restrict_values(self, members: Sequence[int]) -> tuple[QZ, ...]:
        return tuple(self.values[m] for m in members)

    def as_strings(self) -> list[str]:
        return [v.as_string() for v in self.values]

    def __repr__(self):
        body = ", ".join(
            f"{self.group.labels[a]}->{self.values[a].as_string()}"
            for a in range(self.group.order)
            if self.values[a]
        )
        return f"Character({body or '0'})"


def trivial_character(group: FiniteGroup) -> Character:
    return Character(group, [QZ.zero()] * group.order)


@dataclass(frozen=True)
class DualGroup:
    """Hom(A, Q/Z) presented on the invariant-factor basis of A."""

    group: FiniteGroup
    decomposition: AbelianDecomposition
    carrier: AbelianGroup
    basis: tuple[Character, ...]

    def pairing(self, a: int, chi_coords: Sequence[int]) -> QZ:
        """Evaluate the character with the given coordinates at element a."""
        out = QZ.zero()
        for c, d, x in zip(
            self.decomposition.coords[a], self.carrier.invariant_factors, chi_coords
        ):
            out = out + QZ(c * x, d)
        return out

    def character_from_coords(self, coords: Sequence[int]) -> Character:
        coords = self.carrier.reduce(coords)
        return Character(
            self.group, [self.pairing(a, coords) for a in range(self.group.order)]
        )

    def coords_of(self, chi: Character) -> tuple[int, ...]:
        """Coordinates of a character: chi(b_i) must be a multiple of 1/d_i."""
        out = []
        for b, d in zip(self.decomposition.basis, self.carrier.invariant_factors):
            v = chi(b)
            if d % v.den != 0:
                raise SchemaError(
                    f"character value {v.as_string()} at basis element "
                    f"{self.group.labels[b]} has order not dividing {d}"
                )
            out.append(v.num * (d // v.den) % d)
        return tuple(out)

    def all_characters(self) -> list[Character]:
        return [self.character_from_coords(c) for c in self.carrier.elements()]


def dual_group(A: FiniteGroup, preferred: Optional[Sequence[int]] = None) -> DualGroup:
    """Hom(A, Q/Z) with basis characters dual to a decomposition of A."""
    if not A.is_abelian:
        raise NotAbelian("dual group requires an abelian group")
    dec = abelian_decomposition(A, preferred)
    carrier = AbelianGroup(dec.factors)
    basis = []
    for i, d in enumerate(dec.factors):
        vals = [QZ(dec.coords[a][i], d) for a in range(A.order)]
        basis.append(Character(A, vals))
    return DualGroup(A, dec, carrier, tuple(basis))


class GModule:
    """A finite abelian coefficient group with a G-action by automorphisms.

    The carrier is presented as sum of Z/d_i; the action of g is an integer
    matrix M_g acting on coefficient columns, well defined modulo the
    invariant factors.  Construction validates the representation property
    M_g M_h = M_{gh} and well-definedness d_i * M[j][i] = 0 mod d_j.
    """

    __slots__ = ("group", "carrier", "matrices", "name")

    def __init__(
        self,
        group: FiniteGroup,
        carrier: AbelianGroup,
        matrices: Sequence[Sequence[Sequence[int]]],
        name: str = "module",
    ):
        self.group = group
        self.carrier = carrier
        self.name = name
        k = carrier.rank
        if len(matrices) != group.order:
            raise SchemaError("need one action matrix per group element")
        mats = []
        for g, m in enumerate(matrices):
            rows = [tuple(int(v) for v in row) for row in m]
            if len(rows) != k or any(len(r) != k for r in rows):
                raise SchemaError(f"action matrix of element {g} is not {k}x{k}")
            mats.append(tuple(rows))
        self.matrices = tuple(mats)
        f = carrier.invariant_factors
        for g, m in enumerate(self.matrices):
            for i in range(k):
                for j in range(k):
                    if (f[j] * m[i][j]) % f[i] != 0:
                        raise SchemaError(
                            f"action of {group.labels[g]} is not well defined mod factors"
                        )
        e = group.identity
        ident = tuple(
            tuple(int(i == j) for j in range(k)) for i in range(k)
        )
        if self._reduced(self.matrices[e]) != self._reduced(ident):
            raise SchemaError("identity does not act as the identity matrix")
        for g in range(group.order):
            for h in range(group.order):
                lhs = self._matmul(self.matrices[g], self.matrices[h])
                rhs = self.matrices[group.mul(g, h)]
                if self._reduced(lhs) != self._reduced(rhs):
                    raise SchemaError(
                        f"action fails at ({group.labels[g]},{group.labels[h]})"
                    )

    def _reduced(self, m) -> tuple:
        f = self.carrier.invariant_factors
        return tuple(
            tuple(m[i][j] % f[i] for j in range(self.carrier.rank))
            for i in range(self.carrier.rank)
        )

    @staticmethod
    def _matmul(a, b):
        k = len(a)
        return tuple(
            tuple(sum(a[i][l] * b[l][j] for l in range(k)) for j in range(k))
            for i in range(k)
        )

    def act(self, g: int, vec: Sequence[int]) -> tuple[int, ...]:
        m = self.matrices[g]
        k = self.carrier.rank
        return self.carrier.reduce(
            [sum(m[i][j] * vec[j] for j in range(k)) for i in range(k)]
        )

    def act_matrix(self, g: int) -> tuple[tuple[int, ...], ...]:
        return self.matrices[g]

    def is_trivial_action(self) -> bool:
        ident = self._reduced(
            tuple(
                tuple(int(i == j) for j in range(self.carrier.rank))
                for i in range(self.carrier.rank)
            )
        )
        return all(self._reduced(m) == ident for m in self.matrices)

    def exponent(self) -> int:
        return self.carrier.exponent()

    def __repr__(self):
        return f"GModule({self.name}: {self.carrier.describe()} over |G|={self.group.order})"


def trivial_module(G: FiniteGroup, factors: Sequence[int], name: str = "trivial") -> GModule:
    carrier = AbelianGroup(tuple(int(d) for d in factors if int(d) > 1))
    k = carrier.rank
    ident = [[int(i == j) for j in range(k)] for i in range(k)]
    return GModule(G, carrier, [ident] * G.order, name=name)


def mu_module(G: FiniteGroup, N: int) -> GModule:
    """Z/N with trivial G-action, the finite stand-in for roots of unity."""
    if N < 1:
        raise SchemaError(f"mu level {N} must be >= 1")
    return trivial_module(G, [N] if N > 1 else [], name=f"mu_{N}")


def conj_character_module(
    D: FiniteGroup, C: Subgroup, preferred: Optional[Sequence[int]] = None
):
    """Characters of a normal abelian subgroup as a module over G = D/C.

    The action is (g . chi)(c) = chi(s(g)^-1 c s(g)); it is independent of
    the chosen section representative because C is abelian.  Returns the
    module together with the dual-group presentation and the quotient data.
    ``preferred`` selects the dual basis (subgroup-local indices).
    """
    from .groups import quotient_with_section

    C.require_normal()
    if not C.is_abelian():
        raise NotAbelian("conjugation character module needs an abelian subgroup")
    cgroup, members = C.as_group()
    pos = {m: i for i, m in enumerate(members)}
    dual = dual_group(cgroup, preferred)
    qd = quotient_with_section(D, C)
    G = qd.quotient
    carrier = dual.carrier
    k = carrier.rank
    mats = []
    for g in range(G.order):
        rep = qd.section[g]
        m = [[0] * k for _ in range(k)]
        for j in range(k):
            dj = carrier.invariant_factors[j]
            for i in range(k):
                bi = dual.decomposition.basis[i]
                conj = pos[D.conj(rep, members[bi])]
                coeff = dual.decomposition.coords[conj][j]
                di = carrier.invariant_factors[i]
                num = coeff * di
                if num % dj != 0:
                    raise SchemaError("conjugation action is not integral")
                m[i][j] = num // dj
        mats.append(m)
    module = GModule(G, carrier, mats, name="dual-characters")
    _check_representative_independence(D, qd, module, dual, pos, members)
    return module, dual, qd


def _check_representative_independence(D, qd, module, dual, pos, members):
    # (g . chi_j)(b_i) must agree for every representative of each coset
    k = module.carrier.rank
    for rep in range(D.order):
        g = qd.projection[rep]
        expected = module.act_matrix(g)
        for i in range(k):
            bi = dual.decomposition.basis[i]
            di = module.carrier.invariant_factors[i]
            conj = pos[D.conj(rep, members[bi])]
            for j in range(k):
                lhs = dual.pairing(conj, _unit(k, j))
                if lhs != QZ(expected[i][j], di):
                    raise SchemaError("conjugation action depends on the representative")


def _unit(k: int, j: int) -> tuple[int, ...]:
    return tuple(int(i == j) for i in range(k))


def inv_center_module(D: FiniteGroup, C: Subgroup) -> tuple[GModule, dict]:
    """C x Hom(C, Q/Z) with the simultaneous conjugation action of D/C.

    This is the invertible-center coefficient module of the pointed case;
    the first factor comes from the standard classification of invertible
    center objects and is flagged in report notes because only the
    character factor enters the transgression analysis.
    """
    from .groups import quotient_with_section

    C.require_normal()
    if not C.is_abelian():
        raise NotAbelian("center module needs an abelian subgroup")
    cgroup, members = C.as_group()
    pos = {m: i for i, m in enumerate(members)}
    dec = abelian_decomposition(cgroup)
    dual = dual_group(cgroup)
    qd = quotient_with_section(D, C)
    G = qd.quotient
    k = len(dec.factors)
    # interleave (d_i, d_i): still a divisibility chain
    factors = []
    for d in dec.factors:
        factors.extend([d, d])
    carrier = AbelianGroup(tuple(factors))
    char_mod, _, _ = conj_character_module(D, C)
    mats = []
    for g in range(G.order):
        rep = qd.section[g]
        m = [[0] * (2 * k) for _ in range(2 * k)]
        # C factor: c -> s(g) c s(g)^-1 (left action); column j is the
        # coordinate vector of the image of basis element j
        inv_rep = D.inv(rep)
        for j in range(k):
            b = dec.basis[j]
            image = pos[D.conj(inv_rep, members[b])]
            for i in range(k):
                m[2 * i][2 * j] = dec.coords[image][i]
        cm = char_mod.act_matrix(g)
        for i in range(k):
            for j in range(k):
                m[2 * i + 1][2 * j + 1] = cm[i][j]
        mats.append(m)
    module = GModule(G, carrier, mats, name="inv-center")
    meta = {
        "quotient": qd,
        "decomposition": dec,
        "dual": dual,
        "note": (
            "coefficients are C x Hom(C, Q/Z); the C factor follows the standard "
            "classification of invertible center objects of a pointed category"
        ),
    }
    return module, meta


def character_from_generator_values(
    dual: DualGroup, fractions: Sequence[QZ]
) -> Character:
    """Build a character from values on the canonical basis of the group."""
    if len(fractions) != dual.carrier.rank:
        raise SchemaError(
            f"expected {dual.carrier.rank} generator values, got {len(fractions)}"
        )
    coords = []
    for v, d in zip(fractions, dual.carrier.invariant_factors):
        if d % v.den != 0:
            raise SchemaError(
                f"value {v.as_string()} has order {v.den}, not dividing the "
                f"generator order {d}"
            )
        coords.append(v.num * (d // v.den))
    return dual.character_from_coords(coords)


def hom_to_qz(G: FiniteGroup) -> list[Character]:
    """All homomorphisms G -> Q/Z, i.e. characters of the abelianization."""
    from .groups import abelianization

    ab, proj = abelianization(G)
    dualab = dual_group(ab)
    out = []
    for chi in dualab.all_characters():
        out.append(Character(G, [chi(proj[g]) for g in range(G.order)]))
    out.sort(key=lambda c: c.sort_key())
    return out

"""Normalized bar-resolution cochains and group cohomology in degrees 1..3.

Cochains are functions on tuples of non-identity elements (the normalized
complex), valued either in a finite GModule or in Q/Z ("kx" coefficients,
the additive model of the multiplicative group of the ground field).

Group cohomology with kx coefficients is computed as integral cohomology
one degree up: the torsion of H^{n+1}(G, Z) equals H^n(G, kx) because the
divisible part of the field's unit group contributes nothing for a finite
group.  With finite twisted coefficients the cocycle lattice is extracted
from a congruence kernel and the quotient taken by coboundaries plus
carrier relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from .coefficients import AbelianGroup, GModule, QZ
from .errors import CoefficientMismatch, NotACocycle, TooLarge
from .groups import FiniteGroup
from .snf import (
    invariant_factors,
    kernel_basis_mod,
    lcm_of,
    quotient_invariant_factors,
    smith_with_transforms,
    sparse_invariant_factors,
)

KX = "kx"  # marker for Q/Z-valued coefficients with trivial action

Coefficients = Union[GModule, str]


class Cochain:
    """A normalized n-cochain: zero whenever any argument is the identity.

    values maps tuples of non-identity element indices to either QZ (kx
    coefficients) or carrier coefficient tuples (GModule coefficients);
    missing tuples are zero.
    """

    __slots__ = ("degree", "group", "coefficients", "values")

    def __init__(
        self,
        degree: int,
        group: FiniteGroup,
        coefficients: Coefficients,
        values: Optional[dict] = None,
    ):
        self.degree = degree
        self.group = group
        self.coefficients = coefficients
        clean = {}
        e = group.identity
        for t, v in (values or {}).items():
            t = tuple(t)
            if len(t) != degree:
                raise CoefficientMismatch(f"tuple {t} has wrong arity for degree {degree}")
            if e in t:
                if self._nonzero(v):
                    raise CoefficientMismatch("normalized cochain nonzero on an identity tuple")
                continue
            if isinstance(coefficients, GModule):
                v = coefficients.carrier.reduce(v)
            if self._nonzero(v):
                clean[t] = v
        self.values = clean

    def _nonzero(self, v) -> bool:
        if isinstance(v, QZ):
            return bool(v)
        return any(v)

    def zero_value(self):
        if self.coefficients == KX:
            return QZ.zero()
        return self.coefficients.carrier.zero()

    def value(self, t: Sequence[int]):
        t = tuple(t)
        if self.group.identity in t:
            return self.zero_value()
        return self.values.get(t, self.zero_value())

    def is_zero(self) -> bool:
        return not self.values

    def _require_compatible(self, other: "Cochain"):
        if (
            self.group is not other.group
            or self.degree != other.degree
            or not _same_coefficients(self.coefficients, other.coefficients)
        ):
            raise CoefficientMismatch("cochain operands are incompatible")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._require_compatible(other)
        out = dict(self.values)
        for t, v in other.values.items():
            cur = out.get(t)
            if cur is None:
                out[t] = v
            else:
                out[t] = cur + v if isinstance(v, QZ) else self.coefficients.carrier.add(cur, v)
        return Cochain(self.degree, self.group, self.coefficients, out)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __neg__(self) -> "Cochain":
        out = {
            t: (-v if isinstance(v, QZ) else self.coefficients.carrier.neg(v))
            for t, v in self.values.items()
        }
        return Cochain(self.degree, self.group, self.coefficients, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cochain)
            and self.group is other.group
            and self.degree == other.degree
            and _same_coefficients(self.coefficients, other.coefficients)
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.values.items()))))

    def nonidentity_tuples(self) -> Iterable[tuple[int, ...]]:
        e = self.group.identity
        pool = [x for x in range(self.group.order) if x != e]
        return itertools.product(pool, repeat=self.degree)

    def to_json(self) -> dict:
        vals = {}
        for t in sorted(self.values):
            key = ",".join(self.group.labels[x] for x in t)
            v = self.values[t]
            vals[key] = v.as_string() if isinstance(v, QZ) else list(v)
        return {"degree": self.degree, "values": vals}

    def __repr__(self):
        return f"Cochain(degree={self.degree}, support={len(self.values)})"


def _same_coefficients(a: Coefficients, b: Coefficients) -> bool:
    if a == KX or b == KX:
        return a == b
    return a is b


def zero_cochain(degree: int, group: FiniteGroup, coefficients: Coefficients) -> Cochain:
    return Cochain(degree, group, coefficients, {})


def cochain_from_function(degree, group, coefficients, fn) -> Cochain:
    vals = {}
    e = group.identity
    pool = [x for x in range(group.order) if x != e]
    for t in itertools.product(pool, repeat=degree):
        vals[t] = fn(*t)
    return Cochain(degree, group, coefficients, vals)


def differential(f: Cochain) -> Cochain:
    """The bar differential, written additively.

    (df)(g_1..g_{n+1}) = g_1.f(g_2..) + sum_i (-1)^i f(..g_i g_{i+1}..)
                         + (-1)^{n+1} f(g_1..g_n)
    """
    G = f.group
    n = f.degree
    coeffs = f.coefficients
    kx = coeffs == KX
    module = None if kx else coeffs
    if module is not None and module.group is not G:
        raise CoefficientMismatch("coefficient module lives over a different group")
    vals = {}
    e = G.identity
    pool = [x for x in range(G.order) if x != e]
    for t in itertools.product(pool, repeat=n + 1):
        acc = f.value(t[1:])
        if not kx:
            acc = module.act(t[0], acc)
        sign = -1
        for i in range(n):
            merged = t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2 :]
            term = f.value(merged)
            if sign > 0:
                acc = acc + term if kx else module.carrier.add(acc, term)
            else:
                acc = acc - term if kx else module.carrier.add(acc, module.carrier.neg(term))
            sign = -sign
        term = f.value(t[:n])
        if sign > 0:
            acc = acc + term if kx else module.carrier.add(acc, term)
        else:
            acc = acc - term if kx else module.carrier.add(acc, module.carrier.neg(term))
        vals[t] = acc
    return Cochain(n + 1, G, coeffs, vals)


def is_cocycle(f: Cochain) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Whether df = 0, with the first failing tuple as witness."""
    df = differential(f)
    for t in sorted(df.values):
        return False, t
    return True, None


@dataclass(frozen=True)
class CohomologyClass:
    """A cocycle together with its ambient cohomology descriptor."""

    representative: Cochain
    degree: int
    group_order: int
    coefficient_desc: str
    ambient: Optional[AbelianGroup] = None

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "coefficients": self.coefficient_desc,
            "representative": self.representative.to_json(),
        }
        if self.ambient is not None:
            out["ambient_invariant_factors"] = list(self.ambient.invariant_factors)
            out["ambient_order"] = self.ambient.order
        return out


# ---------------------------------------------------------------------------
# coboundary solving for Q/Z-valued cocycles
# ---------------------------------------------------------------------------


def cocycle_level(f: Cochain) -> int:
    """lcm of the value denominators: f takes values in mu_level."""
    return lcm_of((v.den for v in f.values.values()), 1)


_system_cache: dict = {}


def _bar_matrix_scalar(G: FiniteGroup, n: int, normalized: bool = True):
    """Sparse matrix of d_{n}: C^n -> C^{n+1} for trivial scalar coefficients.

    Returns (entries, row index map, column index map) with tuple keys.
    """
    e = G.identity
    pool = [x for x in range(G.order) if x != e] if normalized else list(range(G.order))
    cols = {t: i for i, t in enumerate(itertools.product(pool, repeat=n))}
    rows = {t: i for i, t in enumerate(itertools.product(pool, repeat=n + 1))}
    entries: dict[tuple[int, int], int] = {}

    def bump(r, t, s):
        if normalized and e in t:
            return
        c = cols[t]
        key = (r, c)
        entries[key] = entries.get(key, 0) + s

    for t, r in rows.items():
        bump(r, t[1:], 1)
        sign = -1
        for i in range(n):
            merged = t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2 :]
            bump(r, merged, sign)
            sign = -sign
        bump(r, t[:n], sign)
    return entries, rows, cols


def coboundary_witness(f: Cochain, level: Optional[int] = None) -> Optional[Cochain]:
    """A cochain c with dc = f, or None if no witness exists at the level.

    f must be a Q/Z-valued cocycle.  The witness is searched with values in
    mu_N where N defaults to (lcm of value denominators) * |G|; a found
    witness is re-verified exactly before being returned.
    """
    if f.coefficients != KX:
        raise CoefficientMismatch("witness solving expects Q/Z-valued cochains")
    if f.degree == 0:
        raise CoefficientMismatch("degree-0 cochains have no coboundary witness")
    ok, t = is_cocycle(f)
    if not ok:
        raise NotACocycle(f"not a cocycle; identity fails at tuple {t}")
    G = f.group
    n = f.degree
    if (G.order - 1) ** n > 20000:
        raise TooLarge(f"witness system for |G| = {G.order}, degree {n} is too large")
    m = cocycle_level(f)
    N = level if level is not None else m * G.order
    N = max(N, 1)
    if N % m != 0:
        N *= m // gcd(N, m)
    key = (G.table_key(), n, N)
    if key not in _system_cache:
        entries, rows, cols = _bar_matrix_scalar(G, n - 1)
        nrows, ncols = len(rows), len(cols)
        matrix = [[0] * ncols for _ in range(nrows)]
        for (r, c), v in entries.items():
            matrix[r][c] = v
        _system_cache[key] = (
            smith_with_transforms(matrix, mod=N),
            rows,
            cols,
        )
    (d, s, t_mat, _, _), rows, cols = _system_cache[key]
    nrows, ncols = len(rows), len(cols)
    rhs = [0] * nrows
    for tup, r in rows.items():
        v = f.value(tup)
        rhs[r] = v.num * (N // v.den)
    # solve D y = S rhs (mod N), then x = T y
    y = [0] * ncols
    for i in range(nrows):
        bi = sum(s[i][r] * rhs[r] for r in range(nrows)) % N
        di = d[i][i] if i < ncols else 0
        if di == 0:
            if bi % N != 0:
                return None
            continue
        g = gcd(di, N)
        if bi % g != 0:
            return None
        mm = N // g
        if mm > 1:
            inv = pow((di // g) % mm, -1, mm)
            y[i] = ((bi // g) * inv) % mm
    x = [
        sum(t_mat[i][j] * y[j] for j in range(ncols)) % N for i in range(ncols)
    ]
    vals = {tup: QZ(x[c], N) for tup, c in cols.items()}
    witness = Cochain(n - 1, G, KX, vals)
    if differential(witness) != f:
        raise NotACocycle("witness verification failed; solver is inconsistent")
    return witness


# ---------------------------------------------------------------------------
# cohomology groups
# ---------------------------------------------------------------------------


def _guard_int(name: str, default: int) -> int:
    import os

    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def cohomology_group(
    n: int, G: FiniteGroup, coefficients: Coefficients, normalized: bool = True
) -> AbelianGroup:
    """H^n(G, M) as an abelian group, n in 1..3.

    kx coefficients are computed as the torsion of the integral bar complex
    one degree higher via Smith normal form.
    """
    if n not in (1, 2, 3):
        raise TooLarge(f"degree {n} outside the supported range 1..3")
    if coefficients == KX:
        limit = _guard_int("PIVEXT_MAX_KX_ORDER_H3", 16) if n == 3 else _guard_int(
            "PIVEXT_MAX_KX_ORDER", 32
        )
        if G.order > limit:
            raise TooLarge(f"|G| = {G.order} exceeds the kx guard {limit} for degree {n}")
        entries, _, _ = _bar_matrix_scalar(G, n, normalized=normalized)
        return AbelianGroup(tuple(sparse_invariant_factors(entries)))
    module = coefficients
    if module.group is not G:
        raise CoefficientMismatch("coefficient module lives over a different group")
    limit = 32 if n <= 2 else 12
    limit = _guard_int("PIVEXT_MAX_TWISTED_ORDER", limit)
    if G.order > limit:
        raise TooLarge(f"|G| = {G.order} exceeds the twisted guard {limit} for degree {n}")
    factors = _twisted_cohomology(G, module, n, normalized=normalized)
    return AbelianGroup(tuple(factors))


def _bar_matrix_module(G: FiniteGroup, module: GModule, n: int, normalized: bool = True):
    """Sparse matrix of d_n on module-valued cochains, coordinates flattened.

    Row/column index of (tuple t, carrier slot i) is pos(t) * k + i.
    """
    e = G.identity
    pool = [x for x in range(G.order) if x != e] if normalized else list(range(G.order))
    k = module.carrier.rank
    cols = {t: i for i, t in enumerate(itertools.product(pool, repeat=n))}
    rows = {t: i for i, t in enumerate(itertools.product(pool, repeat=n + 1))}
    entries: dict[tuple[int, int], int] = {}

    def bump_block(r, t, mat_or_sign):
        if normalized and e in t:
            return
        c = cols[t]
        if isinstance(mat_or_sign, int):
            for i in range(k):
                key = (r * k + i, c * k + i)
                entries[key] = entries.get(key, 0) + mat_or_sign
        else:
            for i in range(k):
                for j in range(k):
                    v = mat_or_sign[i][j]
                    if v:
                        key = (r * k + i, c * k + j)
                        entries[key] = entries.get(key, 0) + v

    for t, r in rows.items():
        bump_block(r, t[1:], module.act_matrix(t[0]))
        sign = -1
        for i in range(n):
            merged = t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2 :]
            bump_block(r, merged, sign)
            sign = -sign
        bump_block(r, t[:n], sign)
    return entries, rows, cols


def _relation_columns(ntuples: int, factors: Sequence[int]) -> list[list[int]]:
    k = len(factors)
    b = ntuples * k
    cols = []
    for t in range(ntuples):
        for i in range(k):
            col = [0] * b
            col[t * k + i] = factors[i]
            cols.append(col)
    return cols


def _twisted_cohomology(G: FiniteGroup, module: GModule, n: int, normalized=True) -> list[int]:
    if module.carrier.is_trivial() or G.order == 1:
        return []
    k = module.carrier.rank
    factors = module.carrier.invariant_factors
    N = module.exponent()
    e = G.identity
    pool = [x for x in range(G.order) if x != e] if normalized else list(range(G.order))
    ntup_n = len(pool) ** n
    b = ntup_n * k
    if b == 0:
        return []
    # cocycle lattice: rows of d_n scaled to a single modulus N
    entries, rows, cols = _bar_matrix_module(G, module, n, normalized=normalized)
    scaled: dict[tuple[int, int], int] = {}
    for (r, c), v in entries.items():
        slot = r % k
        scale = N // factors[slot]
        w = (v * scale) % N
        if w:
            scaled[(r, c)] = w
    basis, tinv, scales = kernel_basis_mod(scaled, b, N)
    # coboundaries: d_{n-1} columns (or d_0 = action - identity on the carrier)
    sub_cols: list[list[int]] = []
    if n == 1:
        for j in range(k):
            col = [0] * b
            for ti, g in enumerate(pool):
                m = module.act_matrix(g)
                for i in range(k):
                    col[ti * k + i] = m[i][j] - int(i == j)
            sub_cols.append(col)
    else:
        lower_entries, _, lower_cols = _bar_matrix_module(
            G, module, n - 1, normalized=normalized
        )
        ncols_lower = len(lower_cols) * k
        cols_data = [[0] * b for _ in range(ncols_lower)]
        for (r, c), v in lower_entries.items():
            cols_data[c][r] = v
        sub_cols.extend(cols_data)
    sub_cols.extend(_relation_columns(ntup_n, factors))
    return quotient_invariant_factors(tinv, scales, sub_cols)


def reduced_h1(G: FiniteGroup, module: GModule) -> tuple[AbelianGroup, list[Cochain]]:
    """Crossed homomorphisms Z^1(G, M) = {f : f(gh) = f(g) + g.f(h)}.

    No coboundary quotient is taken (this is the reduced degree-one group).
    Returns the group together with explicit generating cochains.
    """
    if module.group is not G:
        raise CoefficientMismatch("coefficient module lives over a different group")
    if module.carrier.is_trivial() or G.order == 1:
        return AbelianGroup(()), []
    k = module.carrier.rank
    factors = module.carrier.invariant_factors
    N = module.exponent()
    e = G.identity
    pool = [x for x in range(G.order) if x != e]
    b = len(pool) * k
    entries, rows, cols = _bar_matrix_module(G, module, 1)
    scaled: dict[tuple[int, int], int] = {}
    for (r, c), v in entries.items():
        scale = N // factors[r % k]
        w = (v * scale) % N
        if w:
            scaled[(r, c)] = w
    basis, tinv, scales = kernel_basis_mod(scaled, b, N)
    rel = _relation_columns(len(pool), factors)
    # express the relation lattice in the kernel basis and read the quotient
    coords = []
    for vec in rel:
        col = []
        for i in range(b):
            u = sum(tinv[i][j] * vec[j] for j in range(b))
            if u % scales[i] != 0:
                raise NotACocycle("relation vector escaped the cocycle lattice")
            col.append(u // scales[i])
        coords.append(col)
    matrix = [[coords[j][i] for j in range(len(coords))] for i in range(b)]
    d, s, _, sinv, _ = smith_with_transforms(matrix, need_t=False)
    gens: list[Cochain] = []
    fac: list[int] = []
    for i in range(b):
        di = d[i][i] if i < len(coords) else 0
        if di == 0:
            raise NotACocycle("crossed homomorphism group is not finite")
        if di == 1:
            continue
        fac.append(di)
        amb = [
            sum(basis[r][j] * sinv[j][i] for j in range(b)) for r in range(b)
        ]
        vals = {}
        for ti, g in enumerate(pool):
            vals[(g,)] = tuple(amb[ti * k + j] for j in range(k))
        gen = Cochain(1, G, module, vals)
        ok, w = is_cocycle(gen)
        if not ok:
            raise NotACocycle(f"generator fails the crossed identity at {w}")
        gens.append(gen)
    # smith_with_transforms already emits an ascending divisibility chain
    return AbelianGroup(tuple(fac)), gens


def random_cochain(
    degree: int, G: FiniteGroup, coefficients: Coefficients, rng, level: int = 12
) -> Cochain:
    """A pseudo-random normalized cochain, for property tests."""
    e = G.identity
    pool = [x for x in range(G.order) if x != e]
    vals = {}
    for t in itertools.product(pool, repeat=degree):
        if coefficients == KX:
            den = rng.choice([1, 2, 3, 4, 6, level])
            vals[t] = QZ(rng.randrange(den), den)
        else:
            vals[t] = tuple(
                rng.randrange(d) for d in coefficients.carrier.invariant_factors
            )
    return Cochain(degree, G, coefficients, vals)

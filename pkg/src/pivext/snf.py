"""Exact integer linear algebra: Smith normal form and lattice solvers.

Two implementations coexist on purpose.  The dense routine tracks all four
transform matrices and is used for solving small cochain systems exactly.
The sparse routine only produces the diagonal (optionally tracking the
column transform) and is what keeps the large bar-complex differentials
tractable: those matrices have a handful of +-1 entries per row, and
elimination on dict-of-dict storage avoids materialising millions of zeros.

All arithmetic is arbitrary-precision Python int.
"""

from __future__ import annotations

from math import gcd, lcm
from typing import Iterable, Optional


def _balanced(v: int, mod: Optional[int]) -> int:
    """Reduce v into (-mod/2, mod/2]; identity when mod is None."""
    if mod is None:
        return v
    v %= mod
    if 2 * v > mod:
        v -= mod
    return v


def invariant_factors(diagonal: Iterable[int]) -> list[int]:
    """Normalize a diagonal multiset into an ascending divisibility chain.

    Zero entries are dropped (callers track free rank separately), as are
    units.  No factorization is needed: repeated gcd/lcm smoothing of pairs
    converges to the invariant factors of the direct sum.

    >>> invariant_factors([4, 6])
    [2, 12]
    >>> invariant_factors([1, 1, 3])
    [3]
    """
    vals = sorted(abs(v) for v in diagonal if v != 0 and abs(v) != 1)
    changed = True
    while changed:
        changed = False
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a != 0:
                    g = gcd(a, b)
                    vals[i], vals[j] = g, a // g * b
                    changed = True
        if changed:
            vals.sort()
    return [v for v in vals if v != 1]


# ---------------------------------------------------------------------------
# dense SNF with transforms
# ---------------------------------------------------------------------------


def smith_with_transforms(
    matrix: list[list[int]],
    mod: Optional[int] = None,
    need_s: bool = True,
    need_t: bool = True,
) -> tuple[list[list[int]], list[list[int]], list[list[int]], list[list[int]], list[list[int]]]:
    """Full Smith normal form D = S @ A @ T with unimodular S, T.

    Returns (D, S, T, Sinv, Tinv).  D is diagonal with the divisibility
    chain D[0][0] | D[1][1] | ...  When ``mod`` is given the working matrix
    is reduced into balanced residues after every operation; this is valid
    for congruence problems A x = b (mod N) and keeps entries small.  The
    transforms themselves are always exact; pass need_s/need_t = False to
    skip tracking a side you do not use (it is returned as None).
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    d = [[_balanced(v, mod) for v in row] for row in matrix]
    if need_s:
        s = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
        sinv = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    else:
        s = sinv = None
    if need_t:
        t = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
        tinv = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    else:
        t = tinv = None

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        if need_s:
            s[i], s[j] = s[j], s[i]
            for r in sinv:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        if need_t:
            for r in t:
                r[i], r[j] = r[j], r[i]
            tinv[i], tinv[j] = tinv[j], tinv[i]

    def add_row(src, dst, q):
        # row dst += q * row src
        drow, srow = d[dst], d[src]
        for c in range(ncols):
            if srow[c]:
                drow[c] = _balanced(drow[c] + q * srow[c], mod)
        if need_s:
            srow_s = s[src]
            drow_s = s[dst]
            for c in range(nrows):
                if srow_s[c]:
                    drow_s[c] += q * srow_s[c]
            for r in sinv:
                r[src] -= q * r[dst]

    def add_col(src, dst, q):
        # col dst += q * col src
        for r in d:
            if r[src]:
                r[dst] = _balanced(r[dst] + q * r[src], mod)
        if need_t:
            for r in t:
                if r[src]:
                    r[dst] += q * r[src]
            trow = tinv[dst]
            srow = tinv[src]
            for c in range(ncols):
                if trow[c]:
                    srow[c] -= q * trow[c]

    def find_pivot(k):
        best = None
        for i in range(k, nrows):
            row = d[i]
            for j in range(k, ncols):
                v = row[j]
                if v:
                    if abs(v) == 1:
                        return i, j
                    if best is None or abs(v) < abs(d[best[0]][best[1]]):
                        best = (i, j)
        return best

    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        piv = find_pivot(k)
        if piv is None:
            break
        i, j = piv
        if i != k:
            swap_rows(i, k)
        if j != k:
            swap_cols(j, k)
        while True:
            # clear column k
            moved = False
            for i in range(k + 1, nrows):
                v = d[i][k]
                if v:
                    q = v // d[k][k]
                    add_row(k, i, -q)
                    if d[i][k]:
                        swap_rows(i, k)
                        moved = True
            if moved:
                continue
            # clear row k
            for j in range(k + 1, ncols):
                v = d[k][j]
                if v:
                    q = v // d[k][k]
                    add_col(k, j, -q)
                    if d[k][j]:
                        swap_cols(j, k)
                        moved = True
            if not moved:
                break
        # divisibility: pivot must divide the remaining submatrix
        p = d[k][k]
        offender = None
        for i in range(k + 1, nrows):
            row = d[i]
            for j in range(k + 1, ncols):
                if row[j] % p != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, k, 1)
            continue
        if p < 0:
            for j in range(ncols):
                d[k][j] = -d[k][j]
            if need_t:
                for j in range(ncols):
                    t[j][k] = -t[j][k]
                tinv[k] = [-v for v in tinv[k]]
        k += 1
    return d, s, t, sinv, tinv


def solve_congruence(
    matrix: list[list[int]], rhs: list[int], modulus: int
) -> Optional[list[int]]:
    """Solve A x = rhs (mod modulus) over the integers; None if unsolvable.

    >>> solve_congruence([[2]], [4], 8)
    [2]
    >>> solve_congruence([[2]], [1], 8) is None
    True
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if nrows == 0 or ncols == 0:
        if all(v % modulus == 0 for v in rhs):
            return [0] * ncols
        return None
    d, s, t, _, _ = smith_with_transforms(matrix, mod=modulus)
    sb = [sum(s[i][r] * rhs[r] for r in range(nrows)) % modulus for i in range(nrows)]
    y = [0] * ncols
    for i in range(nrows):
        di = d[i][i] if i < ncols else 0
        if di == 0:
            if sb[i] % modulus != 0:
                return None
            continue
        g = gcd(di, modulus)
        if sb[i] % g != 0:
            return None
        # solve di * y = sb[i] (mod modulus)
        mm = modulus // g
        inv = pow((di // g) % mm, -1, mm) if mm > 1 else 0
        y[i] = ((sb[i] // g) * inv) % mm if mm > 1 else 0
    x = [sum(t[i][j] * y[j] for j in range(ncols)) % modulus for i in range(ncols)]
    return x


# ---------------------------------------------------------------------------
# sparse elimination
# ---------------------------------------------------------------------------


class _SparseMatrix:
    """Row-major dict-of-dicts with a column index; supports SNF elimination."""

    def __init__(self, entries: dict[tuple[int, int], int], mod: Optional[int]):
        self.mod = mod
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}
        for (r, c), v in entries.items():
            v = _balanced(v, mod)
            if v:
                self.rows.setdefault(r, {})[c] = v
                self.cols.setdefault(c, set()).add(r)

    def set(self, r: int, c: int, v: int):
        v = _balanced(v, self.mod)
        if v:
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, set()).add(r)
        else:
            row = self.rows.get(r)
            if row and c in row:
                del row[c]
                if not row:
                    del self.rows[r]
                col = self.cols[c]
                col.discard(r)
                if not col:
                    del self.cols[c]

    def get(self, r: int, c: int) -> int:
        return self.rows.get(r, {}).get(c, 0)

    def add_row(self, src: int, dst: int, q: int, on_col_touch=None):
        for c, v in list(self.rows.get(src, {}).items()):
            self.set(dst, c, self.get(dst, c) + q * v)

    def drop_row(self, r: int):
        for c in list(self.rows.get(r, {})):
            self.set(r, c, 0)

    def drop_col(self, c: int):
        for r in list(self.cols.get(c, set())):
            self.set(r, c, 0)

    def pick_pivot(self) -> Optional[tuple[int, int, int]]:
        """Prefer unit entries with minimal fill estimate; else global min."""
        best = None
        best_fill = None
        scanned = 0
        fallback = None
        for r, row in self.rows.items():
            rlen = len(row)
            for c, v in row.items():
                if abs(v) == 1:
                    fill = (rlen - 1) * (len(self.cols[c]) - 1)
                    if best_fill is None or fill < best_fill:
                        best, best_fill = (r, c, v), fill
                        if fill == 0:
                            return best
                    scanned += 1
                    if scanned >= 64 and best is not None:
                        return best
                elif fallback is None or abs(v) < abs(fallback[2]):
                    fallback = (r, c, v)
        return best if best is not None else fallback


def sparse_diagonal(
    entries: dict[tuple[int, int], int],
    mod: Optional[int] = None,
    track_columns: Optional[int] = None,
) -> tuple[list[tuple[int, int]], Optional[list[list[int]]], Optional[list[list[int]]]]:
    """Diagonalize a sparse integer matrix by row and column operations.

    Returns (pivots, T, Tinv) where pivots is a list of (column, value)
    pairs: after elimination the matrix S A T has exactly one nonzero per
    listed column, in pairwise distinct rows.  Row transforms are not
    tracked.  When ``track_columns`` is an integer n, column operations are
    mirrored on an n x n transform pair (T, Tinv) so that kernels can be
    reconstructed; otherwise both are None.

    The diagonal values are exact when mod is None; with a modulus they are
    only meaningful up to gcd with the modulus, which is all congruence
    kernels need.
    """
    m = _SparseMatrix(entries, mod)
    ncols = track_columns
    if ncols is not None:
        t = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
        tinv = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    else:
        t = tinv = None

    def add_col(src: int, dst: int, q: int):
        # col dst += q * col src
        for r in list(m.cols.get(src, set())):
            m.set(r, dst, m.get(r, dst) + q * m.get(r, src))
        if t is not None:
            for i in range(ncols):
                if t[i][src]:
                    t[i][dst] += q * t[i][src]
            trow = tinv[dst]
            srow = tinv[src]
            for c in range(ncols):
                if trow[c]:
                    srow[c] -= q * trow[c]

    pivots: list[tuple[int, int]] = []
    while True:
        piv = m.pick_pivot()
        if piv is None:
            break
        r0, c0, v = piv
        while True:
            # reduce the pivot column by row operations
            moved = False
            for r in list(m.cols.get(c0, set())):
                if r == r0:
                    continue
                w = m.get(r, c0)
                q = w // v
                if q:
                    m.add_row(r0, r, -q)
                w = m.get(r, c0)
                if w:
                    r0, v = r, w
                    moved = True
                    break
            if moved:
                continue
            # reduce the pivot row by column operations
            for c in list(m.rows.get(r0, {})):
                if c == c0:
                    continue
                w = m.get(r0, c)
                q = w // v
                if q:
                    add_col(c0, c, -q)
                w = m.get(r0, c)
                if w:
                    c0, v = c, w
                    moved = True
                    break
            if not moved:
                break
        pivots.append((c0, v))
        m.drop_row(r0)
        m.drop_col(c0)
    return pivots, t, tinv


def sparse_invariant_factors(
    entries: dict[tuple[int, int], int],
) -> list[int]:
    """Invariant factors (>1) of the cokernel torsion of a sparse matrix."""
    pivots, _, _ = sparse_diagonal(entries, mod=None)
    return invariant_factors(v for _, v in pivots)


def kernel_basis_mod(
    entries: dict[tuple[int, int], int], ncols: int, modulus: int
) -> tuple[list[list[int]], list[list[int]], list[int]]:
    """Lattice {x : A x = 0 (mod modulus)} as columns of an ncols basis.

    Returns (basis, tinv, scales) where basis[:, j] = scales[j] * T[:, j],
    tinv is the inverse column transform, and membership of a vector w is
    tested by requiring scales[j] | (Tinv @ w)[j] for all j.
    """
    pivots, t, tinv = sparse_diagonal(entries, mod=modulus, track_columns=ncols)
    diag_by_col = {c: v for c, v in pivots}
    scales = []
    for j in range(ncols):
        dj = diag_by_col.get(j, 0)
        scales.append(modulus // gcd(dj, modulus))
    basis = [[t[i][j] * scales[j] for j in range(ncols)] for i in range(ncols)]
    return basis, tinv, scales


def quotient_invariant_factors(
    tinv: list[list[int]], scales: list[int], sub_columns: list[list[int]]
) -> list[int]:
    """Invariant factors of (kernel lattice)/(sublattice).

    ``sub_columns`` are ambient vectors known to lie in the kernel lattice
    described by (tinv, scales).  The quotient must be finite; a ValueError
    is raised otherwise.
    """
    n = len(scales)
    if n == 0:
        return []
    coords: dict[tuple[int, int], int] = {}
    for jcol, vec in enumerate(sub_columns):
        for i in range(n):
            u = sum(tinv[i][k] * vec[k] for k in range(n))
            if u % scales[i] != 0:
                raise ValueError("vector outside the kernel lattice")
            q = u // scales[i]
            if q:
                coords[(i, jcol)] = q
    pivots, _, _ = sparse_diagonal(coords, mod=None)
    if len(pivots) < n:
        raise ValueError("quotient is not finite")
    return invariant_factors(v for _, v in pivots)


def lcm_of(values: Iterable[int], default: int = 1) -> int:
    out = default
    for v in values:
        out = lcm(out, v)
    return out

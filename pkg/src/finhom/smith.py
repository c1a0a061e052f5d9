"""Smith normal form and the linear-algebra kernels built on it.

Everything else in the library reduces to three operations implemented
here: ``snf`` (diagonalization U A V = D with unimodular U, V and a
divisibility chain on D), ``solve_linear`` (one deterministic solution of
A x = b, or None), and ``kernel_basis`` (generators of {x : A x = 0}).

The Smith algorithm runs over the integers with arbitrary precision.
Matrices over Z/n are lifted to Z, diagonalized there, and reduced; for
solving and kernels the relation n = 0 is made explicit by augmenting
with n I, so a single integer code path serves every supported ring.

Pivot rule (fixed for reproducibility): among the not-yet-processed
entries choose the one of smallest nonzero absolute value, ties broken by
row then column order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DimensionMismatchError
from .matrix import Matrix
from .rings import Integers, Ring


@dataclass(frozen=True)
class SmithForm:
    """U A V = D with U, V unimodular and D diagonal, d_i | d_{i+1}."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> tuple:
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D.entries[i][i] for i in range(n))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


@lru_cache(maxsize=1 << 15)
def _snf_integer(A: Matrix) -> SmithForm:
    """Smith normal form over Z by elementary row/column operations.

    Matrices are immutable values, so forms are memoized; the linear
    solvers below hit the same system matrix over and over."""
    rows, cols = A.rows, A.cols
    a = [list(r) for r in A.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        ad, as_ = a[dst], a[src]
        for k in range(cols):
            ad[k] += c * as_[k]
        ud, us = u[dst], u[src]
        for k in range(rows):
            ud[k] += c * us[k]

    def add_col(dst, src, c):
        for r in a:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    def find_pivot(t):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < abs(best[0])):
                    best = (x, i, j)
        return best

    t = 0
    while t < min(rows, cols):
        found = find_pivot(t)
        if found is None:
            break
        _, pi, pj = found
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        if a[t][t] < 0:
            negate_row(t)

        while True:
            # clear column t below the pivot
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t] != 0:
                        # remainder smaller than pivot: promote it
                        swap_rows(t, i)
                        if a[t][t] < 0:
                            negate_row(t)
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the block; if not, fold the
            # offending row into row t and run the reduction again
            offender = None
            p = a[t][t]
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        t += 1

    # final pass: the block pivots already divide each other by
    # construction, but assert the chain and positivity defensively
    diag = [a[i][i] for i in range(min(rows, cols))]
    for i in range(len(diag) - 1):
        if diag[i] != 0 and diag[i + 1] % diag[i] != 0:
            raise AssertionError("smith normal form divisibility chain broken")

    zz = Integers()
    return SmithForm(
        U=Matrix(zz, rows, rows, u),
        D=Matrix(zz, rows, cols, a),
        V=Matrix(zz, cols, cols, v),
    )


def snf(A: Matrix) -> SmithForm:
    """Smith normal form over the matrix's own ring.

    Residue rings lift to Z, reduce afterwards; U and V stay invertible
    because their integer determinants are units.
    """
    ring = A.ring
    if ring.kind == Ring.INTEGERS:
        return _snf_integer(A)
    form = _snf_integer(A.lift_to_integers())
    return SmithForm(
        U=form.U.change_ring(ring),
        D=form.D.change_ring(ring),
        V=form.V.change_ring(ring),
    )


@lru_cache(maxsize=1 << 15)
def _snf_modular(A: Matrix) -> SmithForm:
    """Smith form over Z/n by gcd-combination transforms, all arithmetic
    modulo n so entries never grow.

    Every diagonal entry is normalized to a divisor of n (each residue is
    a unit times a divisor), giving the canonical chain d_1 | d_2 | ... | n.
    """
    ring = A.ring
    n = ring.modulus
    rows, cols = A.rows, A.cols
    a = [list(r) for r in A.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def gcd_n(x):
        return math.gcd(x, n)

    def row_combine(i1, i2, s, t, x, y):
        # (row i1, row i2) <- (s row1 + t row2, x row1 + y row2), det unit
        for m in (a, u):
            r1, r2 = m[i1], m[i2]
            for k in range(len(r1)):
                p, q = r1[k], r2[k]
                r1[k] = (s * p + t * q) % n
                r2[k] = (x * p + y * q) % n

    def col_combine(j1, j2, s, t, x, y):
        for m in (a, v):
            for row in m:
                p, q = row[j1], row[j2]
                row[j1] = (s * p + t * q) % n
                row[j2] = (x * p + y * q) % n

    def find_pivot(t0):
        best = None
        for i in range(t0, rows):
            for j in range(t0, cols):
                x = a[i][j]
                if x == 0:
                    continue
                key = (gcd_n(x), x, i, j)
                if best is None or key < best:
                    best = key
        return best

    t = 0
    while t < min(rows, cols):
        found = find_pivot(t)
        if found is None:
            break
        _, _, pi, pj = found
        if pi != t:
            row_combine(t, pi, 0, 1, 1, 0)
        if pj != t:
            col_combine(t, pj, 0, 1, 1, 0)
        while True:
            for i in range(t + 1, rows):
                bq = a[i][t]
                if bq:
                    ap = a[t][t]
                    if bq % ap == 0:
                        # plain elimination keeps the pivot row fixed
                        row_combine(t, i, 1, 0, -(bq // ap), 1)
                    else:
                        g, s, tt = _xgcd(ap, bq)
                        row_combine(t, i, s, tt, -(bq // g), ap // g)
            dirty = False
            for j in range(t + 1, cols):
                bq = a[t][j]
                if bq:
                    ap = a[t][t]
                    if bq % ap == 0:
                        col_combine(t, j, 1, 0, -(bq // ap), 1)
                    else:
                        g, s, tt = _xgcd(ap, bq)
                        col_combine(t, j, s, tt, -(bq // g), ap // g)
                        dirty = True
            if dirty and any(a[i][t] for i in range(t + 1, rows)):
                continue
            # fold in any trailing entry the pivot does not divide mod n
            p_g = gcd_n(a[t][t])
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if gcd_n(a[i][j]) % p_g != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_combine(t, offender, 1, 1, 0, 1)
        # normalize the pivot to the divisor gcd(pivot, n) by a unit
        d = a[t][t]
        g = gcd_n(d)
        if d != g:
            w = _unit_cofactor(d, g, n)
            winv = pow(w, -1, n)
            for m in (a, u):
                m[t] = [(winv * x) % n for x in m[t]]
        t += 1

    return SmithForm(
        U=Matrix(ring, rows, rows, u),
        D=Matrix(ring, rows, cols, a),
        V=Matrix(ring, cols, cols, v),
    )


def _xgcd(aa, bb):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while bb:
        q = aa // bb
        aa, bb = bb, aa - q * bb
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return aa, x0, y0


def _unit_cofactor(d: int, g: int, n: int) -> int:
    """The first unit w mod n with d = w g mod n (exists since every
    residue is a unit times a divisor of n)."""
    dprime = d // g
    step = n // g
    w = dprime % n
    for _ in range(g + 1):
        if math.gcd(w, n) == 1:
            return w
        w = (w + step) % n
    raise AssertionError("no unit cofactor found")


def solve_linear(A: Matrix, b: Matrix) -> Matrix | None:
    """One exact solution of A x = b, or None if there is none.

    Deterministic choice: in Smith coordinates, bound coordinates take
    the canonical quotient and free coordinates are zero.  Residue rings
    use the modular Smith form (no intermediate blow-up); the integers
    use the exact integer form.
    """
    if b.cols != 1 or b.rows != A.rows:
        raise DimensionMismatchError(f"rhs must be a {A.rows}x1 column")
    if A.ring != b.ring:
        raise DimensionMismatchError("matrix/rhs ring mismatch")
    ring = A.ring
    if ring.modulus is not None:
        return _solve_modular(A, b)
    form = _snf_integer(A)
    c = form.U * b
    y = [0] * A.cols
    n = min(A.rows, A.cols)
    for i in range(A.rows):
        d = form.D.entries[i][i] if i < n else 0
        ci = c.entries[i][0]
        if d == 0:
            if ci != 0:
                return None
        else:
            if ci % d != 0:
                return None
            y[i] = ci // d
    x_full = form.V.apply(y)
    return Matrix.column(ring, x_full[: A.cols])


def _solve_modular(A: Matrix, b: Matrix) -> Matrix | None:
    ring = A.ring
    n = ring.modulus
    form = _snf_modular(A)
    c = form.U * b
    y = [0] * A.cols
    nm = min(A.rows, A.cols)
    for i in range(A.rows):
        d = form.D.entries[i][i] if i < nm else 0
        ci = c.entries[i][0]
        g = math.gcd(d, n)
        if ci % g != 0:
            return None
        if d != 0:
            # d y = ci mod n with d = g (normalized); smallest solution
            y[i] = (ci // g) * pow(d // g, -1, n // g) % (n // g) if g != n else 0
    x_full = form.V.apply(y)
    return Matrix.column(ring, x_full)


def kernel_basis(A: Matrix) -> Matrix:
    """Columns generating {x : A x = 0} over A's ring.

    Over Z the columns are a lattice basis of the kernel; over Z/n the
    modular Smith form contributes one generator per coordinate (the
    annihilator direction (n / gcd(d, n)) e), so the columns generate
    the full kernel including torsion directions.
    """
    ring = A.ring
    if ring.modulus is not None:
        return _kernel_modular(A)
    form = _snf_integer(A)
    n = min(A.rows, A.cols)
    free_cols = [j for j in range(A.cols) if j >= n or form.D.entries[j][j] == 0]
    cols = [form.V.col(j) for j in free_cols]
    if not cols:
        return Matrix.zero(ring, A.cols, 0)
    return Matrix(ring, A.cols, len(cols), [list(r) for r in zip(*cols)])


def _kernel_modular(A: Matrix) -> Matrix:
    ring = A.ring
    n = ring.modulus
    form = _snf_modular(A)
    nm = min(A.rows, A.cols)
    cols = []
    for j in range(A.cols):
        d = form.D.entries[j][j] if j < nm else 0
        g = math.gcd(d, n)
        ann = n // g
        if ann % n == 0:
            continue  # annihilator is zero mod n: no kernel direction
        gen = [0] * A.cols
        gen[j] = ann
        cols.append(form.V.apply(gen))
    if not cols:
        return Matrix.zero(ring, A.cols, 0)
    out = Matrix(ring, A.cols, len(cols), [list(r) for r in zip(*cols)])
    keep = [j for j in range(out.cols)
            if any(out.entries[i][j] != 0 for i in range(out.rows))]
    return out.submatrix(range(out.rows), keep)


def determinant(A: Matrix) -> int:
    """Exact determinant (Bareiss over a lift); used by tests and
    invertibility checks, not on hot paths."""
    if A.rows != A.cols:
        raise DimensionMismatchError("determinant needs a square matrix")
    n = A.rows
    if n == 0:
        return A.ring.one
    m = [list(r) for r in A.lift_to_integers().entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return A.ring.normalize(sign * m[n - 1][n - 1])


def invariant_factors_of(A: Matrix, extra_torsion: int | None = None) -> tuple:
    """Invariant factors of the cokernel of A as an abelian group, with
    the relation n = 0 adjoined for residue rings; unit factors dropped,
    each 0 standing for a free summand.

    This is the canonical presentation-independent fingerprint used for
    module isomorphism tests.
    """
    if extra_torsion is not None:
        n = extra_torsion
        form = _snf_modular(A if A.ring.modulus == n else A.change_ring(
            _ring_mod(n)))
        nm = min(A.rows, A.cols)
        diag = [math.gcd(form.D.entries[i][i], n) for i in range(nm)]
        factors = [d for d in diag if d != 1] + [n] * (A.rows - nm)
        return tuple(sorted(factors))
    form = _snf_integer(A.lift_to_integers())
    nm = min(A.rows, A.cols)
    diag = [form.D.entries[i][i] for i in range(nm)]
    torsion = [d for d in diag if d not in (0, 1)]
    free = (A.rows - nm) + sum(1 for d in diag if d == 0)
    return tuple(torsion + [0] * free)


def _ring_mod(n: int):
    from .rings import IntegersModN

    return IntegersModN(n)

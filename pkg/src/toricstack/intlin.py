"""Exact integer linear algebra.

Matrices are plain lists of row lists of Python ints (arbitrary precision).
Nothing here ever touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InfiniteCokernel

Matrix = list  # list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def shape(A: Matrix, cols: int | None = None) -> tuple[int, int]:
    if not A:
        return 0, (cols or 0)
    return len(A), len(A[0])


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n = len(B)
    m = len(B[0]) if B else 0
    return [[sum(row[k] * B[k][j] for k in range(n)) for j in range(m)] for row in A]


def matvec(A: Matrix, v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A: Matrix, rows: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(rows or 0)]
    return [list(col) for col in zip(*A)]


def as_matrix(entries, rows: int | None = None, cols: int | None = None) -> Matrix:
    """Coerce nested sequences (or a flat row-major list with explicit shape)."""
    if rows is not None and cols is not None and entries and not isinstance(entries[0], (list, tuple)):
        if len(entries) != rows * cols:
            raise ValueError("entries array length must equal rows x cols")
        return [[int(entries[i * cols + j]) for j in range(cols)] for i in range(rows)]
    out = [[int(x) for x in row] for row in entries]
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def det(A: Matrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A: Matrix) -> int:
    return len(row_reduce_q(A)[1])


def row_reduce_q(A: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rref, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def solve_q(A: Matrix, b: Sequence) -> list[Fraction] | None:
    """A unique-or-any rational solution x of A x = b, or None if inconsistent."""
    rows = len(A)
    cols = len(A[0]) if A else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    M, piv = row_reduce_q(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = M[i][cols]
    return x


def inverse_q(A: Matrix) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    M, piv = row_reduce_q(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in M]


@dataclass(frozen=True)
class SmithDecomposition:
    left: Matrix
    diag: Matrix
    right: Matrix

    @property
    def invariant_factors(self) -> list[int]:
        k = min(len(self.diag), len(self.diag[0]) if self.diag else 0)
        return [self.diag[i][i] for i in range(k)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)


def smith_normal_form(A: Matrix, cols: int | None = None) -> SmithDecomposition:
    """Smith normal form with unimodular transforms: ``left @ A @ right == diag``.

    Pivots are chosen with minimal absolute value to keep the transform
    entries small.  ``cols`` is only needed for matrices with zero rows.
    """
    m, n = shape(A, cols)
    D = [row[:] for row in A]
    L = identity(m)
    R = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (D, R):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row_dst += f * row_src
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        L[dst] = [a + f * b for a, b in zip(L[dst], L[src])]

    def add_col(src, dst, f):
        for M in (D, R):
            for row in M:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(t, i, -q)
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(t, j, -q)
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            L[t] = [-x for x in L[t]]
    return SmithDecomposition(L, D, R)


def hermite_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Positive pivots, entries above a pivot reduced into ``[0, pivot)``, zero
    rows dropped.  The result depends only on the lattice, not the generators.
    """
    M = [r[:] for r in rows if any(r)]
    if not M:
        return []
    ncols = len(M[0])
    out: list[list[int]] = []
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[piv] = M[piv], M[r]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    done &= M[i][c] == 0
            if done:
                break
        if r < len(M) and M[r][c] != 0:
            if M[r][c] < 0:
                M[r] = [-x for x in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    out = [row for row in M[:r]]
    return out


def kernel_basis(A: Matrix, cols: int | None = None) -> Matrix:
    """Z-basis of ``ker(A)`` as the columns of an ``cols x k`` matrix.

    Columns are in Hermite normal form (as rows of the transpose), so the
    output is deterministic for a given kernel lattice.
    """
    m, n = shape(A, cols)
    snf = smith_normal_form(A, n)
    r = snf.rank
    vecs = [[snf.right[i][k] for i in range(n)] for k in range(r, n)]
    basis_rows = hermite_rows(vecs)
    if not basis_rows:
        return [[] for _ in range(n)]
    return transpose(basis_rows)


def ncols(M: Matrix, default: int = 0) -> int:
    return len(M[0]) if M and M[0] is not None else default


@dataclass(frozen=True)
class FinAbGroup:
    """``Z^free_rank`` plus cyclic factors ``Z/t`` (divisibility chain)."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        for t in self.torsion:
            if t < 2:
                raise ValueError("torsion factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion factors must form a divisibility chain")

    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def order_of_torsion(self) -> int:
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        v = list(v)
        for k, t in enumerate(self.torsion):
            v[self.free_rank + k] %= t
        return tuple(v)

    def relations(self) -> Matrix:
        """Presentation matrix: ``N = Z^dim / image(relations)``."""
        d = self.dim
        rel = zeros(d, len(self.torsion))
        for k, t in enumerate(self.torsion):
            rel[self.free_rank + k][k] = t
        return rel

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def group_from_snf(snf: SmithDecomposition, rows: int) -> tuple[FinAbGroup, list[int], list[int]]:
    """Cokernel structure from a Smith form: group, torsion row indices, free row indices."""
    factors = snf.invariant_factors
    tors_idx = [i for i, d in enumerate(factors) if d > 1]
    free_idx = [i for i, d in enumerate(factors) if d == 0] + list(range(len(factors), rows))
    return FinAbGroup(len(free_idx), tuple(factors[i] for i in tors_idx)), tors_idx, free_idx


def cokernel(A: Matrix, rows: int | None = None) -> FinAbGroup:
    """``Z^rows / image(A)`` read off the Smith form."""
    m = len(A) if A else (rows or 0)
    if not A or not A[0]:
        return FinAbGroup(m)
    snf = smith_normal_form(A)
    return group_from_snf(snf, m)[0]


@dataclass(frozen=True)
class Quotient:
    """An explicit surjection ``Z^dim -> Z^dim / image(rel)``.

    ``project`` returns coordinates in the quotient group (free part first,
    torsion coordinates reduced).
    """

    group: FinAbGroup
    rows: tuple  # rows of the left Smith transform, free rows then torsion rows
    moduli: tuple  # 0 for free coordinates

    def project(self, v: Sequence[int]) -> tuple[int, ...]:
        out = []
        for row, mod in zip(self.rows, self.moduli):
            x = sum(a * b for a, b in zip(row, v))
            out.append(x % mod if mod else x)
        return tuple(out)


def quotient(rel: Matrix, dim: int) -> Quotient:
    if not rel or not rel[0]:
        return Quotient(FinAbGroup(dim), tuple(tuple(r) for r in identity(dim)), (0,) * dim)
    snf = smith_normal_form(rel)
    group, tors_idx, free_idx = group_from_snf(snf, dim)
    rows = [tuple(snf.left[i]) for i in free_idx] + [tuple(snf.left[i]) for i in tors_idx]
    factors = snf.invariant_factors
    moduli = [0] * len(free_idx) + [factors[i] for i in tors_idx]
    return Quotient(group, tuple(rows), tuple(moduli))


@dataclass(frozen=True)
class GaleDualData:
    """Fan sequence kernel and the dual map into ``L^vee``.

    ``dual_map[i]`` is the image of the i-th standard dual vector.  Its free
    coordinates are the pairings with the kernel basis columns; its torsion
    coordinates live in ``dual_group``'s cyclic factors.
    """

    kernel_basis: Matrix
    dual_map: list
    dual_group: FinAbGroup
    _coker_rows: tuple = field(repr=False, default=())
    _coker_moduli: tuple = field(repr=False, default=())

    @property
    def kernel_rank(self) -> int:
        return ncols(self.kernel_basis)

    def dual_image(self, functional: Sequence[int]) -> tuple[int, ...]:
        """``rho^vee`` applied to an integer functional on ``Z^n``."""
        k = self.kernel_rank
        n = len(self.kernel_basis)
        free = tuple(sum(functional[i] * self.kernel_basis[i][c] for i in range(n)) for c in range(k))
        lifted = list(functional) + [0] * (len(self._coker_rows[0]) - n if self._coker_rows else 0)
        tors = tuple(
            sum(a * b for a, b in zip(row, lifted)) % mod
            for row, mod in zip(self._coker_rows, self._coker_moduli)
        )
        return free + tors


def _check_finite_cokernel(rho: Matrix, target: FinAbGroup) -> None:
    free_rows = rho[: target.free_rank]
    if target.free_rank and rank(free_rows) < target.free_rank:
        raise InfiniteCokernel("rays do not span N (x) Q")


def gale_dual(rho: Matrix, target: FinAbGroup | None = None, cols: int | None = None) -> GaleDualData:
    """Kernel ``L = ker(rho)`` and the Gale dual ``rho^vee: (Z^n)^* -> L^vee``.

    ``rho`` has ``target.dim`` rows (free coordinates, then torsion
    coordinates) and one column per ray.  Torsion in the target is handled by
    lifting ``rho`` through the presentation ``Z^dim / relations``.
    """
    if target is None:
        target = FinAbGroup(len(rho))
    n = ncols(rho, cols or 0)
    if len(rho) != target.dim:
        raise ValueError("ray matrix row count must match the group dimension")
    _check_finite_cokernel(rho, target)
    rel = target.relations()
    s = len(target.torsion)
    B = [list(rho[i]) + list(rel[i]) for i in range(target.dim)]
    if target.dim == 0:
        K_rows = [list(r) for r in identity(n)]
        K_rows = hermite_rows(K_rows)
    else:
        Kfull = kernel_basis(B, n + s)
        K_rows = hermite_rows([list(col[:n]) for col in zip(*Kfull)] if ncols(Kfull) else [])
    K = transpose(K_rows, n) if K_rows else [[] for _ in range(n)]
    k = len(K_rows)

    # L^vee = coker(B^T): Z^dim -> Z^(n+s); keep only its torsion coordinates
    coker_rows: list = []
    coker_mod: list = []
    if target.dim:
        Bt = transpose(B)
        snf = smith_normal_form(Bt)
        factors = snf.invariant_factors
        for i, d in enumerate(factors):
            if d > 1:
                coker_rows.append(tuple(snf.left[i]))
                coker_mod.append(d)
    group = FinAbGroup(k, tuple(coker_mod))
    data = GaleDualData(K, [], group, tuple(coker_rows), tuple(coker_mod))
    dual_map = [data.dual_image([int(i == j) for j in range(n)]) for i in range(n)]
    object.__setattr__(data, "dual_map", dual_map)
    return data


def dual_of_pullback(data: GaleDualData, rho: Matrix, m: Sequence[int]) -> tuple[int, ...]:
    """``rho^vee(rho^*(m))`` for a functional ``m`` on the free part of N."""
    n = len(data.kernel_basis)
    pulled = [sum(m[r] * rho[r][i] for r in range(len(m))) for i in range(n)]
    return data.dual_image(pulled)

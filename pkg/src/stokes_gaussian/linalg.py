"""Exact dense linear algebra over Q or Q(i), plus sparse rank/kernel helpers.

Subspaces are kept in reduced row echelon form, so subspace equality is basis
equality.  The sparse routines serve the cellular cochain complexes, whose
matrices are block-structured and very sparse.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .scalars import Scalar, ZERO, ONE


class DimensionMismatch(ValueError):
    pass


class Matrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[Scalar]], ncols: Optional[int] = None):
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        if self.nrows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise DimensionMismatch("ragged rows")
        else:
            if ncols is None:
                raise DimensionMismatch("empty matrix needs explicit ncols")
            self.ncols = ncols

    # -- constructors --------------------------------------------------------
    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], ncols=n)

    @staticmethod
    def zero(m: int, n: int) -> "Matrix":
        return Matrix([[ZERO] * n for _ in range(m)], ncols=n)

    @staticmethod
    def from_blocks(blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        rows: list[list[Scalar]] = []
        for brow in blocks:
            height = brow[0].nrows
            if any(b.nrows != height for b in brow):
                raise DimensionMismatch("inconsistent block heights")
            for i in range(height):
                r: list[Scalar] = []
                for b in brow:
                    r.extend(b.rows[i])
                rows.append(r)
        ncols = sum(b.ncols for b in blocks[0]) if blocks else 0
        return Matrix(rows, ncols=ncols)

    @staticmethod
    def column(vec: Sequence[Scalar]) -> "Matrix":
        return Matrix([[v] for v in vec], ncols=1)

    def copy(self) -> "Matrix":
        return Matrix([list(r) for r in self.rows], ncols=self.ncols)

    # -- protocol --------------------------------------------------------------
    def __repr__(self):
        return "Matrix(%d x %d)" % (self.nrows, self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    # -- arithmetic --------------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("matrix addition shape mismatch")
        return Matrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
                      ncols=self.ncols)

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows], ncols=self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch("matrix product shape mismatch")
            bt = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
            out = []
            for r in self.rows:
                row = []
                for j in range(other.ncols):
                    s = ZERO
                    col = bt[j] if other.nrows else ()
                    for a, b in zip(r, col):
                        if a and b:
                            s = s + a * b
                    row.append(s)
                out.append(row)
            return Matrix(out, ncols=other.ncols)
        return NotImplemented

    def scale(self, c: Scalar) -> "Matrix":
        return Matrix([[c * a for a in r] for r in self.rows], ncols=self.ncols)

    def apply(self, vec: Sequence[Scalar]) -> list[Scalar]:
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length mismatch")
        out = []
        for r in self.rows:
            s = ZERO
            for a, v in zip(r, vec):
                if a and v:
                    s = s + a * v
            out.append(s)
        return out

    def transpose(self) -> "Matrix":
        return Matrix([list(c) for c in zip(*self.rows)] if self.nrows else [],
                      ncols=self.nrows)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in col_idx] for i in row_idx],
                      ncols=len(col_idx))

    # -- elimination --------------------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and pivot columns (canonical)."""
        m = [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        pivots: list[int] = []
        pr = 0
        for pc in range(nc):
            sel = None
            for i in range(pr, nr):
                if m[i][pc]:
                    sel = i
                    break
            if sel is None:
                continue
            m[pr], m[sel] = m[sel], m[pr]
            inv = ONE / m[pr][pc]
            m[pr] = [x * inv if x else ZERO for x in m[pr]]
            for i in range(nr):
                if i != pr and m[i][pc]:
                    f = m[i][pc]
                    m[i] = [a - f * b if b else a for a, b in zip(m[i], m[pr])]
            pivots.append(pc)
            pr += 1
            if pr == nr:
                break
        return Matrix(m, ncols=nc), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[list[Scalar]]:
        """Basis of the right kernel, echelon-style (one vector per free column)."""
        R, pivots = self.rref()
        pivset = set(pivots)
        basis = []
        for f in range(self.ncols):
            if f in pivset:
                continue
            v = [ZERO] * self.ncols
            v[f] = ONE
            for r, p in enumerate(pivots):
                v[p] = -R.rows[r][f]
            basis.append(v)
        return basis

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.nrows
        aug = Matrix([list(r) + list(e) for r, e in zip(self.rows, Matrix.identity(n).rows)],
                     ncols=2 * n)
        R, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular")
        return Matrix([r[n:] for r in R.rows], ncols=n)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def solve(self, b: Sequence[Scalar]) -> Optional[list[Scalar]]:
        """One solution of A x = b, or None."""
        if len(b) != self.nrows:
            raise DimensionMismatch("rhs length mismatch")
        aug = Matrix([list(r) + [v] for r, v in zip(self.rows, b)], ncols=self.ncols + 1)
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [ZERO] * self.ncols
        for r, p in enumerate(pivots):
            x[p] = R.rows[r][self.ncols]
        return x


def rank(M: Matrix) -> int:
    return M.rank()


def kernel(M: Matrix) -> "Subspace":
    return Subspace.from_vectors(M.kernel_basis(), M.ncols)


def solve(M: Matrix, b: Sequence[Scalar]) -> Optional[list[Scalar]]:
    return M.solve(b)


class Subspace:
    """Subspace of k^n held as RREF basis rows; equality is syntactic."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rref_rows: Sequence[Sequence[Scalar]]):
        self.n = n
        self.rows = [list(r) for r in rref_rows]

    @staticmethod
    def from_vectors(vectors: Iterable[Sequence[Scalar]], n: int) -> "Subspace":
        vecs = [list(v) for v in vectors]
        if not vecs:
            return Subspace(n, [])
        R, pivots = Matrix(vecs, ncols=n).rref()
        return Subspace(n, R.rows[: len(pivots)])

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n, [])

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, Matrix.identity(n).rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __repr__(self):
        return "Subspace(dim %d of k^%d)" % (self.dim, self.n)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, tuple(tuple(r) for r in self.rows)))

    def basis_matrix(self) -> Matrix:
        return Matrix(self.rows, ncols=self.n)

    def contains(self, vec: Sequence[Scalar]) -> bool:
        v = list(vec)
        for row in self.rows:
            p = next(j for j, x in enumerate(row) if x)
            if v[p]:
                f = v[p]
                v = [a - f * b if b else a for a, b in zip(v, row)]
        return all(not x for x in v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def add(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise DimensionMismatch("ambient mismatch")
        return Subspace.from_vectors(self.rows + other.rows, self.n)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise DimensionMismatch("ambient mismatch")
        if not self.rows or not other.rows:
            return Subspace.zero(self.n)
        # x = a . U = b . V; solve [U^T | -V^T] null space, read off a . U
        U = Matrix(self.rows, ncols=self.n)
        V = Matrix(other.rows, ncols=self.n)
        stacked = Matrix([list(u) + [-v for v in w] for u, w in
                          zip(U.transpose().rows, V.transpose().rows)],
                         ncols=U.nrows + V.nrows)
        vecs = []
        for kv in stacked.kernel_basis():
            a = kv[: U.nrows]
            vecs.append([sum((ai * uij for ai, uij in zip(a, col) if ai and uij), ZERO)
                         for col in zip(*U.rows)])
        return Subspace.from_vectors(vecs, self.n)

    def map_by(self, M: Matrix) -> "Subspace":
        """Image of this subspace under M (ambient k^{M.nrows})."""
        return Subspace.from_vectors([M.apply(r) for r in self.rows], M.nrows)

    def preimage_under(self, M: Matrix) -> "Subspace":
        """{x : M x in self} inside k^{M.ncols}."""
        Q = self.quotient_map()
        return kernel(Q * M)

    def quotient_map(self) -> Matrix:
        """Matrix k^n -> k^{n-dim} with kernel exactly this subspace."""
        piv = [next(j for j, x in enumerate(row) if x) for row in self.rows]
        pivset = set(piv)
        free = [j for j in range(self.n) if j not in pivset]
        out = []
        for f in free:
            # coordinate of (x mod W) dual to the free column f
            row = [ZERO] * self.n
            row[f] = ONE
            for r, p in enumerate(piv):
                row[p] = -self.rows[r][f]
            out.append(row)
        return Matrix(out, ncols=self.n)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    return U.intersect(V)


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    return U.add(V)


# -- sparse rows: dict col -> scalar ------------------------------------------

SparseRow = dict


def sparse_from_blocks(entries: Iterable[tuple[int, int, Matrix]],
                       nrows: int, ncols: int) -> list[SparseRow]:
    """Assemble sparse rows from (row_offset, col_offset, block) triples."""
    rows: list[SparseRow] = [dict() for _ in range(nrows)]
    for r0, c0, block in entries:
        for i, brow in enumerate(block.rows):
            target = rows[r0 + i]
            for j, v in enumerate(brow):
                if v:
                    c = c0 + j
                    w = target.get(c)
                    w = v if w is None else w + v
                    if w:
                        target[c] = w
                    elif c in target:
                        del target[c]
    return rows


def _sparse_reduce(row: SparseRow, pivots: dict) -> SparseRow:
    row = dict(row)
    while row:
        j = min(row)
        piv = pivots.get(j)
        if piv is None:
            return row
        f = row[j]
        for c, v in piv.items():
            w = row.get(c, ZERO) - f * v
            if w:
                row[c] = w
            elif c in row:
                del row[c]
    return row


def sparse_rank(rows: Iterable[SparseRow]) -> int:
    pivots: dict[int, SparseRow] = {}
    for row in rows:
        red = _sparse_reduce(row, pivots)
        if red:
            j = min(red)
            inv = ONE / red[j]
            pivots[j] = {c: inv * v for c, v in red.items()}
    return len(pivots)


def sparse_kernel_basis(rows: Sequence[SparseRow], ncols: int) -> list[list[Scalar]]:
    """Kernel basis of a sparse matrix (dense vectors out)."""
    pivots: dict[int, SparseRow] = {}
    for row in rows:
        red = _sparse_reduce(row, pivots)
        if red:
            j = min(red)
            inv = ONE / red[j]
            newrow = {c: inv * v for c, v in red.items()}
            # back-eliminate to keep a fully reduced set
            for p, prow in list(pivots.items()):
                f = prow.get(j)
                if f:
                    for c, v in newrow.items():
                        w = prow.get(c, ZERO) - f * v
                        if w:
                            prow[c] = w
                        elif c in prow:
                            del prow[c]
            pivots[j] = newrow
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for p, prow in pivots.items():
            coeff = prow.get(f)
            if coeff:
                v[p] = -coeff
        basis.append(v)
    return basis


def sparse_rank_with_extra(base: Sequence[SparseRow], extra: Sequence[SparseRow]) -> tuple[int, int]:
    """Ranks of span(base) and span(base + extra) in one elimination pass."""
    pivots: dict[int, SparseRow] = {}
    for row in base:
        red = _sparse_reduce(row, pivots)
        if red:
            j = min(red)
            inv = ONE / red[j]
            pivots[j] = {c: inv * v for c, v in red.items()}
    r0 = len(pivots)
    for row in extra:
        red = _sparse_reduce(row, pivots)
        if red:
            j = min(red)
            inv = ONE / red[j]
            pivots[j] = {c: inv * v for c, v in red.items()}
    return r0, len(pivots)

"""Exact linear algebra over the rationals and prime fields.

Rationals are ``gmpy2.mpq`` values (always reduced, positive denominator);
prime-field elements are plain ``int`` residues in ``range(p)``.  Matrices are
immutable row-major grids.  Every kernel, image and solution is exact.
"""
from __future__ import annotations

from collections import namedtuple
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpq


class DimensionMismatch(ValueError):
    pass


class Field:
    """The rationals (``p == 0``) or the prime field F_p."""

    __slots__ = ("p", "zero", "one")

    def __init__(self, p: int = 0):
        if p and not gmpy2.is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = int(p)
        self.zero = self(0)
        self.one = self(1)

    def __repr__(self):
        return "QQ" if not self.p else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    @property
    def name(self) -> str:
        return "Q" if not self.p else f"F{self.p}"

    def __call__(self, value):
        p = self.p
        if isinstance(value, str):
            return self.parse(value)
        if not p:
            return mpq(value)
        if isinstance(value, int):
            return value % p
        q = mpq(value)
        return int(q.numerator) * pow(int(q.denominator), -1, p) % p

    def parse(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return self(mpq(int(num), int(den)))
        return self(int(text))

    def format(self, x) -> str:
        if self.p:
            return str(int(x))
        q = mpq(x)
        if q.denominator == 1:
            return str(q.numerator)
        return f"{q.numerator}/{q.denominator}"

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(int(x), -1, self.p)
        return 1 / mpq(x)

    def random_element(self, rng, bound: int = 3):
        if self.p:
            return rng.randrange(self.p)
        return mpq(rng.randint(-bound, bound))


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def _reduce(field, x):
    return x % field.p if field.p else x


class Mat:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("field", "nrows", "ncols", "rows", "_hash")

    def __init__(self, field: Field, nrows: int, ncols: int, rows):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(tuple(r) for r in rows)
        self._hash = None
        if len(self.rows) != nrows or any(len(r) != ncols for r in self.rows):
            raise DimensionMismatch("entries do not match the declared shape")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rows(cls, field: Field, rows, ncols: Optional[int] = None) -> "Mat":
        rows = [[field(x) for x in r] for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, field: Field, cols, nrows: int) -> "Mat":
        cols = list(cols)
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]
        return cls(field, nrows, len(cols), rows)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Mat":
        z = field.zero
        return cls(field, nrows, ncols, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        z, o = field.zero, field.one
        return cls(field, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    # -- basic protocol ----------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __repr__(self):
        f = self.field.format
        body = "; ".join(" ".join(f(x) for x in r) for r in self.rows)
        return f"Mat({self.nrows}x{self.ncols}: [{body}])"

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.nrows, self.ncols, self.rows))
        return self._hash

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def columns(self) -> list:
        return [list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)]

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.rows)

    @property
    def T(self) -> "Mat":
        if not self.nrows:
            return Mat.zeros(self.field, self.ncols, 0)
        return Mat(self.field, self.ncols, self.nrows, zip(*self.rows))

    # -- arithmetic --------------------------------------------------
    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        field = self.field
        p = field.p
        z = field.zero
        n = other.ncols
        orows = other.rows
        out = []
        for r in self.rows:
            acc = [z] * n
            for k, a in enumerate(r):
                if a:
                    ok = orows[k]
                    for j in range(n):
                        b = ok[j]
                        if b:
                            acc[j] += a * b
            if p:
                acc = [x % p for x in acc]
            out.append(acc)
        return Mat(field, self.nrows, n, out)

    def apply(self, v: Sequence) -> list:
        """Matrix times a column vector given as a list."""
        field = self.field
        p = field.p
        out = []
        for r in self.rows:
            s = field.zero
            for a, b in zip(r, v):
                if a and b:
                    s += a * b
            out.append(s % p if p else s)
        return out

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        p = self.field.p
        rows = [[_r(a + b, p) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Mat(self.field, self.nrows, self.ncols, rows)

    def __sub__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in subtraction")
        p = self.field.p
        rows = [[_r(a - b, p) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Mat(self.field, self.nrows, self.ncols, rows)

    def __neg__(self) -> "Mat":
        return self.scale(-1)

    def scale(self, c) -> "Mat":
        c = self.field(c)
        p = self.field.p
        rows = [[_r(c * a, p) for a in r] for r in self.rows]
        return Mat(self.field, self.nrows, self.ncols, rows)

    def select(self, rows=None, cols=None) -> "Mat":
        rs = range(self.nrows) if rows is None else list(rows)
        cs = range(self.ncols) if cols is None else list(cols)
        return Mat(self.field, len(rs), len(cs), [[self.rows[i][j] for j in cs] for i in rs])

    def rank(self) -> int:
        return rref(self)[1]

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "Mat":
        if self.nrows != self.ncols:
            raise DimensionMismatch("inverse of a non-square matrix")
        x = solve(self, Mat.identity(self.field, self.nrows))
        if x is None or self.rank() != self.nrows:
            raise ZeroDivisionError("matrix is singular")
        return x


def _r(x, p):
    return x % p if p else x


def hstack(field: Field, mats: Sequence[Mat], nrows: Optional[int] = None) -> Mat:
    mats = list(mats)
    if nrows is None:
        nrows = mats[0].nrows if mats else 0
    for m in mats:
        if m.nrows != nrows:
            raise DimensionMismatch("row counts differ in hstack")
    rows = [sum((list(m.rows[i]) for m in mats), []) for i in range(nrows)]
    return Mat(field, nrows, sum(m.ncols for m in mats), rows)


def vstack(field: Field, mats: Sequence[Mat], ncols: Optional[int] = None) -> Mat:
    mats = list(mats)
    if ncols is None:
        ncols = mats[0].ncols if mats else 0
    rows = []
    for m in mats:
        if m.ncols != ncols:
            raise DimensionMismatch("column counts differ in vstack")
        rows.extend(m.rows)
    return Mat(field, len(rows), ncols, rows)


def block_matrix(field: Field, blocks, row_dims: Sequence[int], col_dims: Sequence[int]) -> Mat:
    """Assemble a matrix from a dict ``{(i, j): Mat}``; missing blocks are zero."""
    z = field.zero
    rows = [[z] * sum(col_dims) for _ in range(sum(row_dims))]
    roff = [sum(row_dims[:i]) for i in range(len(row_dims))]
    coff = [sum(col_dims[:j]) for j in range(len(col_dims))]
    for (i, j), m in blocks.items():
        if m.shape != (row_dims[i], col_dims[j]):
            raise DimensionMismatch(f"block {(i, j)} has shape {m.shape}")
        for a, r in enumerate(m.rows):
            row = rows[roff[i] + a]
            c0 = coff[j]
            for b, x in enumerate(r):
                if x:
                    row[c0 + b] = x
    return Mat(field, sum(row_dims), sum(col_dims), rows)


def block_diag(field: Field, mats: Sequence[Mat]) -> Mat:
    mats = list(mats)
    return block_matrix(
        field,
        {(i, i): m for i, m in enumerate(mats)},
        [m.nrows for m in mats],
        [m.ncols for m in mats],
    )


# ---------------------------------------------------------------------------
# Row reduction
# ---------------------------------------------------------------------------

def rref_rows(field: Field, rows: Iterable[Sequence], ncols: int):
    """Reduce a list of rows; returns (nonzero reduced rows, pivot columns)."""
    p = field.p
    work = [list(r) for r in rows if any(r)]
    nrows = len(work)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if work[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        lead = prow[c]
        if lead != 1:
            inv = field.inv(lead)
            if p:
                prow = [x * inv % p if x else x for x in prow]
            else:
                prow = [x * inv if x else x for x in prow]
            work[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i == r:
                continue
            row = work[i]
            f = row[c]
            if f:
                if p:
                    for j in nz:
                        row[j] = (row[j] - f * prow[j]) % p
                else:
                    for j in nz:
                        row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def rref(m: Mat):
    """Reduced row-echelon form: returns (R, rank, pivot_cols), R of m's shape."""
    red, pivots = rref_rows(m.field, m.rows, m.ncols)
    rank = len(red)
    z = m.field.zero
    full = red + [[z] * m.ncols for _ in range(m.nrows - rank)]
    return Mat(m.field, m.nrows, m.ncols, full), rank, pivots


def _kernel_vectors(field: Field, red, pivots, ncols):
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    z, o = field.zero, field.one
    p = field.p
    vecs = []
    for f in free:
        v = [z] * ncols
        v[f] = o
        for row, pc in zip(red, pivots):
            x = row[f]
            if x:
                v[pc] = (-x) % p if p else -x
        vecs.append(v)
    return vecs


def kernel_vectors(m: Mat) -> list:
    """A basis of {x : m x = 0} as plain lists (not canonicalised)."""
    red, pivots = rref_rows(m.field, m.rows, m.ncols)
    return _kernel_vectors(m.field, red, pivots, m.ncols)


def kernel(m: Mat) -> "Subspace":
    return Subspace.span(m.field, m.ncols, kernel_vectors(m))


def image(m: Mat) -> "Subspace":
    return Subspace.span(m.field, m.nrows, m.columns())


def solve(a: Mat, b: Mat) -> Optional[Mat]:
    """One solution x of a x = b, or None when the system is inconsistent."""
    if a.nrows != b.nrows:
        raise DimensionMismatch(f"solve: {a.shape} against {b.shape}")
    field = a.field
    n, k = a.ncols, b.ncols
    aug = [list(ra) + list(rb) for ra, rb in zip(a.rows, b.rows)]
    red, pivots = rref_rows(field, aug, n + k)
    if any(pc >= n for pc in pivots):
        return None
    z = field.zero
    x = [[z] * k for _ in range(n)]
    for row, pc in zip(red, pivots):
        x[pc] = row[n:]
    return Mat(field, n, k, x)


def solve_vector(a: Mat, v: Sequence) -> Optional[list]:
    x = solve(a, Mat(a.field, len(v), 1, [[e] for e in v]))
    return None if x is None else x.column(0)


class Coordinatizer:
    """Coordinates with respect to a fixed linearly independent list of vectors.

    The vectors are the columns of ``basis``; ``coords(v)`` returns the unique
    coefficient list, raising ``ValueError`` if v is outside their span.
    """

    def __init__(self, field: Field, vectors: Sequence[Sequence], dim: int):
        self.field = field
        self.dim = dim
        self.k = len(vectors)
        # rows of the augmented system [vectors^T | I]: reduce to read off a left inverse
        rows = []
        z, o = field.zero, field.one
        for i, v in enumerate(vectors):
            rows.append(list(v) + [o if j == i else z for j in range(self.k)])
        red, pivots = rref_rows(field, rows, dim + self.k)
        if len(red) != self.k or any(pc >= dim for pc in pivots):
            raise ValueError("vectors are linearly dependent")
        self._red = red
        self._pivots = pivots

    def coords(self, v: Sequence, check: bool = True) -> list:
        field = self.field
        p = field.p
        z = field.zero
        dim = self.dim
        out = [z] * self.k
        resid = list(v)
        for row, pc in zip(self._red, self._pivots):
            c = resid[pc]
            if c:
                for j in range(pc, dim):
                    x = row[j]
                    if x:
                        resid[j] = _r(resid[j] - c * x, p)
                for j in range(self.k):
                    x = row[dim + j]
                    if x:
                        out[j] = _r(out[j] + c * x, p)
        if check and any(resid):
            raise ValueError("vector is not in the span")
        return out


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

SubspaceOps = namedtuple("SubspaceOps", "sum intersection contains quotient_basis")


class Subspace:
    """A subspace of field^n, stored by its canonical rref basis (as rows)."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: Field, ambient_dim: int, red_rows, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = Mat(field, len(red_rows), ambient_dim, red_rows)
        self.pivots = tuple(pivots)

    @classmethod
    def span(cls, field: Field, ambient_dim: int, vectors) -> "Subspace":
        red, pivots = rref_rows(field, vectors, ambient_dim)
        return cls(field, ambient_dim, red, pivots)

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, [], [])

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, Mat.identity(field, n).rows, range(n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self) -> list:
        return [list(r) for r in self.basis.rows]

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"Subspace(dim={self.dim} in {self.ambient_dim})"

    def reduce(self, v: Sequence) -> list:
        """Normal form of v modulo the subspace (zero exactly on members)."""
        p = self.field.p
        v = list(v)
        for row, pc in zip(self.basis.rows, self.pivots):
            c = v[pc]
            if c:
                for j in range(pc, self.ambient_dim):
                    x = row[j]
                    if x:
                        v[j] = _r(v[j] - c * x, p)
        return v

    def contains_vector(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> list:
        """Coefficients of a member v in the rref basis (read off at the pivots)."""
        return [v[pc] for pc in self.pivots]

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.basis.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace.span(self.field, self.ambient_dim, self.vectors() + other.vectors())

    def intersection(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        if not self.dim or not other.dim:
            return Subspace.zero(self.field, self.ambient_dim)
        # x = U a = V b  <=>  [U | -V] (a, b) = 0
        u = self.basis.T
        v = other.basis.T
        m = hstack(self.field, [u, -v])
        vecs = [u.apply(k[: self.dim]) for k in kernel_vectors(m)]
        return Subspace.span(self.field, self.ambient_dim, vecs)

    def complement_indices(self) -> list:
        ps = set(self.pivots)
        return [c for c in range(self.ambient_dim) if c not in ps]

    def quotient_basis(self) -> list:
        """Standard basis vectors spanning a complement (non-pivot coordinates)."""
        z, o = self.field.zero, self.field.one
        return [[o if j == c else z for j in range(self.ambient_dim)] for c in self.complement_indices()]


def _check_ambient(u: Subspace, v: Subspace):
    if u.ambient_dim != v.ambient_dim or u.field != v.field:
        raise DimensionMismatch("subspaces live in different ambient spaces")


def subspace_ops(u: Subspace, v: Subspace) -> SubspaceOps:
    _check_ambient(u, v)
    return SubspaceOps(u + v, u.intersection(v), u.contains(v), u.quotient_basis())


def to_fraction(x) -> Fraction:
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))

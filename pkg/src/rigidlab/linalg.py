"""Exact dense linear algebra over cyclotomic fields.

Matrices are immutable, row-major, and keep every entry at one common
conductor (mixed inputs are lifted to the least common multiple field on
construction).  Row reduction uses partial pivoting on the first nonzero
entry; with exact field coefficients this is both canonical and safe at the
dimensions this package works at (<= 54 for convolution workspaces, 35 for
third exterior powers).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import lcm

from .cyclotomic import CyclotomicNumber, ZERO, ONE, _as_cyclotomic, format_scalar
from .errors import ShapeMismatch, SingularMatrix

Vector = tuple[CyclotomicNumber, ...]


def _entry(value) -> CyclotomicNumber:
    v = _as_cyclotomic(value)
    if v is None:
        raise TypeError(f"not a scalar entry: {value!r}")
    return v


class ExactMatrix:
    """Dense matrix over Q(zeta_N) with exact arithmetic."""

    __slots__ = ("rows", "cols", "conductor", "entries")

    def __init__(self, entries):
        rows = [tuple(_entry(e) for e in row) for row in entries]
        if not rows or not rows[0]:
            raise ShapeMismatch("matrix needs at least one row and column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeMismatch("ragged rows")
        conductor = 1
        for row in rows:
            for e in row:
                conductor = lcm(conductor, e.conductor)
        if conductor > 1:
            rows = [tuple(e.lift(conductor) for e in row) for row in rows]
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "entries", tuple(rows))

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def identity(n: int, conductor: int = 1) -> "ExactMatrix":
        one = ONE.lift(conductor)
        zero = ZERO.lift(conductor)
        return ExactMatrix([[one if i == j else zero for j in range(n)]
                            for i in range(n)])

    @staticmethod
    def zero(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([[ZERO] * cols for _ in range(rows)])

    @staticmethod
    def diagonal(values) -> "ExactMatrix":
        vals = [_entry(v) for v in values]
        n = len(vals)
        return ExactMatrix([[vals[i] if i == j else ZERO for j in range(n)]
                            for i in range(n)])

    @staticmethod
    def from_columns(columns) -> "ExactMatrix":
        cols = [tuple(_entry(e) for e in c) for c in columns]
        return ExactMatrix([[c[i] for c in cols] for i in range(len(cols[0]))])

    # -- basic accessors --------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key) -> CyclotomicNumber:
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def lift(self, conductor: int) -> "ExactMatrix":
        if conductor == self.conductor:
            return self
        return ExactMatrix([[e.lift(conductor) for e in row] for row in self.entries])

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        return ExactMatrix([[a + b for a, b in zip(ra, rb)]
                            for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot subtract {self.shape} and {other.shape}")
        return ExactMatrix([[a - b for a, b in zip(ra, rb)]
                            for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self):
        return ExactMatrix([[-a for a in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
            bt = list(zip(*other.entries))
            out = []
            for arow in self.entries:
                orow = []
                for bcol in bt:
                    acc = ZERO
                    for a, b in zip(arow, bcol):
                        if a and b:
                            acc = acc + a * b
                    orow.append(acc)
                out.append(orow)
            return ExactMatrix(out)
        scalar = _as_cyclotomic(other)
        if scalar is None:
            return NotImplemented
        return ExactMatrix([[a * scalar for a in row] for row in self.entries])

    def __rmul__(self, other):
        scalar = _as_cyclotomic(other)
        if scalar is None:
            return NotImplemented
        return self * scalar

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self.entries)))

    def trace(self) -> CyclotomicNumber:
        if not self.is_square():
            raise ShapeMismatch("trace needs a square matrix")
        acc = ZERO
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def inverse(self) -> "ExactMatrix":
        """Exact inverse; composes with the original to the exact identity."""
        if not self.is_square():
            raise ShapeMismatch("inverse needs a square matrix")
        n = self.rows
        ident = ExactMatrix.identity(n, self.conductor)
        aug = [list(self.entries[i]) + list(ident.entries[i]) for i in range(n)]
        for col in range(n):
            sel = next((r for r in range(col, n) if aug[r][col]), None)
            if sel is None:
                raise SingularMatrix("matrix is singular")
            aug[col], aug[sel] = aug[sel], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return ExactMatrix([row[n:] for row in aug])

    def det(self) -> CyclotomicNumber:
        if not self.is_square():
            raise ShapeMismatch("determinant needs a square matrix")
        n = self.rows
        work = [list(row) for row in self.entries]
        det = ONE.lift(self.conductor)
        for col in range(n):
            sel = next((r for r in range(col, n) if work[r][col]), None)
            if sel is None:
                return ZERO
            if sel != col:
                work[col], work[sel] = work[sel], work[col]
                det = -det
            pivot = work[col][col]
            det = det * pivot
            inv = pivot.inverse()
            for r in range(col + 1, n):
                if work[r][col]:
                    f = work[r][col] * inv
                    work[r] = [a - f * b for a, b in zip(work[r], work[col])]
        return det

    def is_identity(self) -> bool:
        if not self.is_square():
            return False
        return all(e.is_one() if i == j else e.is_zero()
                   for i, row in enumerate(self.entries)
                   for j, e in enumerate(row))

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        """Kronecker product: block layout with self's entries scaling copies
        of other."""
        out = []
        for arow in self.entries:
            for brow in other.entries:
                out.append([a * b for a in arow for b in brow])
        return ExactMatrix(out)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        n = lcm(self.conductor, other.conductor)
        return self.lift(n).entries == other.lift(n).entries

    def __hash__(self):
        return hash((self.rows, self.cols) + tuple(e for row in self.entries for e in row))

    def __str__(self):
        return "\n".join(", ".join(format_scalar(e) for e in row)
                         for row in self.entries)

    def __repr__(self):
        return f"<ExactMatrix {self.rows}x{self.cols} over Q(zeta_{self.conductor})>"


def matvec(a: ExactMatrix, v) -> Vector:
    if len(v) != a.cols:
        raise ShapeMismatch("vector length does not match matrix columns")
    out = []
    for row in a.entries:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def _rref(rows: list[list[CyclotomicNumber]], ncols: int):
    # In-place reduced row echelon form; returns the pivot column list.
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        sel = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if sel is None:
            continue
        rows[rank], rows[sel] = rows[sel], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return pivots


def rank(a: ExactMatrix) -> int:
    work = [list(row) for row in a.entries]
    return len(_rref(work, a.cols))


def kernel_basis(a: ExactMatrix) -> list[Vector]:
    """Exact basis of the right kernel; empty list for a trivial kernel.

    rank(a) plus the number of returned vectors equals the column count.
    Basis vectors are indexed by free columns in increasing order, each with
    a 1 in its free coordinate.
    """
    work = [list(row) for row in a.entries]
    pivots = _rref(work, a.cols)
    pivot_set = set(pivots)
    zero = ZERO.lift(a.conductor)
    one = ONE.lift(a.conductor)
    basis: list[Vector] = []
    for free in range(a.cols):
        if free in pivot_set:
            continue
        vec = [zero] * a.cols
        vec[free] = one
        for r, pcol in enumerate(pivots):
            coeff = work[r][free]
            if coeff:
                vec[pcol] = -coeff
        basis.append(tuple(vec))
    return basis


def common_kernel(mats) -> list[Vector]:
    """Basis of the intersection of the right kernels of several matrices.

    Computed by iterated restriction, which keeps every elimination at the
    size of the current solution space instead of the stacked system.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("common_kernel needs at least one matrix")
    basis = kernel_basis(mats[0])
    for m in mats[1:]:
        if not basis:
            return []
        restricted = ExactMatrix.from_columns([matvec(m, b) for b in basis])
        small = kernel_basis(restricted)
        basis = [_combine(basis, y) for y in small]
    return basis


def _combine(basis: list[Vector], coeffs: Vector) -> Vector:
    out = [ZERO] * len(basis[0])
    for c, vec in zip(coeffs, basis):
        if c:
            for i, v in enumerate(vec):
                if v:
                    out[i] = out[i] + c * v
    return tuple(out)


class SpanBasis:
    """Incremental echelon basis for exact row vectors.

    Supports membership-style insertion: ``insert`` returns True when the
    vector enlarges the span.  Used for algebra closures and for choosing
    quotient complements deterministically.
    """

    def __init__(self, length: int):
        self.length = length
        self.rows: dict[int, list[CyclotomicNumber]] = {}

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def _reduce(self, vec) -> list[CyclotomicNumber]:
        v = list(vec)
        while True:
            lead = next((i for i, x in enumerate(v) if x), None)
            if lead is None or lead not in self.rows:
                return v
            f = v[lead]
            row = self.rows[lead]
            v = [a - f * b for a, b in zip(v, row)]

    def contains(self, vec) -> bool:
        return all(not x for x in self._reduce(vec))

    def insert(self, vec) -> bool:
        v = self._reduce(vec)
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return False
        inv = v[lead].inverse()
        self.rows[lead] = [x * inv for x in v]
        return True


# -- multilinear constructions ------------------------------------------


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return a.kron(b)


def exterior_cube(a: ExactMatrix) -> ExactMatrix:
    """Induced action on the third exterior power.

    Basis vectors are e_i ^ e_j ^ e_k with i < j < k in lexicographic order;
    the (I, J) entry is the 3x3 minor of ``a`` on rows I and columns J, which
    makes the construction multiplicative.
    """
    if not a.is_square():
        raise ShapeMismatch("exterior cube needs a square matrix")
    n = a.rows
    if n < 3:
        raise ShapeMismatch("exterior cube needs size at least 3")
    triples = list(combinations(range(n), 3))
    e = a.entries
    out = []
    for (i, j, k) in triples:
        row = []
        for (p, q, r) in triples:
            m00, m01, m02 = e[i][p], e[i][q], e[i][r]
            m10, m11, m12 = e[j][p], e[j][q], e[j][r]
            m20, m21, m22 = e[k][p], e[k][q], e[k][r]
            minor = (m00 * (m11 * m22 - m12 * m21)
                     - m01 * (m10 * m22 - m12 * m20)
                     + m02 * (m10 * m21 - m11 * m20))
            row.append(minor)
        out.append(row)
    return ExactMatrix(out)


def triple_index(n: int) -> list[tuple[int, int, int]]:
    """The lexicographic basis order used by :func:`exterior_cube`."""
    return list(combinations(range(n), 3))


# -- characteristic polynomial ------------------------------------------


class ExactPolynomial:
    """Polynomial with cyclotomic coefficients, low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [_entry(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("ExactPolynomial is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> CyclotomicNumber:
        x = _entry(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other):
        if not isinstance(other, ExactPolynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ExactPolynomial([])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return ExactPolynomial(out)

    def __eq__(self, other):
        if not isinstance(other, ExactPolynomial):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    @staticmethod
    def from_roots(roots) -> "ExactPolynomial":
        poly = ExactPolynomial([ONE])
        for r in roots:
            poly = poly * ExactPolynomial([-_entry(r), ONE])
        return poly

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            lit = format_scalar(c)
            var = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if var and c.is_one():
                parts.append(var)
            elif var:
                wrapped = f"({lit})" if ("+" in lit or " - " in lit or lit.startswith("-")) else lit
                parts.append(f"{wrapped}*{var}")
            else:
                parts.append(lit)
        return " + ".join(parts)

    def __repr__(self):
        return f"ExactPolynomial({self})"


def char_poly(a: ExactMatrix) -> ExactPolynomial:
    """Monic characteristic polynomial det(xI - A), exact.

    Uses the Faddeev-LeVerrier recurrence, which needs divisions only by
    integers and is therefore exact over any characteristic-zero field.
    """
    if not a.is_square():
        raise ShapeMismatch("characteristic polynomial needs a square matrix")
    n = a.rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = a
    c = -m.trace()
    coeffs[n - 1] = c
    for k in range(2, n + 1):
        ident = ExactMatrix.identity(n, m.conductor)
        m = a * (m + ident * c)
        c = m.trace() * Fraction(-1, k)
        coeffs[n - k] = c
    return ExactPolynomial(coeffs)


# -- vec/operator helpers (row-major vec convention) ----------------------


def vec(a: ExactMatrix) -> Vector:
    """Row-major flattening of a matrix into a vector."""
    return tuple(e for row in a.entries for e in row)


def unvec(v, rows: int, cols: int) -> ExactMatrix:
    if len(v) != rows * cols:
        raise ShapeMismatch("vector length does not match target shape")
    return ExactMatrix([list(v[i * cols:(i + 1) * cols]) for i in range(rows)])


def op_left_mul(a: ExactMatrix, n: int) -> ExactMatrix:
    """Operator on vec(X) computing vec(A X) for X with n columns."""
    return a.kron(ExactMatrix.identity(n, a.conductor))


def op_right_mul(b: ExactMatrix, n: int) -> ExactMatrix:
    """Operator on vec(X) computing vec(X B) for X with n rows."""
    return ExactMatrix.identity(n, b.conductor).kron(b.transpose())


def op_sandwich(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Operator on vec(X) computing vec(A X B)."""
    return a.kron(b.transpose())

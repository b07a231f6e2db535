"""Monodromy tuples and the operations that transform them.

A monodromy tuple is an ordered list of invertible matrices, one per
puncture with the last slot at infinity, whose product is exactly the
identity.  This module provides the four constructions the workbench is
built around:

* rank-1 tuples from character values at the punctures,
* slotwise tensor product and scalar twist,
* the dual (entrywise inverse-transpose, itself a homomorphism, so the
  slot order and product relation survive untouched),
* middle convolution with a nonzero parameter distinct from 1.

Middle convolution follows the block-operator recipe: for finite-slot
matrices (A_1, ..., A_m) acting on V, the operator B_k on V^m is the
identity outside block row k, and block row k is

    lam*(A_1 - I), ..., lam*(A_{k-1} - I), lam*A_k, (A_{k+1} - I), ..., (A_m - I).

The convolved tuple is the action induced by (B_1, ..., B_m) on the
quotient of V^m by K + L, where K is the direct sum of the slotwise
kernels ker(A_k - I) and L is the common fixed space of all B_k, with the
infinity slot recomputed as the inverse of the product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

from .cyclotomic import CyclotomicNumber, ONE, ZERO, _as_cyclotomic, format_scalar, parse_scalar
from .errors import (BadLambda, DegenerateQuotient, LabelMismatch, NotRankOne,
                     ParseError, ProductNotOne, ShapeMismatch)
from .linalg import (ExactMatrix, SpanBasis, Vector, common_kernel,
                     kernel_basis, matvec)


@dataclass(frozen=True)
class MonodromyTuple:
    """Ordered tuple of invertible matrices with product exactly the identity.

    ``labels`` names the punctures; the last label is the infinity slot.
    ``warnings`` carries precondition notices attached by operations whose
    theoretical guarantees were not met (the result is still well defined).
    """

    labels: tuple[str, ...]
    matrices: tuple[ExactMatrix, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.labels) != len(self.matrices):
            raise ShapeMismatch("one matrix per puncture label required")
        if len(self.matrices) < 2:
            raise ShapeMismatch("a tuple needs at least two slots")
        size = self.matrices[0].rows
        for m in self.matrices:
            if not m.is_square() or m.rows != size:
                raise ShapeMismatch("all slot matrices must be square of equal size")
        conductor = 1
        for m in self.matrices:
            conductor = lcm(conductor, m.conductor)
        object.__setattr__(self, "matrices",
                           tuple(m.lift(conductor) for m in self.matrices))
        product = self.matrices[0]
        for m in self.matrices[1:]:
            product = product * m
        if not product.is_identity():
            raise ProductNotOne("slot matrices do not multiply to the identity")

    @property
    def r(self) -> int:
        return len(self.matrices)

    @property
    def rank(self) -> int:
        return self.matrices[0].rows

    @property
    def conductor(self) -> int:
        return self.matrices[0].conductor

    @property
    def finite_matrices(self) -> tuple[ExactMatrix, ...]:
        return self.matrices[:-1]

    @property
    def infinity_matrix(self) -> ExactMatrix:
        return self.matrices[-1]

    def is_rank_one(self) -> bool:
        return self.rank == 1

    def scalar_values(self) -> tuple[CyclotomicNumber, ...]:
        if not self.is_rank_one():
            raise NotRankOne("tuple has rank greater than one")
        return tuple(m[0, 0] for m in self.matrices)

    def with_warnings(self, extra) -> "MonodromyTuple":
        if not extra:
            return self
        return MonodromyTuple(self.labels, self.matrices,
                              self.warnings + tuple(extra))

    def nontrivial_finite_slots(self) -> int:
        return sum(0 if m.is_identity() else 1 for m in self.finite_matrices)

    def __repr__(self):
        return (f"<MonodromyTuple rank {self.rank}, slots {self.r}, "
                f"conductor {self.conductor}>")


DEFAULT_LABELS = ("x1", "x2", "x3", "inf")


def rank1_tuple(labels, values) -> MonodromyTuple:
    """Rank-1 tuple from one character value per puncture.

    Values must be nonzero and multiply to 1 (the product relation for a
    one-dimensional representation of the punctured sphere).
    """
    vals = []
    for v in values:
        cv = _as_cyclotomic(v)
        if cv is None:
            raise TypeError(f"not a scalar: {v!r}")
        if cv.is_zero():
            raise ProductNotOne("character values must be nonzero")
        vals.append(cv)
    prod = ONE
    for v in vals:
        prod = prod * v
    if not prod.is_one():
        raise ProductNotOne("character values do not multiply to 1")
    return MonodromyTuple(tuple(labels),
                          tuple(ExactMatrix([[v]]) for v in vals))


def trivial_tuple(labels, rank: int = 1) -> MonodromyTuple:
    """All-identity tuple of the given rank."""
    ident = ExactMatrix.identity(rank)
    return MonodromyTuple(tuple(labels), tuple(ident for _ in labels))


def _check_labels(t: MonodromyTuple, u: MonodromyTuple):
    if t.labels != u.labels:
        raise LabelMismatch(f"labels differ: {t.labels} vs {u.labels}")


def tensor(t: MonodromyTuple, u: MonodromyTuple) -> MonodromyTuple:
    """Slotwise Kronecker product; ranks multiply."""
    _check_labels(t, u)
    return MonodromyTuple(t.labels,
                          tuple(a.kron(b) for a, b in zip(t.matrices, u.matrices)),
                          t.warnings + u.warnings)


def dual(t: MonodromyTuple) -> MonodromyTuple:
    """Entrywise inverse-transpose.

    (AB)^{-T} = A^{-T} B^{-T}, so the map is a homomorphism and the product
    relation holds in the original slot order without renormalization.  For
    rank-1 tuples this is the entrywise inverse.
    """
    return MonodromyTuple(t.labels,
                          tuple(m.inverse().transpose() for m in t.matrices),
                          t.warnings)


def scale_twist(t: MonodromyTuple, c: MonodromyTuple) -> MonodromyTuple:
    """Multiply each slot of ``t`` by the corresponding scalar of the rank-1
    tuple ``c``; equal to the tensor product under the rank-preserving
    identification."""
    _check_labels(t, c)
    values = c.scalar_values()  # raises NotRankOne when c has higher rank
    return MonodromyTuple(t.labels,
                          tuple(m * v for m, v in zip(t.matrices, values)),
                          t.warnings + c.warnings)


# -- middle convolution ----------------------------------------------------


@dataclass(frozen=True)
class ConvolutionWorkspace:
    """Intermediate data of one middle convolution.

    ``big_operators`` are the block operators B_k on V^m; ``slot_kernels``
    spans K (slotwise kernels of A_k - I, embedded block by block);
    ``fixed_space`` spans L (common fixed vectors of all B_k);
    ``complement`` lists the standard basis indices realizing the quotient.
    """

    lam: CyclotomicNumber
    big_operators: tuple[ExactMatrix, ...]
    slot_kernels: tuple[Vector, ...]
    fixed_space: tuple[Vector, ...]
    complement: tuple[int, ...]
    warnings: tuple[str, ...] = field(default=())

    @property
    def ambient_dimension(self) -> int:
        return self.big_operators[0].rows

    @property
    def quotient_dimension(self) -> int:
        return len(self.complement)


def _embed(vec_part, block: int, m: int, n: int) -> Vector:
    out = [ZERO] * (m * n)
    for i, v in enumerate(vec_part):
        out[block * n + i] = v
    return tuple(out)


def convolution_workspace(t: MonodromyTuple, lam) -> ConvolutionWorkspace:
    """Build the block operators and the K, L subspaces for MC_lam(t)."""
    lam = _as_cyclotomic(lam)
    if lam is None:
        raise TypeError("convolution parameter must be a scalar")
    if lam.is_zero() or lam.is_one():
        raise BadLambda("convolution parameter must differ from 0 and 1")

    warnings = []
    if t.nontrivial_finite_slots() < 2:
        warnings.append(
            "input has fewer than two nontrivial finite local monodromies; "
            "convolution guarantees do not apply")
    from .analysis import is_irreducible  # local import avoids a cycle
    if not is_irreducible(t):
        warnings.append("input tuple is reducible; convolution guarantees do not apply")

    conductor = lcm(t.conductor, lam.conductor)
    finite = [m.lift(conductor) for m in t.finite_matrices]
    lam = lam.lift(conductor)
    m = len(finite)
    n = t.rank
    ident_n = ExactMatrix.identity(n, conductor)
    shifted = [a - ident_n for a in finite]
    lam_shifted = [s * lam for s in shifted]
    lam_slots = [a * lam for a in finite]

    big_ops = []
    fixed_rows = []  # block row k of (B_k - I), stacked: kernel is L
    for k in range(m):
        blocks = []
        for r in range(m):
            row = []
            for c in range(m):
                if r != k:
                    row.append(ident_n if r == c else None)
                elif c < k:
                    row.append(lam_shifted[c])
                elif c == k:
                    row.append(lam_slots[c])
                else:
                    row.append(shifted[c])
            blocks.append(row)
        entries = []
        for r in range(m):
            for i in range(n):
                line = []
                for c in range(m):
                    blk = blocks[r][c]
                    if blk is None:
                        line.extend([ZERO] * n)
                    else:
                        line.extend(blk.entries[i])
                entries.append(line)
        big_ops.append(ExactMatrix(entries))
        row_blocks = []
        for c in range(m):
            blk = blocks[k][c]
            row_blocks.append(blk - ident_n if c == k else blk)
        fixed_rows.extend(
            [e for c in range(m) for e in row_blocks[c].entries[i]]
            for i in range(n))

    slot_kernels: list[Vector] = []
    for k, a in enumerate(finite):
        for v in kernel_basis(a - ident_n):
            slot_kernels.append(_embed(v, k, m, n))

    fixed = kernel_basis(ExactMatrix(fixed_rows)) if fixed_rows else []

    # Greedy complement: a basis of K + L extended by standard vectors,
    # lowest index first.
    span = SpanBasis(m * n)
    independent: list[Vector] = []
    for v in slot_kernels:
        if span.insert(v):
            independent.append(v)
    overlap = False
    for v in fixed:
        if span.insert(v):
            independent.append(v)
        else:
            overlap = True
    if overlap:
        msg = "kernel block K and fixed block L intersect nontrivially"
        if not warnings:
            # With the preconditions satisfied this cannot happen; treat it
            # as a broken internal invariant rather than a data error.
            raise AssertionError(msg)
        warnings.append(msg)

    complement = []
    unit_rows = ExactMatrix.identity(m * n, conductor).entries
    for i in range(m * n):
        if span.dimension == m * n:
            break
        if span.insert(unit_rows[i]):
            complement.append(i)

    # K + L must be invariant under every B_k for the quotient action to be
    # defined; verify rather than trust.
    check = SpanBasis(m * n)
    for v in independent:
        check.insert(v)
    for op in big_ops:
        for v in independent:
            if not check.contains(matvec(op, v)):
                raise AssertionError("K + L is not invariant under the block operators")

    return ConvolutionWorkspace(lam, tuple(big_ops), tuple(slot_kernels),
                                tuple(fixed), tuple(complement), tuple(warnings))


def middle_convolution(t: MonodromyTuple, lam) -> MonodromyTuple:
    """Middle convolution MC_lam: the induced tuple on V^m / (K + L).

    Raises BadLambda for lam in {0, 1} and DegenerateQuotient when the
    quotient collapses to dimension zero.  Violations of the theoretical
    preconditions (irreducibility, two nontrivial finite slots) attach
    warnings to the result instead of failing.
    """
    ws = convolution_workspace(t, lam)
    d = ws.quotient_dimension
    if d == 0:
        raise DegenerateQuotient("middle convolution quotient has dimension zero")

    mn = ws.ambient_dimension
    kl_basis = []
    span = SpanBasis(mn)
    for v in ws.slot_kernels + ws.fixed_space:
        if span.insert(v):
            kl_basis.append(v)
    conductor = ws.big_operators[0].conductor
    unit = ExactMatrix.identity(mn, conductor).entries
    columns = [list(v) for v in kl_basis] + [list(unit[i]) for i in ws.complement]
    basis_matrix = ExactMatrix.from_columns(columns)
    to_coords = basis_matrix.inverse()
    offset = len(kl_basis)

    induced = []
    for op in ws.big_operators:
        cols = []
        for c in ws.complement:
            coords = matvec(to_coords, op.column(c))
            cols.append(coords[offset:])
        induced.append(ExactMatrix.from_columns(cols))

    product = induced[0]
    for mtx in induced[1:]:
        product = product * mtx
    induced.append(product.inverse())
    return MonodromyTuple(t.labels, tuple(induced), t.warnings + ws.warnings)


# -- serialization ----------------------------------------------------------
#
# Tuple document: a header (conductor, rank, slot count, labels), a blank
# line, then one matrix per slot in the scalar literal grammar, one row per
# line with comma-separated entries and a blank line between matrices.


def format_tuple_document(t: MonodromyTuple) -> str:
    lines = [f"conductor {t.conductor}",
             f"rank {t.rank}",
             f"slots {t.r}",
             "labels " + ",".join(t.labels),
             ""]
    for idx, m in enumerate(t.matrices):
        for row in m.entries:
            lines.append(", ".join(format_scalar(e) for e in row))
        if idx != t.r - 1:
            lines.append("")
    return "\n".join(lines) + "\n"


def parse_tuple_document(text: str) -> MonodromyTuple:
    lines = text.splitlines()
    header: dict[str, str] = {}
    body_start = 0
    seen = 0
    for i, raw in enumerate(lines):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if seen:
                body_start = i + 1
                break
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ParseError("malformed header line", i + 1, 1)
        header[parts[0]] = parts[1].strip()
        seen += 1
    else:
        body_start = len(lines)

    for key in ("conductor", "rank", "slots", "labels"):
        if key not in header:
            raise ParseError(f"missing header field {key!r}", 1, 1)
    conductor = int(header["conductor"])
    size = int(header["rank"])
    slots = int(header["slots"])
    labels = tuple(s.strip() for s in header["labels"].split(","))
    if len(labels) != slots:
        raise ParseError("label count does not match slot count", 1, 1)

    rows: list[list[CyclotomicNumber]] = []
    matrices: list[ExactMatrix] = []
    for i in range(body_start, len(lines)):
        line = lines[i].split("#", 1)[0].strip()
        if not line:
            continue
        lineno = i + 1
        entries = []
        for part in line.split(","):
            try:
                entries.append(parse_scalar(part, conductor))
            except ParseError as exc:
                raise ParseError(f"bad entry {part.strip()!r}: {exc}", lineno, 1) from exc
        if len(entries) != size:
            raise ParseError(f"expected {size} entries per row", lineno, 1)
        rows.append(entries)
        if len(rows) == size:
            matrices.append(ExactMatrix(rows))
            rows = []
    if rows:
        raise ParseError("incomplete matrix at end of document", len(lines), 1)
    if len(matrices) != slots:
        raise ParseError(f"expected {slots} matrices, found {len(matrices)}",
                         len(lines), 1)
    return MonodromyTuple(labels, tuple(matrices))

"""Conjugation-invariant analysis of monodromy tuples.

Everything here is exact: Jordan data from rank sequences, irreducibility by
algebra closure, invariant bilinear forms and fixed trivectors by linear
solves, Lie algebras as explicit matrix bases, and the rigidity dimension
count sum codim C_G(g_i) = 2(dim G - dim Z(G)) with the center computed
rather than assumed.

Most functions accept either a MonodromyTuple or a plain sequence of square
matrices; the latter keeps diagnostic checks (e.g. deliberately broken
fixtures) expressible without the tuple invariants.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from .cyclotomic import CyclotomicNumber, ONE, ZERO, _as_cyclotomic, format_scalar, zeta
from .errors import (DegenerateDatum, NotInGroup, NotQuasiUnipotent,
                     NotRankSeven, ShapeMismatch)
from .linalg import (ExactMatrix, SpanBasis, Vector, char_poly, common_kernel,
                     exterior_cube, kernel_basis, matvec, op_left_mul,
                     op_right_mul, rank, triple_index, unvec, vec)
from .tuples import MonodromyTuple

_EIG_KEY_BOUND = 360  # largest root-of-unity order given a display name


def _slot_matrices(obj) -> tuple[ExactMatrix, ...]:
    if isinstance(obj, MonodromyTuple):
        return obj.matrices
    mats = tuple(obj)
    conductor = 1
    for m in mats:
        conductor = lcm(conductor, m.conductor)
    return tuple(m.lift(conductor) for m in mats)


def default_order_bound(obj) -> int:
    """Eigenvalue-order bound used when the caller does not supply one:
    twice the lcm of the conductors in play and 6."""
    if isinstance(obj, MonodromyTuple):
        conductor = obj.conductor
    elif isinstance(obj, ExactMatrix):
        conductor = obj.conductor
    else:
        conductor = 1
        for m in obj:
            conductor = lcm(conductor, m.conductor)
    return 2 * lcm(conductor, 6)


# -- Jordan data -------------------------------------------------------------


def _eigenvalue_name(value: CyclotomicNumber) -> str:
    pair = value.root_of_unity_exponent(_EIG_KEY_BOUND)
    if pair is None:
        return format_scalar(value)
    k, e = pair
    if k == 1:
        return "1"
    if k == 2:
        return "-1"
    return f"zeta{k}" if e == 1 else f"zeta{k}^{e}"


def _eigenvalue_key(value: CyclotomicNumber):
    pair = value.root_of_unity_exponent(_EIG_KEY_BOUND)
    if pair is not None:
        return (0, pair[0], pair[1])
    return (1, 0, 0, format_scalar(value))


@dataclass(frozen=True)
class JordanData:
    """Multiset of (eigenvalue, Jordan block length) pairs."""

    blocks: tuple[tuple[CyclotomicNumber, int], ...]

    @staticmethod
    def of(pairs) -> "JordanData":
        norm = [(_as_cyclotomic(e).reduced(), int(length)) for e, length in pairs]
        norm.sort(key=lambda p: (_eigenvalue_key(p[0]), -p[1]))
        return JordanData(tuple(norm))

    @staticmethod
    def unipotent(*lengths: int) -> "JordanData":
        return JordanData.of((ONE, k) for k in lengths)

    @staticmethod
    def diagonal(*eigenvalues) -> "JordanData":
        return JordanData.of((e, 1) for e in eigenvalues)

    @property
    def total_dimension(self) -> int:
        return sum(length for _, length in self.blocks)

    def eigenvalue_multiplicities(self) -> dict[CyclotomicNumber, int]:
        out: dict[CyclotomicNumber, int] = {}
        for e, length in self.blocks:
            out[e] = out.get(e, 0) + length
        return out

    def __eq__(self, other):
        if not isinstance(other, JordanData):
            return NotImplemented
        return Counter(self.blocks) == Counter(other.blocks)

    def __hash__(self):
        return hash(frozenset(Counter(self.blocks).items()))

    def __str__(self):
        if all(e.is_one() for e, _ in self.blocks):
            lengths = sorted((k for _, k in self.blocks), reverse=True)
            return "J(" + ",".join(str(k) for k in lengths) + ")"
        if all(k == 1 for _, k in self.blocks):
            return "diag(" + ",".join(_eigenvalue_name(e) for e, _ in self.blocks) + ")"
        groups: dict[str, list[int]] = {}
        for e, k in self.blocks:
            groups.setdefault(_eigenvalue_name(e), []).append(k)
        parts = [f"{name}: {','.join(str(k) for k in sorted(ks, reverse=True))}"
                 for name, ks in groups.items()]
        return "blocks(" + "; ".join(parts) + ")"


def jordan_data(a: ExactMatrix, order_bound: int | None = None) -> JordanData:
    """Jordan block data of a quasi-unipotent matrix.

    Eigenvalue candidates are the roots of unity of order dividing
    ``order_bound`` (filtered through the characteristic polynomial); block
    lengths are recovered from the nullity sequence of powers of A - e*I.
    Raises NotQuasiUnipotent when the candidates do not account for the whole
    dimension, in which case the caller may raise the bound.
    """
    if not a.is_square():
        raise ShapeMismatch("jordan data needs a square matrix")
    if order_bound is None:
        order_bound = default_order_bound(a)
    n = a.rows
    p = char_poly(a)
    pairs: list[tuple[CyclotomicNumber, int]] = []
    total = 0
    for j in range(order_bound):
        e = zeta(order_bound, j).reduced()
        if not p(e).is_zero():
            continue
        conductor = lcm(a.conductor, e.conductor)
        shifted = a.lift(conductor) - ExactMatrix.identity(n, conductor) * e
        nullities = [0]
        power = ExactMatrix.identity(n, conductor)
        while True:
            power = power * shifted
            nullities.append(n - rank(power))
            if nullities[-1] == nullities[-2]:
                break
        multiplicity = nullities[-1]
        total += multiplicity
        # blocks of length >= k: nullities[k] - nullities[k-1]
        ge = [nullities[k] - nullities[k - 1] for k in range(1, len(nullities))]
        for k, count_ge in enumerate(ge, start=1):
            count_exact = count_ge - (ge[k] if k < len(ge) else 0)
            pairs.extend((e, k) for _ in range(count_exact))
    if total != n:
        raise NotQuasiUnipotent(
            f"only {total} of {n} dimensions have eigenvalues of order dividing "
            f"{order_bound}; raise the bound")
    return JordanData.of(pairs)


def eigenvalue_multiset(a: ExactMatrix, order_bound: int | None = None) -> Counter:
    """Eigenvalues with multiplicity, via the Jordan data."""
    return Counter(dict(jordan_data(a, order_bound).eigenvalue_multiplicities().items()))


# -- irreducibility ----------------------------------------------------------


def is_irreducible(obj) -> bool:
    """Burnside test: the unital algebra generated by the slot matrices has
    dimension n^2 exactly when no proper invariant subspace exists."""
    mats = _slot_matrices(obj)
    n = mats[0].rows
    if n == 1:
        return True
    target = n * n
    span = SpanBasis(target)
    ident = ExactMatrix.identity(n, mats[0].conductor)
    span.insert(vec(ident))
    work = deque([ident])
    while work and span.dimension < target:
        current = work.popleft()
        for g in mats:
            product = current * g
            if span.insert(vec(product)):
                work.append(product)
                if span.dimension == target:
                    return True
    return span.dimension == target


# -- invariant bilinear forms -------------------------------------------------


@dataclass(frozen=True)
class BilinearForm:
    """A bilinear form by its Gram matrix, with its symmetry class."""

    gram: ExactMatrix
    symmetry: str  # "symmetric" | "alternating" | "neither"
    nondegenerate: bool

    @staticmethod
    def classify(gram: ExactMatrix) -> "BilinearForm":
        gt = gram.transpose()
        if gt == gram:
            symmetry = "symmetric"
        elif gt == -gram:
            symmetry = "alternating"
        else:
            symmetry = "neither"
        return BilinearForm(gram, symmetry, not gram.det().is_zero())


def invariant_bilinear_forms(obj) -> list[BilinearForm]:
    """Basis of {Q : g^T Q g = Q for every slot g}, classified.

    For an irreducible tuple the space has dimension at most one (Schur).
    """
    mats = _slot_matrices(obj)
    n = mats[0].rows
    conductor = mats[0].conductor
    ident = ExactMatrix.identity(n * n, conductor)
    conditions = []
    for g in mats:
        gt = g.transpose()
        conditions.append(gt.kron(gt) - ident)  # vec(g^T Q g) - vec(Q)
    return [BilinearForm.classify(unvec(v, n, n)) for v in common_kernel(conditions)]


# -- fixed spaces and the trivector certificate -------------------------------


def common_fixed_space(obj, rep: str = "plain") -> list[Vector]:
    """Basis of the simultaneous fixed space of all slots in the chosen
    representation ("plain" or "exterior_cube")."""
    mats = _slot_matrices(obj)
    n = mats[0].rows
    if rep == "plain":
        images = mats
        dim = n
    elif rep == "exterior_cube":
        if n != 7:
            raise ShapeMismatch("exterior-cube representation expects rank 7")
        images = tuple(exterior_cube(m) for m in mats)
        dim = images[0].rows
    else:
        raise ValueError(f"unknown representation {rep!r}")
    ident = ExactMatrix.identity(dim, images[0].conductor)
    return common_kernel([g - ident for g in images])


def _wedge_tables(coords, n: int = 7):
    # coords indexed by triple_index(n); return dict {triple: coeff != 0}.
    return {t: c for t, c in zip(triple_index(n), coords) if c}


def _contract(axis: int, form3: dict) -> dict:
    out: dict[tuple[int, int], CyclotomicNumber] = {}
    for (i, j, k), c in form3.items():
        if axis == i:
            key, sign = (j, k), 1
        elif axis == j:
            key, sign = (i, k), -1
        elif axis == k:
            key, sign = (i, j), 1
        else:
            continue
        out[key] = out.get(key, ZERO) + (c if sign > 0 else -c)
    return {k: v for k, v in out.items() if v}


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]):
    if set(left) & set(right):
        return None, 0
    seq = list(left) + list(right)
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
                     if seq[i] > seq[j])
    return tuple(sorted(seq)), (-1) ** inversions


def _wedge(f1: dict, f2: dict) -> dict:
    out: dict[tuple[int, ...], CyclotomicNumber] = {}
    for idx1, c1 in f1.items():
        for idx2, c2 in f2.items():
            merged, sign = _merge_sign(idx1, idx2)
            if merged is None:
                continue
            term = c1 * c2
            out[merged] = out.get(merged, ZERO) + (term if sign > 0 else -term)
    return {k: v for k, v in out.items() if v}


def trivector_gram(coords) -> ExactMatrix:
    """Symmetric bilinear form induced by a 3-form w on C^7: the coefficient
    of the top form in (x . w) ^ (y . w) ^ w, evaluated on basis vectors."""
    omega = _wedge_tables(coords)
    contractions = [_contract(a, omega) for a in range(7)]
    top = tuple(range(7))
    gram = []
    for a in range(7):
        row = []
        for b in range(7):
            total = _wedge(_wedge(contractions[a], contractions[b]), omega)
            row.append(total.get(top, ZERO))
        gram.append(row)
    return ExactMatrix(gram)


@dataclass(frozen=True)
class TrivectorForm:
    """A fixed trivector with its induced bilinear contraction."""

    coords: Vector  # 35 coordinates over the lexicographic wedge basis
    gram: ExactMatrix

    @property
    def generic(self) -> bool:
        return not self.gram.det().is_zero()


def g2_certificate(obj) -> TrivectorForm | None:
    """Containment certificate for the stabilizer of a generic trivector.

    Returns the fixed trivector when the tuple fixes exactly one line in the
    third exterior power and the induced bilinear form is nondegenerate (a
    generic 3-form in dimension 7 has exactly this stabilizer); None
    otherwise.
    """
    mats = _slot_matrices(obj)
    if mats[0].rows != 7:
        raise NotRankSeven("certificate applies to rank-7 tuples only")
    fixed = common_fixed_space(mats, rep="exterior_cube")
    if len(fixed) != 1:
        return None
    omega = list(fixed[0])
    lead = next(i for i, c in enumerate(omega) if c)
    inv = omega[lead].inverse()
    omega = tuple(c * inv for c in omega)
    gram = trivector_gram(omega)
    form = TrivectorForm(omega, gram)
    return form if form.generic else None


# -- Lie algebras -------------------------------------------------------------


def _structure_operator(q: ExactMatrix) -> ExactMatrix:
    # Operator on vec(X) computing vec(X^T Q + Q X); filled directly from the
    # sparsity of the elementary matrices.
    n = q.rows
    cols = []
    for a in range(n):
        for b in range(n):
            col = [ZERO] * (n * n)
            for j in range(n):
                col[b * n + j] = col[b * n + j] + q[a, j]
            for i in range(n):
                col[i * n + b] = col[i * n + b] + q[i, a]
            cols.append(col)
    return ExactMatrix.from_columns(cols)


def _derived_cube_on(coords, n: int = 7) -> ExactMatrix:
    # Operator sending vec(X) to the derivation action of X on the fixed
    # 3-form: rows indexed by wedge triples, columns by matrix entries.
    triples = triple_index(n)
    position = {t: i for i, t in enumerate(triples)}
    omega = _wedge_tables(coords, n)
    cols = []
    for a in range(n):
        for b in range(n):
            col = [ZERO] * len(triples)
            for idx, c in omega.items():
                if b not in idx:
                    continue
                rest = [t for t in idx if t != b]
                if a in rest:
                    continue
                merged, sign = _merge_sign((a,), tuple(rest))
                pos = idx.index(b)
                total_sign = sign * (-1) ** pos
                col[position[merged]] = (col[position[merged]] + c if total_sign > 0
                                         else col[position[merged]] - c)
            cols.append(col)
    return ExactMatrix.from_columns(cols)


class LieAlgebraBasis:
    """Explicit basis of a matrix Lie algebra, with its defining datum."""

    def __init__(self, kind: str, n: int, basis, datum=None):
        self.kind = kind
        self.n = n
        self.basis = tuple(basis)
        self.datum = datum

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def center_dimension(self) -> int:
        """Dimension of {X in g : [X, Y] = 0 for all Y in g}, computed by
        iterated restriction against the basis."""
        current = list(self.basis)
        for y in self.basis:
            if not current:
                break
            cond = ExactMatrix.from_columns([vec(b * y - y * b) for b in current])
            solutions = kernel_basis(cond)
            current = [_matrix_combination(current, s) for s in solutions]
        return len(current)

    def coordinates_of(self, x: ExactMatrix) -> Vector | None:
        """Coordinates of a matrix over this basis, or None if outside."""
        stacked = ExactMatrix.from_columns([vec(b) for b in self.basis]
                                           + [vec(x)])
        for v in kernel_basis(stacked):
            if v[-1]:
                inv = (-v[-1]).inverse()
                return tuple(c * inv for c in v[:-1])
        return None

    def __repr__(self):
        return f"<LieAlgebraBasis {self.kind}{self.n}, dim {self.dimension}>"


def _matrix_combination(mats, coeffs) -> ExactMatrix:
    acc = None
    for c, m in zip(coeffs, mats):
        if not c:
            continue
        term = m * c
        acc = term if acc is None else acc + term
    return acc if acc is not None else ExactMatrix.zero(mats[0].rows, mats[0].cols)


def _gram_of(datum) -> ExactMatrix:
    if isinstance(datum, BilinearForm):
        return datum.gram
    if isinstance(datum, ExactMatrix):
        return datum
    raise TypeError("expected a bilinear form or Gram matrix")


def lie_algebra(kind: str, n: int, datum=None) -> LieAlgebraBasis:
    """Basis of gl_n, so(Q), sp(Q), or the stabilizer algebra of a generic
    trivector inside so of its contraction form."""
    if kind == "gl":
        basis = []
        for a in range(n):
            for b in range(n):
                rows = [[ONE if (i, j) == (a, b) else ZERO for j in range(n)]
                        for i in range(n)]
                basis.append(ExactMatrix(rows))
        return LieAlgebraBasis("gl", n, basis)

    if kind in ("so", "sp"):
        gram = _gram_of(datum)
        if gram.rows != n or gram.cols != n:
            raise ShapeMismatch("Gram matrix size does not match n")
        if gram.det().is_zero():
            raise DegenerateDatum("form must be nondegenerate")
        expected = "symmetric" if kind == "so" else "alternating"
        if BilinearForm.classify(gram).symmetry != expected:
            raise DegenerateDatum(f"{kind} requires an {expected} form")
        solutions = kernel_basis(_structure_operator(gram))
        return LieAlgebraBasis(kind, n, [unvec(v, n, n) for v in solutions], datum)

    if kind == "g2":
        if n != 7:
            raise NotRankSeven("the trivector stabilizer lives in dimension 7")
        if not isinstance(datum, TrivectorForm):
            raise TypeError("g2 needs a TrivectorForm datum")
        if not datum.generic:
            raise DegenerateDatum("trivector must be generic")
        conditions = [_structure_operator(datum.gram),
                      _derived_cube_on(datum.coords)]
        solutions = common_kernel(conditions)
        return LieAlgebraBasis("g2", n, [unvec(v, n, n) for v in solutions], datum)

    raise ValueError(f"unknown Lie algebra kind {kind!r}")


def _check_structure(g: ExactMatrix, alg: LieAlgebraBasis):
    if alg.kind == "gl":
        return
    if alg.kind in ("so", "sp"):
        gram = _gram_of(alg.datum)
        if g.transpose() * gram * g != gram:
            raise NotInGroup(f"matrix does not preserve the {alg.kind} form")
        return
    if alg.kind == "g2":
        datum: TrivectorForm = alg.datum
        if g.transpose() * datum.gram * g != datum.gram:
            raise NotInGroup("matrix does not preserve the contraction form")
        if matvec(exterior_cube(g), datum.coords) != datum.coords:
            raise NotInGroup("matrix does not fix the trivector")
        return
    raise ValueError(f"unknown Lie algebra kind {alg.kind!r}")


def centralizer_codim(g: ExactMatrix, alg: LieAlgebraBasis) -> int:
    """codim of {X in g : gX = Xg} relative to the algebra, by one exact
    solve in the span of the basis.  Raises NotInGroup when g fails the
    structure check of the ambient algebra."""
    _check_structure(g, alg)
    cond = ExactMatrix.from_columns([vec(g * b - b * g) for b in alg.basis])
    nullity = len(kernel_basis(cond))
    return alg.dimension - nullity


def gl_codim_from_jordan(jd: JordanData, n: int) -> int:
    """Partition-formula oracle for the gl_n centralizer codimension:
    n^2 minus sum over eigenvalues of sum_{i,j} min(block_i, block_j)."""
    by_eig: dict[CyclotomicNumber, list[int]] = {}
    for e, k in jd.blocks:
        by_eig.setdefault(e, []).append(k)
    centralizer = 0
    for lengths in by_eig.values():
        centralizer += sum(min(a, b) for a in lengths for b in lengths)
    return n * n - centralizer


@dataclass(frozen=True)
class RigidityReport:
    kind: str
    dimension: int
    center_dimension: int
    codims: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def sum_codim(self) -> int:
        return sum(self.codims)

    @property
    def target(self) -> int:
        return 2 * (self.dimension - self.center_dimension)

    @property
    def rigid(self) -> bool:
        return self.sum_codim == self.target


def rigidity_check(obj, alg: LieAlgebraBasis) -> RigidityReport:
    """Dimension-count rigidity test relative to the given algebra."""
    mats = _slot_matrices(obj)
    warnings: tuple[str, ...] = ()
    if not is_irreducible(mats):
        warnings = ("tuple is reducible; the dimension count is not a rigidity "
                    "criterion here",)
    codims = tuple(centralizer_codim(g, alg) for g in mats)
    return RigidityReport(alg.kind, alg.dimension, alg.center_dimension,
                          codims, warnings)


# -- intertwiners -------------------------------------------------------------


def find_intertwiner(t, u) -> ExactMatrix | None:
    """An invertible X with X t_k = u_k X for every slot, or None.

    The solution space is computed exactly; among its basis (ordered by free
    coordinate) the first invertible element is returned, falling back to
    deterministic combinations when no basis element is invertible on its
    own.
    """
    a = _slot_matrices(t)
    b = _slot_matrices(u)
    if len(a) != len(b):
        raise ShapeMismatch("tuples have different slot counts")
    n = a[0].rows
    if b[0].rows != n:
        raise ShapeMismatch("tuples have different ranks")
    conductor = lcm(a[0].conductor, b[0].conductor)
    a = [m.lift(conductor) for m in a]
    b = [m.lift(conductor) for m in b]
    conditions = [op_right_mul(ta, n) - op_left_mul(ub, n)
                  for ta, ub in zip(a, b)]
    solutions = common_kernel(conditions)
    if not solutions:
        return None
    candidates = [unvec(v, n, n) for v in solutions]
    for x in candidates:
        if not x.det().is_zero():
            return x
    # Nonzero solutions for irreducible tuples are invertible (Schur); if we
    # got here with irreducible input something is inconsistent.
    if is_irreducible(a) and is_irreducible(b):
        raise AssertionError("singular intertwiner between irreducible tuples")
    for s in range(2, n * len(candidates) + 2):
        acc = candidates[0]
        w = 1
        for x in candidates[1:]:
            w *= s
            acc = acc + x * Fraction(w)
        if not acc.det().is_zero():
            return acc
    return None


# -- reports ------------------------------------------------------------------


def _form_class(forms: list[BilinearForm]) -> str:
    if not forms:
        return "none"
    if len(forms) == 1:
        f = forms[0]
        degeneracy = "nondegenerate" if f.nondegenerate else "degenerate"
        return f"{f.symmetry} {degeneracy}"
    return f"space of dimension {len(forms)}"


def analysis_report(t: MonodromyTuple, groups=("gl",)) -> str:
    """Stable-keyed textual report: per-slot Jordan data, irreducibility,
    invariant forms, the trivector line for rank 7, and rigidity counts for
    the requested groups."""
    lines = ["tuple",
             f"  slots {t.r}",
             f"  rank {t.rank}",
             f"  conductor {t.conductor}",
             "  labels " + ",".join(t.labels)]
    for w in t.warnings:
        lines.append(f"  warning {w}")
    bound = default_order_bound(t)
    lines.append("jordan")
    for label, m in zip(t.labels, t.matrices):
        lines.append(f"  {label} {jordan_data(m, bound)}")
    irreducible = is_irreducible(t)
    lines.append(f"irreducible {'yes' if irreducible else 'no'}")
    forms = invariant_bilinear_forms(t)
    lines.append("invariant-form")
    lines.append(f"  dimension {len(forms)}")
    lines.append(f"  class {_form_class(forms)}")
    if len(forms) == 1:
        lines.append("  gram")
        for row in forms[0].gram.entries:
            lines.append("    " + ", ".join(format_scalar(e) for e in row))
    cert = None
    if t.rank == 7:
        cert = g2_certificate(t)
        fixed = common_fixed_space(t, rep="exterior_cube")
        lines.append("trivector")
        lines.append(f"  fixed-line-dimension {len(fixed)}")
        lines.append(f"  generic {'yes' if cert is not None else 'no'}")
        if cert is not None:
            lines.append("  coords " + ", ".join(format_scalar(c) for c in cert.coords))
    lines.append("rigidity")
    for kind in groups:
        alg = _algebra_for(t, kind, forms, cert)
        if alg is None:
            lines.append(f"  {kind} unavailable")
            continue
        report = rigidity_check(t, alg)
        lines.append(f"  {kind} sum {report.sum_codim} target {report.target} "
                     f"rigid {'yes' if report.rigid else 'no'}")
    return "\n".join(lines) + "\n"


def _algebra_for(t: MonodromyTuple, kind: str,
                 forms: list[BilinearForm], cert) -> LieAlgebraBasis | None:
    if kind == "gl":
        return lie_algebra("gl", t.rank)
    if kind in ("so", "sp"):
        usable = [f for f in forms if f.nondegenerate
                  and f.symmetry == ("symmetric" if kind == "so" else "alternating")]
        if not usable:
            return None
        return lie_algebra(kind, t.rank, usable[0])
    if kind == "g2":
        if t.rank != 7 or cert is None:
            return None
        return lie_algebra("g2", 7, cert)
    raise ValueError(f"unknown group kind {kind!r}")

"""Embedded rank-7 reference tuple and its verification suite.

The three explicit generators are shipped as a tuple document in the scalar
grammar; the fourth slot is the inverse of their product.  ``verify_appendix``
runs the full battery of structure checks against this fixture: product
relation, per-slot Jordan data, irreducibility, the symmetric invariant
form, the fixed trivector line, and the rigidity counts for gl7, so7 and the
trivector stabilizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .analysis import (BilinearForm, JordanData, default_order_bound,
                       g2_certificate, common_fixed_space,
                       invariant_bilinear_forms, is_irreducible, jordan_data,
                       lie_algebra, rigidity_check)
from .cyclotomic import zeta
from .linalg import ExactMatrix
from .tuples import DEFAULT_LABELS, MonodromyTuple, parse_tuple_document

# Generators at x1, x2, x3 over Q(zeta_3); the infinity slot is derived.
_GENERATOR_ROWS = """
1, -3, z - 1, 0, z - 4, 0, 2*z + 4
0, 3*z + 1, 2*z + 1, 0, 2*z + 1, -2*z - 1, 0
0, -3*z, -2*z, 0, -2*z - 1, 2*z + 1, 0
0, 3*z + 3, z + 2, 1, z + 2, -z - 2, 0
0, 3*z + 6, 3, 0, 4, -3, 0
0, 3*z + 3, z + 2, 0, z + 2, -z - 1, 0
0, 6, -2*z + 2, 0, -2*z + 2, 2*z - 2, 1

1, 0, 0, 0, 0, 0, 0
z - 1, 1, 0, 2*z + 1, 0, 0, 0
3, 0, 1, -2*z - 1, -3, 0, 2*z + 4
0, 0, 0, 1, 0, 0, 0
0, 0, 0, 0, 1, 0, 0
0, 0, 0, 0, 0, 1, 0
0, 0, 0, 0, 0, 0, 1

z, 0, 0, 0, 0, 0, 0
0, z, 0, 0, 0, 0, 0
0, 0, z, 0, 0, 0, 0
z + 2, 0, 0, -z - 1, 0, 0, 0
0, z + 2, 0, 0, -z - 1, 0, 0
0, 3*z + 3, z + 2, 0, 0, -z - 1, 0
0, 0, 0, 0, z - 1, 0, 1
"""


@lru_cache(maxsize=1)
def fixture_matrices() -> tuple[ExactMatrix, ...]:
    """The four slot matrices, the last being the inverse of the product of
    the first three."""
    document = ("conductor 3\nrank 7\nslots 3\nlabels x1,x2,x3\n\n"
                + _GENERATOR_ROWS.strip() + "\n")
    # Reuse the tuple parser for the three generators only; the product
    # relation does not hold for them alone, so read matrices manually.
    lines = document.splitlines()
    blocks: list[list[str]] = [[]]
    for line in lines[5:]:
        if not line.strip():
            blocks.append([])
        else:
            blocks[-1].append(line)
    mats = []
    from .cyclotomic import parse_scalar
    for block in blocks:
        if not block:
            continue
        mats.append(ExactMatrix([[parse_scalar(cell, 3) for cell in row.split(",")]
                                 for row in block]))
    product = mats[0] * mats[1] * mats[2]
    mats.append(product.inverse())
    return tuple(mats)


@lru_cache(maxsize=1)
def fixture_tuple() -> MonodromyTuple:
    return MonodromyTuple(DEFAULT_LABELS, fixture_matrices())


EXPECTED_JORDAN = (
    JordanData.unipotent(2, 2, 1, 1, 1),
    JordanData.unipotent(2, 2, 1, 1, 1),
    JordanData.diagonal(1, zeta(3), zeta(3), zeta(3),
                        zeta(3, 2), zeta(3, 2), zeta(3, 2)),
    JordanData.unipotent(3, 3, 1),
)

EXPECTED_RIGIDITY = {"gl": (102, 96, False), "so": (42, 42, True), "g2": (28, 28, True)}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def appendix_checks(mats) -> list[CheckResult]:
    """Run every fixture check on four raw matrices (no tuple invariants are
    assumed, so deliberately broken inputs are diagnosable)."""
    mats = tuple(mats)
    results: list[CheckResult] = []

    product = mats[0]
    for m in mats[1:]:
        product = product * m
    results.append(CheckResult("product-relation", product.is_identity(),
                               "g1*g2*g3*g4 = 1"))

    bound = default_order_bound(mats)
    for label, matrix, expected in zip(DEFAULT_LABELS, mats, EXPECTED_JORDAN):
        try:
            actual = jordan_data(matrix, bound)
            ok = actual == expected
            detail = f"expected {expected}, got {actual}"
        except Exception as exc:  # diagnosable fixture damage
            ok, detail = False, f"jordan computation failed: {exc}"
        results.append(CheckResult(f"jordan-{label}", ok, detail))

    results.append(CheckResult("irreducible", is_irreducible(mats)))

    forms = invariant_bilinear_forms(mats)
    form_ok = (len(forms) == 1 and forms[0].symmetry == "symmetric"
               and forms[0].nondegenerate)
    results.append(CheckResult(
        "invariant-form", form_ok,
        f"dimension {len(forms)}" + (f", {forms[0].symmetry}" if len(forms) == 1 else "")))

    fixed = common_fixed_space(mats, rep="exterior_cube") if mats[0].rows == 7 else []
    results.append(CheckResult("trivector-line", len(fixed) == 1,
                               f"fixed-space dimension {len(fixed)}"))
    cert = g2_certificate(mats) if mats[0].rows == 7 else None
    results.append(CheckResult("trivector-generic", cert is not None,
                               "induced form nondegenerate" if cert else
                               "no generic fixed trivector"))

    for kind, (want_sum, want_target, want_rigid) in EXPECTED_RIGIDITY.items():
        alg = None
        if kind == "gl":
            alg = lie_algebra("gl", 7)
        elif kind == "so" and form_ok:
            alg = lie_algebra("so", 7, forms[0])
        elif kind == "g2" and cert is not None:
            alg = lie_algebra("g2", 7, cert)
        if alg is None:
            results.append(CheckResult(f"rigidity-{kind}7" if kind != "g2" else "rigidity-g2",
                                       False, "prerequisite structure missing"))
            continue
        report = rigidity_check(mats, alg)
        ok = (report.sum_codim == want_sum and report.target == want_target
              and report.rigid == want_rigid)
        name = f"rigidity-{kind}7" if kind != "g2" else "rigidity-g2"
        results.append(CheckResult(
            name, ok,
            f"sum {report.sum_codim} target {report.target} rigid "
            f"{'yes' if report.rigid else 'no'}"))
    return results


@dataclass(frozen=True)
class AppendixReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append("all-checks " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def verify_appendix() -> AppendixReport:
    """Verify the embedded fixture; failures are report entries, not errors."""
    return AppendixReport(tuple(appendix_checks(fixture_matrices())))

"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Every scalar in this package is a :class:`CyclotomicNumber`: a rational
linear combination of powers of a primitive N-th root of unity, stored in
the power basis {1, zeta, ..., zeta^(phi(N)-1)} and reduced modulo the N-th
cyclotomic polynomial after every operation.  The representation is
canonical, so two values with the same conductor are equal exactly when
their coefficient vectors match, and values of different conductors are
compared after lifting both into the least common multiple field.

No floating point appears anywhere; coefficients are `fractions.Fraction`.

The module also owns the textual scalar grammar used by every document
format in the package: integer and rational literals, the symbol ``z`` for
the document's root of unity, operators ``+ - *`` and exponent ``^``, with
optional parentheses.  ``parse_scalar`` and ``format_scalar`` round-trip.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .errors import NotADivisor, ParseError
from .lexer import Token, TokenStream, tokenize

_F0 = Fraction(0)
_F1 = Fraction(1)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    """Euler's totient of a positive integer."""
    if n < 1:
        raise ValueError("conductor must be positive")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def divisors(n: int) -> list[int]:
    """Divisors of n in increasing order."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # Exact long division of integer polynomials, divisor monic, low degree
    # first.  Used only for building cyclotomic polynomials.
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    out = [0] * (dn - dd + 1)
    for k in range(dn - dd, -1, -1):
        c = num[k + dd]
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    if any(num):
        raise AssertionError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first.

    Computed as (x^n - 1) divided by the product of all lower cyclotomic
    polynomials at divisors of n; the division is exact because each factor
    is monic over the integers.
    """
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in divisors(n)[:-1]:
        num = _poly_div_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[tuple[int, ...], ...]:
    # Row k - phi(n) is the coefficient vector of x^k mod Phi_n, for
    # k = phi(n) .. max(2*phi(n) - 2, n - 1).  Entries are integers because
    # Phi_n is monic over Z.
    phi = euler_phi(n)
    mod = cyclotomic_polynomial(n)
    top = max(2 * phi - 2, n - 1)
    rows: list[tuple[int, ...]] = []
    cur = [-c for c in mod[:phi]]
    rows.append(tuple(cur))
    for _ in range(phi + 1, top + 1):
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            base = rows[0]
            cur = [c + lead * b for c, b in zip(cur, base)]
        rows.append(tuple(cur))
    return tuple(rows)


@lru_cache(maxsize=None)
def _power_vector(n: int, e: int) -> tuple[Fraction, ...]:
    # Coefficient vector of zeta_n^e in the power basis.
    phi = euler_phi(n)
    e %= n
    if e < phi:
        return tuple(_F1 if i == e else _F0 for i in range(phi))
    row = _reduction_rows(n)[e - phi]
    return tuple(Fraction(c) for c in row)


@lru_cache(maxsize=None)
def _lift_rows(n: int, m: int) -> tuple[tuple[Fraction, ...], ...]:
    # Row i is zeta_m^(i * m/n) expressed over the conductor-m basis; the
    # rows realize the field embedding Q(zeta_n) -> Q(zeta_m).
    step = m // n
    return tuple(_power_vector(m, i * step) for i in range(euler_phi(n)))


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    # Solve (rows) x = rhs over Q; None if inconsistent.  Tiny systems only.
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(ncols):
        sel = next((r for r in range(rank, nrows) if aug[r][col]), None)
        if sel is None:
            continue
        aug[rank], aug[sel] = aug[sel], aug[rank]
        inv = 1 / aug[rank][col]
        aug[rank] = [v * inv for v in aug[rank]]
        for r in range(nrows):
            if r != rank and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[rank])]
        pivots.append((rank, col))
        rank += 1
    for r in range(rank, nrows):
        if aug[r][ncols]:
            return None
    x = [_F0] * ncols
    for r, col in pivots:
        x[col] = aug[r][ncols]
    return x


def _coerce_rational(value) -> Fraction | None:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return None


class CyclotomicNumber:
    """An element of Q(zeta_N), exact and immutable.

    ``conductor`` is N; ``coeffs`` is the tuple of phi(N) rational
    coefficients over the power basis.  Use :func:`zeta` and
    :func:`rational` to construct values, then ordinary operators.
    """

    __slots__ = ("conductor", "coeffs", "_hash", "_min")

    def __init__(self, conductor: int, coeffs):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != euler_phi(conductor):
            raise ValueError(
                f"expected {euler_phi(conductor)} coefficients for conductor "
                f"{conductor}, got {len(coeffs)}")
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_min", None)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicNumber is immutable")

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and not any(self.coeffs[1:])

    def is_rational(self) -> bool:
        # The power basis contains 1, so rationals are exactly the values
        # supported on the constant coordinate.
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- ring structure ------------------------------------------------

    def _aligned(self, other: "CyclotomicNumber"):
        if self.conductor == other.conductor:
            return self.coeffs, other.coeffs, self.conductor
        m = lcm(self.conductor, other.conductor)
        return self.lift(m).coeffs, other.lift(m).coeffs, m

    def __add__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        a, b, n = self._aligned(other)
        return CyclotomicNumber(n, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.conductor, tuple(-c for c in self.coeffs))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        a, b, n = self._aligned(other)
        return CyclotomicNumber(n, tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        q = _coerce_rational(other)
        if q is not None:
            return CyclotomicNumber(self.conductor, tuple(c * q for c in self.coeffs))
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        if other.is_rational():
            q = other.coeffs[0]
            return CyclotomicNumber(self.conductor, tuple(c * q for c in self.coeffs))
        if self.is_rational():
            q = self.coeffs[0]
            return CyclotomicNumber(other.conductor, tuple(c * q for c in other.coeffs))
        a, b, n = self._aligned(other)
        return CyclotomicNumber(n, _mul_vectors(a, b, n))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.is_rational():
            return CyclotomicNumber(self.conductor,
                                    (1 / self.coeffs[0],) + self.coeffs[1:])
        mod = [Fraction(c) for c in cyclotomic_polynomial(self.conductor)]
        inv = _invert_mod(list(self.coeffs), mod)
        inv += [_F0] * (len(self.coeffs) - len(inv))
        return CyclotomicNumber(self.conductor, inv[:len(self.coeffs)])

    def __truediv__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = CyclotomicNumber(base.conductor, _power_vector(base.conductor, 0))
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # -- conductor movement ---------------------------------------------

    def lift(self, conductor: int) -> "CyclotomicNumber":
        """Express this value in Q(zeta_M); the current conductor must divide M."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor != 0:
            raise NotADivisor(
                f"conductor {self.conductor} does not divide {conductor}")
        rows = _lift_rows(self.conductor, conductor)
        out = [_F0] * euler_phi(conductor)
        for c, row in zip(self.coeffs, rows):
            if c:
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return CyclotomicNumber(conductor, out)

    def reduced(self) -> "CyclotomicNumber":
        """The same value over the smallest cyclotomic subfield containing it.

        Membership in Q(zeta_d) for d dividing the conductor is decided by an
        exact linear solve against the embedded power basis, so the result
        round-trips with :meth:`lift`.
        """
        if self._min is not None:
            return self._min
        result = self
        for d in divisors(self.conductor)[:-1]:
            rows = _lift_rows(d, self.conductor)
            sol = _solve_rational(
                [[rows[j][t] for j in range(len(rows))]
                 for t in range(len(self.coeffs))],
                list(self.coeffs))
            if sol is not None:
                result = CyclotomicNumber(d, sol)
                break
        object.__setattr__(self, "_min", result)
        return result

    # -- roots of unity --------------------------------------------------

    def root_of_unity_exponent(self, bound: int) -> tuple[int, int] | None:
        """Return (k, e) with self = zeta_k^e, gcd(e, k) = 1 and k minimal.

        Searches multiplicative orders up to ``bound``; None if self is not a
        root of unity of such order.
        """
        if self.is_zero():
            return None
        acc = self
        for k in range(1, bound + 1):
            if acc.is_one():
                if k == 1:
                    return (1, 0)
                for e in range(1, k):
                    if gcd(e, k) == 1 and zeta(k, e) == self:
                        return (k, e)
                return None
            acc = acc * self
        return None

    def is_root_of_unity(self, bound: int) -> bool:
        return self.root_of_unity_exponent(bound) is not None

    # -- equality and display ---------------------------------------------

    def __eq__(self, other):
        other = _as_cyclotomic(other)
        if other is None:
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a == b

    def __hash__(self):
        if self._hash is None:
            small = self.reduced()
            if small.conductor == 1:
                h = hash(small.coeffs[0])
            else:
                h = hash((small.conductor, small.coeffs))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"CyclotomicNumber({self.conductor}, {format_scalar(self)!r})"


def _as_cyclotomic(value) -> CyclotomicNumber | None:
    if isinstance(value, CyclotomicNumber):
        return value
    q = _coerce_rational(value)
    if q is None:
        return None
    return CyclotomicNumber(1, (q,))


def _mul_vectors(a, b, n: int) -> list[Fraction]:
    phi = len(a)
    out = [_F0] * phi
    over = [_F0] * max(phi - 1, 0)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if not bj:
                continue
            k = i + j
            if k < phi:
                out[k] += ai * bj
            else:
                over[k - phi] += ai * bj
    if any(over):
        rows = _reduction_rows(n)
        for d, c in enumerate(over):
            if c:
                row = rows[d]
                for t, rt in enumerate(row):
                    if rt:
                        out[t] += c * rt
    return out


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _invert_mod(a: list[Fraction], mod: list[Fraction]) -> list[Fraction]:
    # Extended Euclid in Q[x]: returns u with a*u = 1 modulo the (irreducible)
    # modulus.
    r0, r1 = _poly_trim(list(mod)), _poly_trim(list(a))
    s0, s1 = [_F0], [_F1]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("element shares a factor with the modulus")
    c = r1[0]
    return [v / c for v in s1]


def _poly_divmod(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    if dn < dd:
        return [], _poly_trim(num)
    lead = den[-1]
    out = [_F0] * (dn - dd + 1)
    for k in range(dn - dd, -1, -1):
        c = num[k + dd] / lead
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    return _poly_trim(out), _poly_trim(num)


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _poly_trim(out)


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [_F0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] -= v
    return _poly_trim(out)


def zeta(conductor: int, exponent: int = 1) -> CyclotomicNumber:
    """The root of unity zeta_N^e in canonical form."""
    return CyclotomicNumber(conductor, _power_vector(conductor, exponent))


def rational(value) -> CyclotomicNumber:
    """A rational number as a conductor-1 cyclotomic value."""
    q = _coerce_rational(value)
    if q is None:
        raise TypeError(f"not a rational value: {value!r}")
    return CyclotomicNumber(1, (q,))


ZERO = rational(0)
ONE = rational(1)


# ---------------------------------------------------------------------------
# Scalar literal grammar
#
#   expr   := term (('+' | '-') term)*
#   term   := factor ('*' factor)*
#   factor := '-'* primary ('^' '-'? NUMBER)?
#   primary:= NUMBER ('/' NUMBER)? | 'z' | '(' expr ')'
#
# 'z' denotes zeta_N for the conductor declared by the enclosing document.
# ---------------------------------------------------------------------------


def parse_scalar_tokens(ts: TokenStream, conductor: int) -> CyclotomicNumber:
    """Parse one scalar expression from a token stream (shared with the
    pipeline grammar, which embeds scalars in argument positions)."""
    return _parse_expr(ts, conductor)


def _parse_expr(ts: TokenStream, conductor: int) -> CyclotomicNumber:
    value = _parse_term(ts, conductor)
    while ts.peek().kind in "+-":
        op = ts.next().kind
        rhs = _parse_term(ts, conductor)
        value = value + rhs if op == "+" else value - rhs
    return value


def _parse_term(ts: TokenStream, conductor: int) -> CyclotomicNumber:
    value = _parse_factor(ts, conductor)
    while ts.peek().kind == "*":
        ts.next()
        value = value * _parse_factor(ts, conductor)
    return value


def _parse_factor(ts: TokenStream, conductor: int) -> CyclotomicNumber:
    sign = 1
    while ts.peek().kind == "-":
        ts.next()
        sign = -sign
    value = _parse_primary(ts, conductor)
    if ts.peek().kind == "^":
        ts.next()
        esign = 1
        if ts.peek().kind == "-":
            ts.next()
            esign = -1
        tok = ts.expect("number")
        value = value ** (esign * int(tok.text))
    return value * sign if sign < 0 else value


def _parse_primary(ts: TokenStream, conductor: int) -> CyclotomicNumber:
    tok = ts.peek()
    if tok.kind == "number":
        ts.next()
        num = int(tok.text)
        if ts.peek().kind == "/":
            ts.next()
            den = ts.expect("number")
            if int(den.text) == 0:
                raise ParseError("zero denominator", den.line, den.column)
            return rational(Fraction(num, int(den.text)))
        return rational(num)
    if tok.kind == "name":
        if tok.text != "z":
            raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.column)
        ts.next()
        return zeta(conductor)
    if tok.kind == "(":
        ts.next()
        value = _parse_expr(ts, conductor)
        ts.expect(")")
        return value
    raise ts.error("expected a scalar")


def parse_scalar(text: str, conductor: int) -> CyclotomicNumber:
    """Parse a complete scalar literal for the given document conductor."""
    ts = TokenStream(tokenize(text))
    value = _parse_expr(ts, conductor)
    ts.expect("eof")
    return value


def _format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(value: CyclotomicNumber, conductor: int | None = None) -> str:
    """Canonical literal: terms in ascending powers of z, e.g. ``1 + 3*z``.

    When ``conductor`` is given the value is lifted first, so the literal is
    valid inside a document declared at that conductor.
    """
    if conductor is not None:
        value = value.lift(conductor)
    pieces: list[str] = []
    for i, c in enumerate(value.coeffs):
        if not c:
            continue
        mag = abs(c)
        if i == 0:
            body = _format_fraction(mag)
        else:
            var = "z" if i == 1 else f"z^{i}"
            body = var if mag == 1 else f"{_format_fraction(mag)}*{var}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(pieces) if pieces else "0"

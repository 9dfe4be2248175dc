"""Exact arithmetic in a cyclotomic number field Q(zeta_N).

Elements are stored as integer coefficient vectors over the power basis
1, z, ..., z^(phi(N)-1) together with a positive common denominator.
Everything here is exact; there is no floating point in any equality or
zero test.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "CyclotomicField",
    "CycloRational",
    "Ray",
    "ComponentError",
    "cyclotomic_field",
    "parse_component",
    "parse_components",
    "hermitian_inner",
    "normalize_ray",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 60


class ComponentError(ValueError):
    """Raised for malformed or unsupported component expressions."""


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # Coefficients low degree first; den is monic.
    num = num[:]
    q = [0] * max(len(num) - len(den) + 1, 1)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1]
        if c:
            q[shift] = c
            for j, d in enumerate(den):
                num[shift + j] -= c * d
    rem = num[: len(den) - 1]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low degree first."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class CyclotomicField:
    """The field Q(zeta_N) with multiplication tables for the power basis."""

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        self.order = order
        self.phi_poly = cyclotomic_polynomial(order)
        self.degree = len(self.phi_poly) - 1
        d = self.degree
        # reduction of z^e for every exponent 0 <= e < max(2d-1, order)
        self._powers: list[tuple[int, ...]] = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(max(2 * d - 1, order)):
            self._powers.append(tuple(cur))
            cur = self._times_z(cur)
        # z^j for 0 <= j < order, used by conjugation (z^j -> z^(N-j))
        self._conj_images = [self._powers[(-j) % order] for j in range(d)]

    def _times_z(self, vec: list[int]) -> list[int]:
        top = vec[-1]
        out = [0] + vec[:-1]
        if top:
            for j in range(self.degree):
                out[j] -= top * self.phi_poly[j]
        return out

    def __repr__(self) -> str:
        return f"CyclotomicField({self.order})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CyclotomicField) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("CyclotomicField", self.order))

    # construction helpers
    def zero(self) -> CycloRational:
        return CycloRational(self, (0,) * self.degree, 1)

    def one(self) -> CycloRational:
        return self.from_rational(1)

    def from_rational(self, q: int | Fraction) -> CycloRational:
        q = Fraction(q)
        num = [0] * self.degree
        num[0] = q.numerator
        return CycloRational(self, tuple(num), q.denominator)

    def root_of_unity(self, k: int, m: int = 0) -> CycloRational:
        """Return zeta_m^k (zeta_N^k when m is omitted)."""
        if m:
            if self.order % m:
                raise ComponentError(
                    f"zeta_{m} is not in Q(zeta_{self.order}); "
                    f"use an order divisible by {m} (e.g. {math.lcm(self.order, m)})"
                )
            k = k * (self.order // m)
        return CycloRational(self, self._powers[k % self.order], 1)

    def reduce_power(self, e: int) -> tuple[int, ...]:
        return self._powers[e % self.order]

    def mul_vectors(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        d = self.degree
        conv = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        out = conv[:d]
        for e in range(d, 2 * d - 1):
            c = conv[e]
            if c:
                red = self._powers[e]
                for j in range(d):
                    if red[j]:
                        out[j] += c * red[j]
        return tuple(out)

    def conj_vector(self, a: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.degree
        for j, x in enumerate(a):
            if x:
                img = self._conj_images[j]
                for t in range(self.degree):
                    if img[t]:
                        out[t] += x * img[t]
        return tuple(out)

    def multiplication_matrix(self, a: Sequence[int]) -> list[list[int]]:
        """Matrix M with M @ b == a*b on power-basis coefficient vectors."""
        cols = []
        for j in range(self.degree):
            basis = [0] * self.degree
            basis[j] = 1
            cols.append(self.mul_vectors(a, basis))
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]

    # modular images, used for fast exact filtering of zero candidates
    def modular_root(self, p: int) -> int:
        """A primitive N-th root of unity modulo the prime p (p = 1 mod N)."""
        if (p - 1) % self.order:
            raise ValueError(f"{p} is not 1 modulo {self.order}")
        factors = _prime_factors(self.order)
        for g in range(2, p):
            r = pow(g, (p - 1) // self.order, p)
            if all(pow(r, self.order // f, p) != 1 for f in factors):
                return r
        raise ValueError("no primitive root found")


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def cyclotomic_field(order: int = DEFAULT_ORDER) -> CyclotomicField:
    return CyclotomicField(order)


class CycloRational:
    """An element of Q(zeta_N): ``sum(num[j] * z**j) / den``.

    Instances are immutable and hashable; equality is coefficient-wise on the
    reduced representation.
    """

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field: CyclotomicField, num: Sequence[int], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        num = tuple(num)
        if len(num) != field.degree:
            raise ValueError("coefficient vector has wrong length")
        if den < 0:
            num = tuple(-x for x in num)
            den = -den
        g = den
        for x in num:
            if x:
                g = math.gcd(g, x)
                if g == 1:
                    break
        if not any(num):
            den = 1
        elif g > 1:
            num = tuple(x // g for x in num)
            den //= g
        self.field = field
        self.num = num
        self.den = den
        self._hash = None

    # coercion ---------------------------------------------------------
    def _coerce(self, other) -> CycloRational:
        if isinstance(other, CycloRational):
            if other.field.order != self.field.order:
                raise ValueError("elements from different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d1, d2 = self.den, other.den
        return CycloRational(
            self.field, [a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2
        )

    __radd__ = __add__

    def __neg__(self):
        return CycloRational(self.field, [-a for a in self.num], self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloRational(
            self.field, self.field.mul_vectors(self.num, other.num), self.den * other.den
        )

    __rmul__ = __mul__

    def inverse(self) -> CycloRational:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        num, den = _inverse_vector(self.field.order, self.num)
        return CycloRational(self.field, [x * self.den for x in num], den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> CycloRational:
        """Complex conjugate (the automorphism z -> z^-1)."""
        return CycloRational(self.field, self.field.conj_vector(self.num), self.den)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, CycloRational):
            return NotImplemented
        return (
            self.field.order == other.field.order
            and self.den == other.den
            and self.num == other.num
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.order, self.num, self.den))
        return self._hash

    def sort_key(self) -> tuple:
        """A deterministic total order (not an order on the complex plane)."""
        return (tuple(Fraction(x, self.den) for x in self.num),)

    def modular_image(self, p: int, root: int, conjugate: bool = False) -> int:
        if self.den % p == 0:
            raise ValueError(f"denominator divisible by {p}")
        r = pow(root, -1, p) if conjugate else root
        acc = 0
        rp = 1
        for x in self.num:
            if x:
                acc += x * rp
            rp = rp * r % p
        return acc * pow(self.den, -1, p) % p

    def approx(self) -> complex:
        """Floating-point value, for display only."""
        z = complex(math.cos(2 * math.pi / self.field.order), math.sin(2 * math.pi / self.field.order))
        return sum(x * z**j for j, x in enumerate(self.num)) / self.den

    def __str__(self) -> str:
        terms = []
        for j, x in enumerate(self.num):
            if not x:
                continue
            if j == 0:
                terms.append(str(x))
            else:
                coef = "" if x == 1 else "-" if x == -1 else f"{x}*"
                terms.append(f"{coef}z^{j}" if j > 1 else f"{coef}z")
        body = " + ".join(terms).replace("+ -", "- ") or "0"
        if self.den != 1:
            body = f"({body})/{self.den}"
        return body

    def __repr__(self) -> str:
        return f"CycloRational<{self.field.order}>({self})"


@lru_cache(maxsize=4096)
def _inverse_vector(order: int, num: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Solve a * x = 1 exactly; returns x as (integer vector, denominator)."""
    field = cyclotomic_field(order)
    d = field.degree
    m = field.multiplication_matrix(num)
    rows = [[Fraction(v) for v in row] + [Fraction(1 if i == 0 else 0)] for i, row in enumerate(m)]
    for col in range(d):
        piv = next(r for r in range(col, d) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(d):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    sol = [rows[i][d] for i in range(d)]
    den = math.lcm(*(s.denominator for s in sol))
    return tuple(int(s * den) for s in sol), den


# ---------------------------------------------------------------------------
# component expressions

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>sqrt\d+|omega|w2|w|i|z|ω²|ω)|(?P<op>\*\*|[-+*/^()]))"
)


def _named_constant(field: CyclotomicField, name: str) -> CycloRational:
    if name == "i":
        return field.root_of_unity(1, 4)
    if name == "z":
        return field.root_of_unity(1)
    if name in ("w", "omega", "ω"):
        return field.root_of_unity(1, 3)
    if name in ("w2", "ω²"):
        return field.root_of_unity(2, 3)
    if name == "sqrt5":
        z5 = field.root_of_unity(1, 5)
        return 2 * (z5 + z5**4) + 1
    if name == "sqrt3":
        z12 = field.root_of_unity(1, 12)
        return z12 + z12**11
    if name == "sqrt2":
        z8 = field.root_of_unity(1, 8)
        return z8 + z8**7
    raise ComponentError(f"unsupported value {name!r}; only values in Q(zeta_{field.order}) are allowed")


class _Parser:
    def __init__(self, text: str, field: CyclotomicField):
        self.field = field
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ComponentError(f"cannot parse {text!r} at position {pos}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.pos = 0
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> CycloRational:
        if not self.tokens:
            raise ComponentError("empty component expression")
        value = self.expr()
        if self.pos != len(self.tokens):
            raise ComponentError(f"unexpected {self.peek()[1]!r} in {self.text!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while True:
            kind, tok = self.peek()
            if tok in ("*", "/"):
                self.take()
                rhs = self.unary()
                if tok == "*":
                    value = value * rhs
                else:
                    if rhs.is_zero():
                        raise ComponentError(f"division by zero in {self.text!r}")
                    value = value / rhs
            elif kind == "name" or tok == "(":
                # implicit multiplication, e.g. "2i" or "3(w+1)"
                value = value * self.power()
            else:
                return value

    def unary(self):
        tok = self.peek()[1]
        if tok == "-":
            self.take()
            return -self.unary()
        if tok == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, tok = self.take()
            if kind != "num":
                raise ComponentError(f"integer exponent expected in {self.text!r}")
            if sign < 0 and base.is_zero():
                raise ComponentError(f"division by zero in {self.text!r}")
            base = base ** (sign * int(tok))
        return base

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return self.field.from_rational(int(tok))
        if kind == "name":
            return _named_constant(self.field, tok)
        if tok == "(":
            value = self.expr()
            if self.take()[1] != ")":
                raise ComponentError(f"missing ')' in {self.text!r}")
            return value
        raise ComponentError(f"unexpected {tok!r} in {self.text!r}")


_LATEX = [
    (r"\omega^2", "w2"),
    (r"\omega^{2}", "w2"),
    (r"\omega", "w"),
    ("$", ""),
    ("{", "("),
    ("}", ")"),
]


def parse_component(expr: str, field: CyclotomicField | None = None) -> CycloRational:
    """Parse a component expression such as ``"(sqrt5-1)/2"`` or ``"-w2"``.

    Recognised names: ``i``, ``w`` (a primitive cube root of unity), ``w2``,
    ``sqrt2``, ``sqrt3``, ``sqrt5`` and ``z``, the primitive N-th root of
    unity generating the field. LaTeX spellings like ``$\\omega^2$`` are
    accepted as well.
    """
    field = field or cyclotomic_field()
    for a, b in _LATEX:
        expr = expr.replace(a, b)
    return _Parser(expr, field).parse()


def parse_components(text: str | Iterable[str], field: CyclotomicField | None = None) -> list[CycloRational]:
    """Parse a comma-separated component list; duplicates are removed, order kept."""
    if isinstance(text, str):
        text = text.strip()
        if text.startswith("{") and text.endswith("}"):
            text = text[1:-1]
        parts = _split_top_level(text)
    else:
        parts = list(text)
    out: list[CycloRational] = []
    for part in parts:
        value = parse_component(part, field)
        if value not in out:
            out.append(value)
    return out


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p]


# ---------------------------------------------------------------------------
# rays


class Ray(tuple):
    """A normalized vector: its first nonzero entry equals 1.

    Proportional vectors normalize to the same Ray, so Ray equality is
    projective equality.
    """

    __slots__ = ()

    @property
    def dimension(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return "Ray(" + ", ".join(str(x) for x in self) + ")"


def normalize_ray(vector: Sequence[CycloRational]) -> Ray:
    for x in vector:
        if not x.is_zero():
            if x == 1:
                return Ray(vector)
            inv = x.inverse()
            return Ray(y * inv if not y.is_zero() else y for y in vector)
    raise ValueError("cannot normalize the zero vector")


def hermitian_inner(a: Sequence[CycloRational], b: Sequence[CycloRational]) -> CycloRational:
    """sum(conj(a_i) * b_i), computed exactly."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("empty vectors")
    total = a[0].field.zero()
    for x, y in zip(a, b):
        if not x.is_zero() and not y.is_zero():
            total = total + x.conj() * y
    return total

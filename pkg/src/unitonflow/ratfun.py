"""Arithmetic on complex rational functions of one variable z.

The function field in play is the rational functions of the affine
coordinate z (the domain surface minus one point is a single complex
chart, and z = infinity is never evaluated).  Values are kept in reduced
form: numerator and denominator share no factor, denominator monic, so
structural comparison of coefficient lists is meaningful.

Coefficients are double precision complex numbers.  Polynomial GCDs use
the Euclidean algorithm with a relative coefficient threshold for
declaring remainders zero; inputs are small-degree functions where this
is well conditioned.
"""

from __future__ import annotations

from numbers import Complex as _NumberComplex

from .errors import PoleAtPoint

# Relative magnitude below which a coefficient is treated as zero when
# trimming and when terminating the Euclidean algorithm.
ZERO_TOL = 1e-12

# |den(z)| below this means z is (numerically) a pole.
POLE_TOL = 1e-8


def _trim(coeffs: tuple[complex, ...]) -> tuple[complex, ...]:
    """Drop negligible trailing (highest-degree) coefficients."""
    if not coeffs:
        return ()
    scale = max(abs(c) for c in coeffs)
    cutoff = ZERO_TOL * max(1.0, scale)
    i = len(coeffs)
    while i > 0 and abs(coeffs[i - 1]) <= cutoff:
        i -= 1
    return coeffs[:i]


def _add(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(tuple(out))


def _scale(a: tuple, c: complex) -> tuple:
    if c == 0:
        return ()
    return _trim(tuple(x * c for x in a))


def _mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [0j] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(tuple(out))


def _eval(a: tuple, z: complex) -> complex:
    acc = 0j
    for c in reversed(a):
        acc = acc * z + c
    return acc


def _derivative(a: tuple) -> tuple:
    return _trim(tuple(k * a[k] for k in range(1, len(a))))


def _divmod(a: tuple, b: tuple) -> tuple[tuple, tuple]:
    """Polynomial division; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    lead = b[-1]
    db = len(b) - 1
    quot = [0j] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        q = rem[k] / lead
        quot[k - db] = q
        if q != 0:
            for j in range(db + 1):
                rem[k - db + j] -= q * b[j]
    return _trim(tuple(quot)), _trim(tuple(rem[:db]))


def _gcd(a: tuple, b: tuple) -> tuple:
    """Monic GCD by the Euclidean algorithm with tolerance-based termination."""
    ref = max((abs(c) for c in a + b), default=1.0)
    ref = max(1.0, ref)
    while b:
        if max(abs(c) for c in b) <= ZERO_TOL * ref:
            break
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return ()
    lead = a[-1]
    return tuple(c / lead for c in a[:-1]) + (1 + 0j,)


class ComplexPoly:
    """Polynomial in z with complex coefficients, ascending order.

    The zero polynomial is the empty coefficient tuple; otherwise the
    trailing coefficient is nonzero.  Instances are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(tuple(complex(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, ComplexPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ComplexPoly({list(self.coeffs)!r})"

    def __add__(self, other):
        return ComplexPoly(_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return ComplexPoly(_add(self.coeffs, _scale(other.coeffs, -1)))

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(_mul(self.coeffs, other.coeffs))
        return ComplexPoly(_scale(self.coeffs, complex(other)))

    __rmul__ = __mul__

    def eval(self, z: complex) -> complex:
        """Horner evaluation."""
        return _eval(self.coeffs, z)

    def derivative(self) -> "ComplexPoly":
        return ComplexPoly(_derivative(self.coeffs))


_ONE = (1 + 0j,)


class ComplexRational:
    """Reduced ratio of two polynomials with monic denominator.

    Construction always reduces: the GCD of numerator and denominator is
    divided out and the denominator normalized monic, so two equal
    functions built along different routes compare equal coefficientwise
    (up to floating point noise; see structurally_close).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=_ONE):
        ncoeffs = num.coeffs if isinstance(num, ComplexPoly) else _trim(tuple(complex(c) for c in num))
        dcoeffs = den.coeffs if isinstance(den, ComplexPoly) else _trim(tuple(complex(c) for c in den))
        if not dcoeffs:
            raise ZeroDivisionError("rational function with zero denominator")
        if not ncoeffs:
            self.num = ()
            self.den = _ONE
            return
        g = _gcd(ncoeffs, dcoeffs)
        if len(g) > 1:
            ncoeffs, _ = _divmod(ncoeffs, g)
            dcoeffs, _ = _divmod(dcoeffs, g)
        if not ncoeffs:
            self.num = ()
            self.den = _ONE
            return
        lead = dcoeffs[-1]
        if lead != 1:
            ncoeffs = tuple(c / lead for c in ncoeffs)
            dcoeffs = tuple(c / lead for c in dcoeffs[:-1]) + (1 + 0j,)
        self.num = ncoeffs
        self.den = dcoeffs

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, c) -> "ComplexRational":
        c = complex(c)
        return cls((c,) if c != 0 else ())

    @classmethod
    def zero(cls) -> "ComplexRational":
        return cls(())

    @classmethod
    def one(cls) -> "ComplexRational":
        return cls(_ONE)

    @classmethod
    def variable(cls) -> "ComplexRational":
        """The coordinate function z."""
        return cls((0j, 1 + 0j))

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> complex:
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.num[0] / self.den[0] if self.num else 0j

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ComplexRational):
            return other
        if isinstance(other, _NumberComplex):
            return ComplexRational.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        num = _add(_mul(self.num, other.den), _mul(other.num, self.den))
        return ComplexRational(num, _mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(ComplexRational)
        out.num = _scale(self.num, -1)
        out.den = self.den
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ComplexRational.zero()
        return ComplexRational(_mul(self.num, other.num), _mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return ComplexRational(_mul(self.num, other.den), _mul(self.den, other.num))

    def derivative(self) -> "ComplexRational":
        """Symbolic d/dz by the quotient rule, reduced."""
        if self.den == _ONE:
            out = object.__new__(ComplexRational)
            out.num = _derivative(self.num)
            out.den = _ONE
            return out
        num = _add(_mul(_derivative(self.num), self.den),
                   _scale(_mul(self.num, _derivative(self.den)), -1))
        return ComplexRational(num, _mul(self.den, self.den))

    def eval(self, z: complex, pole_tol: float = POLE_TOL) -> complex:
        """num(z)/den(z); raises PoleAtPoint when the denominator is tiny."""
        d = _eval(self.den, z)
        if abs(d) < pole_tol:
            raise PoleAtPoint(z)
        return _eval(self.num, z) / d

    __call__ = eval

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, ComplexRational)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def structurally_close(self, other: "ComplexRational", tol: float = 1e-9) -> bool:
        """Coefficientwise comparison of the reduced forms."""
        if len(self.num) != len(other.num) or len(self.den) != len(other.den):
            return False
        scale = max(1.0, max((abs(c) for c in self.num + self.den), default=1.0))
        return (all(abs(a - b) <= tol * scale for a, b in zip(self.num, other.num))
                and all(abs(a - b) <= tol * scale for a, b in zip(self.den, other.den)))

    def __repr__(self):
        return f"ComplexRational(num={list(self.num)!r}, den={list(self.den)!r})"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        """{"num": [[re,im],...], "den": [[re,im],...]} with ascending coefficients."""
        return {
            "num": [[c.real, c.imag] for c in self.num],
            "den": [[c.real, c.imag] for c in self.den],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ComplexRational":
        num = [complex(re, im) for re, im in obj["num"]]
        den = [complex(re, im) for re, im in obj["den"]]
        return cls(num, den)


# Module-level names matching the operation vocabulary used elsewhere.

def add(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return a + b


def mul(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return a * b


def div(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return a / b


def derivative(a: ComplexRational) -> ComplexRational:
    return a.derivative()


def evaluate(a: ComplexRational, z: complex, pole_tol: float = POLE_TOL) -> complex:
    return a.eval(z, pole_tol)


Z = ComplexRational.variable()
ONE = ComplexRational.one()
ZERO = ComplexRational.zero()

"""Scalar field elements for the exact and floating point modes.

Exact mode works over the rationals (``fractions.Fraction``) and, for the
complex field, over Gaussian rationals.  Float mode uses ``float`` and
``complex``.  Arrays of exact scalars are numpy ``object`` arrays.
"""

from __future__ import annotations

import numbers
import re
from fractions import Fraction

import numpy as np

TAU_RANK = 1e-9


class GaussRational:
    """Complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return _gr(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return _gr(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return _gr(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return _gr(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return _gr((self.re * o.re + self.im * o.im) / den,
                   (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if not isinstance(e, int):
            return complex(self) ** e
        if e < 0:
            return GaussRational(1) / self ** (-e)
        out = GaussRational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) == other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussRational({self.re}, {self.im})"


def _gr(re, im):
    # Collapse to a plain Fraction when the imaginary part vanishes.
    if im == 0:
        return re
    return GaussRational(re, im)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, GaussRational)) and not isinstance(x, bool)


def is_exact_array(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def to_float_scalar(x):
    if isinstance(x, GaussRational):
        return complex(x)
    if isinstance(x, (int, Fraction)):
        return float(x)
    return x


def to_exact_scalar(x):
    """Exact rational value of ``x``; floats convert by their binary value."""
    if isinstance(x, (Fraction, GaussRational)):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return _gr(Fraction(float(x.real)), Fraction(float(x.imag)))
    if isinstance(x, numbers.Real):
        return Fraction(float(x))
    raise TypeError(f"cannot convert {x!r} to an exact scalar")


def to_float_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype != object:
        return a
    flat = [to_float_scalar(x) for x in a.ravel()]
    dtype = complex if any(isinstance(x, complex) for x in flat) else float
    return np.array(flat, dtype=dtype).reshape(a.shape)


def to_exact_array(a) -> np.ndarray:
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = to_exact_scalar(x.item() if hasattr(x, "item") else x)
    return out


def zeros(shape, exact: bool, complex_field: bool = False) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=complex if complex_field else float)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def magnitude(x) -> float:
    return abs(to_float_scalar(x))


def vec_norm(v) -> float:
    """Euclidean (Hermitian) norm, computed in floating point."""
    v = to_float_array(np.asarray(v))
    if v.size == 0:
        return 0.0
    return float(np.linalg.norm(v))


_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\s*$")


def parse_scalar(text, exact: bool | None = None):
    """Parse a coefficient given as a string, number, or ``[re, im]`` pair.

    ``"p/q"`` and plain integers are always exact.  Decimal strings are exact
    unless ``exact`` is False.  JSON floats are inexact unless ``exact`` is
    True.  Strings containing ``j`` are parsed as Python complex literals.
    """
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ValueError(f"complex coefficient needs [re, im], got {text!r}")
        re_part = parse_scalar(text[0], exact)
        im_part = parse_scalar(text[1], exact)
        if is_exact_scalar(re_part) and is_exact_scalar(im_part):
            return _gr(Fraction(re_part), Fraction(im_part))
        return complex(to_float_scalar(re_part), to_float_scalar(im_part))
    if isinstance(text, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(text, int):
        return Fraction(text) if exact is not False else float(text)
    if isinstance(text, float):
        return Fraction(repr(text)) if exact else text
    if not isinstance(text, str):
        raise ValueError(f"unsupported scalar {text!r}")
    s = text.strip()
    if _RATIONAL.match(s):
        val = Fraction(s.replace(" ", ""))
        return val if exact is not False else float(val)
    if _DECIMAL.match(s):
        return Fraction(s) if exact is not False else float(s)
    if "j" in s:
        z = complex(s.replace(" ", ""))
        return to_exact_scalar(z) if exact else z
    raise ValueError(f"cannot parse scalar {text!r}")


def format_scalar(x):
    """JSON-ready form: exact rationals as ``"p/q"`` strings, floats as numbers."""
    if isinstance(x, GaussRational):
        return {"re": format_scalar(x.re), "im": format_scalar(x.im)}
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    return float(x)


def format_array(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return format_scalar(a.item() if a.dtype != object else a[()])
    return [format_array(row) for row in a]

"""Overflow-safe scaled complex arithmetic.

Lattice coefficients grow like exp(tau^2 m^2) and theta-series terms
near the interesting circles reach magnitudes far beyond the double
range, so every quantity that can leave [1e-308, 1e308] is carried as

    value = mantissa * B**exponent,      B = 2**128,

with a complex mantissa normalised to |mantissa| in [1, B) and an
arbitrary-size integer exponent.  The base is a power of two so every
renormalisation is an exact ldexp; converting a plain double in range
to a ScaledValue and back is bit-exact.
"""

from __future__ import annotations

import cmath
import math

from .errors import SaturationError

BASE_LOG2 = 128
LN_BASE = BASE_LOG2 * math.log(2.0)

# ln(2) split so that (128*k) * _LN2_HI is exact for every exponent k met in
# practice (the low 21 mantissa bits of _LN2_HI are zero); keeps from_ln
# accurate to ~1 ulp even for log-magnitudes in the tens of thousands.
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10


def _ldexp_complex(value: complex, shift: int) -> complex:
    return complex(math.ldexp(value.real, shift), math.ldexp(value.imag, shift))


class ScaledValue:
    """A complex number stored as mantissa * (2**128)**exponent."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: complex = 0j, exponent: int = 0):
        m = complex(mantissa)
        if not (math.isfinite(m.real) and math.isfinite(m.imag)):
            raise SaturationError(f"non-finite mantissa {m!r}")
        if m == 0:
            object.__setattr__(self, "mantissa", 0j)
            object.__setattr__(self, "exponent", 0)
            return
        # frexp: |m| = f * 2**e2 with f in [0.5, 1); shift so |m| lands in [1, B)
        _, e2 = math.frexp(abs(m))
        shift = (e2 - 1) // BASE_LOG2
        if shift:
            m = _ldexp_complex(m, -shift * BASE_LOG2)
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", exponent + shift)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("ScaledValue is immutable")

    # ---------------------------------------------------------------- factories

    @classmethod
    def zero(cls) -> "ScaledValue":
        return cls(0j, 0)

    @classmethod
    def one(cls) -> "ScaledValue":
        return cls(1.0 + 0j, 0)

    @classmethod
    def from_complex(cls, value) -> "ScaledValue":
        return cls(complex(value), 0)

    @classmethod
    def from_ln(cls, ln_magnitude: float, phase: float = 0.0) -> "ScaledValue":
        """exp(ln_magnitude) * exp(i*phase), safe for any ln_magnitude."""
        if ln_magnitude == -math.inf:
            return cls.zero()
        if not math.isfinite(ln_magnitude):
            raise SaturationError(f"non-finite log magnitude {ln_magnitude!r}")
        k = math.floor(ln_magnitude / LN_BASE)
        t = float(BASE_LOG2 * k)
        resid = (ln_magnitude - t * _LN2_HI) - t * _LN2_LO
        mant = math.exp(resid) * complex(math.cos(phase), math.sin(phase))
        return cls(mant, k)

    @classmethod
    def from_pow(cls, base, power: int) -> "ScaledValue":
        """Integer power of a plain base by exact binary exponentiation.

        Preferred over from_ln(power * log(base)) for q**N factors: the
        relative error stays O(log2(N) * eps) no matter how large N is.
        """
        b = cls.from_complex(base)
        if b.is_zero:
            if power <= 0:
                raise ZeroDivisionError("0 cannot be raised to a non-positive power")
            return cls.zero()
        n = abs(power)
        result = cls.one()
        while n:
            if n & 1:
                result = result * b
            n >>= 1
            if n:
                b = b * b
        if power < 0:
            return cls.one() / result
        return result

    # ---------------------------------------------------------------- queries

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def ln_abs(self) -> float:
        """log|value|, or -inf for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exponent * LN_BASE

    def phase(self) -> float:
        return cmath.phase(self.mantissa)

    def to_complex(self) -> complex:
        """Down-convert; raises SaturationError when out of double range.

        Values far below the double range quietly become 0.0.
        """
        if self.exponent == 0:
            return self.mantissa
        shift = self.exponent * BASE_LOG2
        if shift > 0 and self.ln_abs() > 709.0:
            raise SaturationError(
                f"value with log-magnitude {self.ln_abs():.6g} exceeds double range"
            )
        try:
            return _ldexp_complex(self.mantissa, shift)
        except OverflowError as exc:  # component overflow
            raise SaturationError(str(exc)) from exc

    __complex__ = to_complex

    # ---------------------------------------------------------------- arithmetic

    @staticmethod
    def _coerce(other) -> "ScaledValue | None":
        if isinstance(other, ScaledValue):
            return other
        if isinstance(other, (int, float, complex)):
            return ScaledValue.from_complex(other)
        return None

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ScaledValue(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ScaledValue(self.mantissa / o.mantissa, self.exponent - o.exponent)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero:
            return o
        if o.is_zero:
            return self
        hi, lo = (self, o) if self.exponent >= o.exponent else (o, self)
        gap = hi.exponent - lo.exponent
        # B**-2 = 2**-256 is already far below double precision relative
        # to |hi|; keep a couple of guard steps anyway.
        if gap > 4:
            return hi
        return ScaledValue(
            hi.mantissa + _ldexp_complex(lo.mantissa, -gap * BASE_LOG2), hi.exponent
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self):
        return ScaledValue(-self.mantissa, self.exponent)

    def __abs__(self) -> "ScaledValue":
        return ScaledValue(abs(self.mantissa), self.exponent)

    def conjugate(self) -> "ScaledValue":
        return ScaledValue(self.mantissa.conjugate(), self.exponent)

    # ---------------------------------------------------------------- misc

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.mantissa == o.mantissa and self.exponent == o.exponent

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    def __repr__(self):
        if self.is_zero:
            return "ScaledValue(0)"
        return f"ScaledValue({self.mantissa!r}, exponent={self.exponent})"

from __future__ import annotations

from fractions import Fraction

from .polycore import Rational, as_rational, format_rational


class Scalar:
    """
    Either an exact rational or a float carrying an absolute error bound.
    Arithmetic between scalars stays exact as long as both operands are exact and propagates
    error bounds conservatively otherwise.

    Do not create approximate values with negative error; use :meth:`exact` and :meth:`approx`.
    """

    __slots__ = ("_value", "_error")

    def __init__(self, value: Fraction | float, error: float | None = None):
        if error is None:
            assert isinstance(value, (Fraction, int))
            self._value: Fraction | float = Fraction(value)
        else:
            assert error >= 0, "negative error bound"
            self._value = float(value)
        self._error: float | None = None if error is None else float(error)

    @classmethod
    def exact(cls, value: Rational | str) -> Scalar:
        return cls(as_rational(value))

    @classmethod
    def approx(cls, value: float, error: float) -> Scalar:
        return cls(float(value), error)

    @classmethod
    def coerce(cls, value) -> Scalar:
        if isinstance(value, Scalar):
            return value
        if isinstance(value, float):
            return cls.approx(value, 0.0)
        return cls.exact(value)

    @property
    def is_exact(self) -> bool:
        return self._error is None

    @property
    def value(self) -> Fraction | float:
        return self._value

    @property
    def error(self) -> float:
        return 0.0 if self._error is None else self._error

    def __float__(self):
        return float(self._value)

    def __add__(self, other) -> Scalar:
        other = Scalar.coerce(other)
        if self.is_exact and other.is_exact:
            return Scalar(self._value + other._value)
        return Scalar.approx(float(self) + float(other), self.error + other.error)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(-self._value, self._error)

    def __sub__(self, other) -> Scalar:
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other) -> Scalar:
        other = Scalar.coerce(other)
        if self.is_exact and other.is_exact:
            return Scalar(self._value * other._value)
        a, b = float(self), float(other)
        ea, eb = self.error, other.error
        return Scalar.approx(a * b, abs(a) * eb + abs(b) * ea + ea * eb)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Scalar:
        other = Scalar.coerce(other)
        if other.is_exact and other._value == 0:
            raise ZeroDivisionError("division by an exact zero")
        if self.is_exact and other.is_exact:
            return Scalar(self._value / other._value)
        a, b = float(self), float(other)
        ea, eb = self.error, other.error
        if abs(b) <= eb:
            raise ZeroDivisionError("denominator {} ± {} may vanish".format(b, eb))
        # first order bound, widened by the worst case of the denominator
        return Scalar.approx(a / b, (ea + abs(a / b) * eb) / (abs(b) - eb))

    def __abs__(self) -> Scalar:
        return Scalar(abs(self._value), self._error)

    def agrees(self, other) -> bool:
        """
        exact values agree when equal; otherwise the distance must not exceed the combined error bounds
        """
        other = Scalar.coerce(other)
        if self.is_exact and other.is_exact:
            return self._value == other._value
        return abs(float(self) - float(other)) <= self.error + other.error

    def __eq__(self, other) -> bool:
        if isinstance(other, (Scalar, int, Fraction, float)):
            return self.agrees(other)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        if self.is_exact:
            return self._value == 0
        return abs(self._value) <= self.error

    def is_positive(self) -> bool:
        """
        :return: True if the value is certainly positive
        """
        if self.is_exact:
            return self._value > 0
        return self._value - self.error > 0

    def to_dict(self) -> dict:
        if self.is_exact:
            return {"exact": format_rational(self._value)}
        return {"approx": self._value, "err": self._error}

    @classmethod
    def from_dict(cls, data: dict) -> Scalar:
        if "exact" in data:
            return cls.exact(data["exact"])
        return cls.approx(data["approx"], data["err"])

    def __str__(self):
        if self.is_exact:
            return format_rational(self._value)
        return "{!r} ± {:.1e}".format(self._value, self._error)

    def __repr__(self):
        return "Scalar({})".format(str(self))

"""Truncated multivariate Taylor arithmetic (forward-mode automatic differentiation).

A :class:`Jet` holds the Taylor coefficients of a function of ``nvars``
variables up to total degree ``order`` around a base point.  Coefficients are
stored by multi-index; each coefficient may be a float or a numpy array, so a
whole grid of base points can be pushed through one expression.

The partial derivative with multi-index ``(i, j, ...)`` equals the coefficient
times ``i! j! ...``.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def _indices(nvars, order):
    out = []
    for total in range(order + 1):
        for idx in itertools.product(range(total + 1), repeat=nvars):
            if sum(idx) == total:
                out.append(idx)
    return tuple(out)


class Jet:
    __slots__ = ("nvars", "order", "coef")

    def __init__(self, nvars, order, coef):
        self.nvars = nvars
        self.order = order
        self.coef = coef

    @classmethod
    def constant(cls, value, nvars, order):
        coef = {idx: 0.0 for idx in _indices(nvars, order)}
        coef[(0,) * nvars] = value
        return cls(nvars, order, coef)

    @classmethod
    def variable(cls, value, which, nvars, order):
        jet = cls.constant(value, nvars, order)
        if order >= 1:
            unit = tuple(1 if k == which else 0 for k in range(nvars))
            jet.coef[unit] = np.ones_like(value) if isinstance(value, np.ndarray) else 1.0
        return jet

    @property
    def value(self):
        return self.coef[(0,) * self.nvars]

    def partial(self, idx):
        """Partial derivative for the multi-index ``idx``."""
        idx = tuple(idx)
        if sum(idx) > self.order:
            raise ValueError(f"derivative {idx} exceeds jet order {self.order}")
        return self.coef[idx] * math.prod(math.factorial(i) for i in idx)

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.nvars, self.order)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.nvars, self.order, {k: v + other.coef[k] for k, v in self.coef.items()})

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, {k: -v for k, v in self.coef.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order, {k: v * other for k, v in self.coef.items()})
        out = {k: 0.0 for k in self.coef}
        for ka, va in self.coef.items():
            room = self.order - sum(ka)
            for kb, vb in other.coef.items():
                if sum(kb) <= room:
                    key = tuple(x + y for x, y in zip(ka, kb))
                    out[key] = out[key] + va * vb
        return Jet(self.nvars, self.order, out)

    __rmul__ = __mul__

    def _nilpotent(self):
        coef = dict(self.coef)
        coef[(0,) * self.nvars] = 0.0
        return Jet(self.nvars, self.order, coef)

    def reciprocal(self):
        # 1/(f0 + h) = (1/f0) * sum_n (-h/f0)^n, truncated at the jet order
        f0 = self.value
        h = self._nilpotent() * (1.0 / f0)
        term = Jet.constant(1.0, self.nvars, self.order)
        total = term
        for _ in range(self.order):
            term = term * (-h)
            total = total + term
        return total * (1.0 / f0)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def exp(self):
        base = np.exp(self.value)
        h = self._nilpotent()
        term = Jet.constant(1.0, self.nvars, self.order)
        total = term
        for n in range(1, self.order + 1):
            term = term * h * (1.0 / n)
            total = total + term
        return total * base

"""Vectorized forward-mode jets.

A jet carries the value of an expression at a batch of points together
with its derivatives with respect to the 2n real phase coordinates
(q1..qn, p1..pn).  Order 0 holds values only, order 1 adds the gradient,
order 2 the full Hessian.  Every slot is complex so the same arithmetic
serves complex-valued observables; for expressions built from real
operations on real coordinates the imaginary parts stay exactly zero.

Shapes, with m the batch size:

    val   (m,)
    grad  (2n, m)
    hess  (2n, 2n, m)

One tree walk therefore yields value, gradient and Hessian at every
point of the batch simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _outer(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # outer product over the derivative axis, batched over the rest
    return np.einsum("i...,j...->ij...", x, y)


class Jet:
    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad=None, hess=None):
        self.val = val
        self.grad = grad
        self.hess = hess

    # ---- arithmetic -------------------------------------------------

    def __add__(self, other: "Jet") -> "Jet":
        if self.grad is None:
            return Jet(self.val + other.val)
        if self.hess is None:
            return Jet(self.val + other.val, self.grad + other.grad)
        return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    def __sub__(self, other: "Jet") -> "Jet":
        if self.grad is None:
            return Jet(self.val - other.val)
        if self.hess is None:
            return Jet(self.val - other.val, self.grad - other.grad)
        return Jet(self.val - other.val, self.grad - other.grad, self.hess - other.hess)

    def __neg__(self) -> "Jet":
        if self.grad is None:
            return Jet(-self.val)
        if self.hess is None:
            return Jet(-self.val, -self.grad)
        return Jet(-self.val, -self.grad, -self.hess)

    def __mul__(self, other: "Jet") -> "Jet":
        a, b = self, other
        val = a.val * b.val
        if a.grad is None:
            return Jet(val)
        grad = a.val * b.grad + b.val * a.grad
        if a.hess is None:
            return Jet(val, grad)
        hess = (a.val * b.hess + b.val * a.hess
                + _outer(a.grad, b.grad) + _outer(b.grad, a.grad))
        return Jet(val, grad, hess)

    def __truediv__(self, other: "Jet") -> "Jet":
        a, b = self, other
        if np.any(b.val == 0):
            raise DomainError("division by zero")
        val = a.val / b.val
        if a.grad is None:
            return Jet(val)
        grad = (a.grad - val * b.grad) / b.val
        if a.hess is None:
            return Jet(val, grad)
        hess = (a.hess - _outer(grad, b.grad) - _outer(b.grad, grad)
                - val * b.hess) / b.val
        return Jet(val, grad, hess)

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k == 0:
            # x**0 is the constant 1, its derivatives vanish
            grad = None if self.grad is None else np.zeros_like(self.grad)
            hess = None if self.hess is None else np.zeros_like(self.hess)
            return Jet(np.ones_like(self.val), grad, hess)
        if k == 1:
            return self
        if k < 0 and np.any(self.val == 0):
            raise DomainError("zero raised to a negative power")
        return self._unary(
            self.val ** k,
            lambda v: k * v ** (k - 1),
            lambda v: k * (k - 1) * v ** (k - 2),
        )

    # ---- elementary functions ---------------------------------------

    def _unary(self, val, d1fn, d2fn) -> "Jet":
        if self.grad is None:
            return Jet(val)
        d1 = d1fn(self.val)
        grad = d1 * self.grad
        if self.hess is None:
            return Jet(val, grad)
        d2 = d2fn(self.val)
        hess = d1 * self.hess + d2 * _outer(self.grad, self.grad)
        return Jet(val, grad, hess)

    def sin(self) -> "Jet":
        return self._unary(np.sin(self.val), np.cos, lambda v: -np.sin(v))

    def cos(self) -> "Jet":
        return self._unary(np.cos(self.val), lambda v: -np.sin(v), lambda v: -np.cos(v))

    def exp(self) -> "Jet":
        e = np.exp(self.val)
        return self._unary(e, lambda v: e, lambda v: e)

    def log(self) -> "Jet":
        if np.any(self.val == 0):
            raise DomainError("log of zero")
        return self._unary(np.log(self.val), lambda v: 1.0 / v, lambda v: -1.0 / v ** 2)

    def conj(self) -> "Jet":
        # differentiation variables are real, so conjugation commutes
        # with every derivative slot
        if self.grad is None:
            return Jet(np.conj(self.val))
        if self.hess is None:
            return Jet(np.conj(self.val), np.conj(self.grad))
        return Jet(np.conj(self.val), np.conj(self.grad), np.conj(self.hess))


@dataclass(frozen=True)
class JetSpace:
    """Factory for jets over a batch of points with a fixed derivative order."""

    two_n: int
    m: int
    order: int

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")

    def _zeros(self) -> tuple[np.ndarray | None, np.ndarray | None]:
        grad = hess = None
        if self.order >= 1:
            grad = np.zeros((self.two_n, self.m), dtype=complex)
        if self.order >= 2:
            hess = np.zeros((self.two_n, self.two_n, self.m), dtype=complex)
        return grad, hess

    def const(self, c: complex | np.ndarray) -> Jet:
        val = np.broadcast_to(np.asarray(c, dtype=complex), (self.m,)).copy()
        grad, hess = self._zeros()
        return Jet(val, grad, hess)

    def leaf(self, values: np.ndarray, seeds: list[tuple[int, complex]]) -> Jet:
        """A coordinate-like leaf: given values and unit derivative seeds."""
        val = np.asarray(values, dtype=complex).copy()
        grad, hess = self._zeros()
        if grad is not None:
            for idx, coeff in seeds:
                grad[idx] = coeff
        return Jet(val, grad, hess)

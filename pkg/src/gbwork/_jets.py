"""Truncated Taylor arithmetic on sampled time functions.

A jet of order ``K`` is an array ``c`` of shape ``(K+1, ...)`` holding
normalized Taylor coefficients ``c[k] = f^{(k)}(t) / k!`` at each sample.
Products, exponentials and trigonometric compositions follow the usual
recurrences of automatic differentiation.
"""

from __future__ import annotations

from math import factorial

import numpy as np

_FACT = np.array([factorial(k) for k in range(32)], dtype=float)


def to_taylor(derivs):
    d = np.asarray(derivs)
    return d / _FACT[: d.shape[0]].reshape((-1,) + (1,) * (d.ndim - 1))


def to_derivs(taylor):
    c = np.asarray(taylor)
    return c * _FACT[: c.shape[0]].reshape((-1,) + (1,) * (c.ndim - 1))


def mul(a, b):
    """Cauchy product of two Taylor jets (broadcasting over trailing axes)."""
    K = min(a.shape[0], b.shape[0]) - 1
    out = np.zeros(np.broadcast_shapes(a[: K + 1].shape, b[: K + 1].shape), dtype=np.result_type(a, b))
    for k in range(K + 1):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def exp(a):
    out = np.zeros_like(a, dtype=float)
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def cos_sin(a):
    """Taylor jets of ``cos(a)`` and ``sin(a)``."""
    c = np.zeros_like(a, dtype=float)
    s = np.zeros_like(a, dtype=float)
    c[0], s[0] = np.cos(a[0]), np.sin(a[0])
    for k in range(1, a.shape[0]):
        accc = 0.0
        accs = 0.0
        for j in range(1, k + 1):
            accc = accc - j * a[j] * s[k - j]
            accs = accs + j * a[j] * c[k - j]
        c[k], s[k] = accc / k, accs / k
    return c, s


def deriv_mul(fd, gd):
    """Leibniz product of two derivative jets (not normalized)."""
    return to_derivs(mul(to_taylor(fd), to_taylor(gd)))

"""Canonical additive character, quadratic character and their Gauss sums.

The additive character is chi(a) = exp(2*pi*i*Tr(a)/p) with Tr the trace to
the prime field; this is the normalization for which the closed-form Gauss
sum values below hold.  The quadratic character eta is +1 on nonzero
squares, -1 on nonsquares, and 0 at zero by convention (it never enters a
formula at zero).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .field import Field, FieldElement

# Comparison tolerance per unit-modulus summand; sums of at most q^(d-1)
# terms in double precision stay far below this at desk scale.
SUM_TOL = 1e-9


class CharacterTable:
    """Precomputed chi and eta over a field, immutable once built."""

    def __init__(self, field: Field):
        self.field = field
        q, p = field.q, field.p
        self.chi_table = np.exp(2j * np.pi * field.trace_table / p)
        sq = field.mul_arr(np.arange(1, q), np.arange(1, q))
        eta = -np.ones(q, dtype=np.int8)
        eta[sq] = 1
        eta[0] = 0
        self.eta_table = eta
        self._g1: complex | None = None

    def chi(self, a) -> complex:
        return complex(self.chi_table[_as_idx(a)])

    def chi_arr(self, idx) -> np.ndarray:
        return self.chi_table[np.asarray(idx, dtype=np.int64)]

    def eta(self, a) -> int:
        return int(self.eta_table[_as_idx(a)])

    def eta_arr(self, idx) -> np.ndarray:
        return self.eta_table[np.asarray(idx, dtype=np.int64)]

    def gauss_sum(self, a) -> complex:
        """G_a = sum over s != 0 of eta(s) * chi(a*s), by direct summation."""
        s = np.arange(1, self.field.q, dtype=np.int64)
        prods = self.field.mul_arr(_as_idx(a), s)
        return complex((self.eta_table[s] * self.chi_table[prods]).sum())

    @property
    def g1(self) -> complex:
        if self._g1 is None:
            self._g1 = self.gauss_sum(1)
        return self._g1


def _as_idx(a) -> int:
    return a.idx if isinstance(a, FieldElement) else int(a)


def gauss_sum_closed_form(field: Field) -> complex:
    """Closed-form value of G_1 for the canonical character.

    (-1)^(l-1) * sqrt(q)         when p = 1 (mod 4)
    (-1)^(l-1) * i^l * sqrt(q)   when p = 3 (mod 4)
    """
    root = math.sqrt(field.q)
    sign = (-1) ** (field.l - 1)
    if field.p % 4 == 1:
        return complex(sign * root)
    return sign * (1j**field.l) * root


def square_sum(table: CharacterTable, a) -> complex:
    """sum over s in F_q of chi(a*s^2); equals eta(a)*G_1 for a != 0."""
    a = _as_idx(a)
    if a == 0:
        raise ValueError("a = 0 is degenerate: the sum is q and the Gauss-sum identity does not apply")
    s = np.arange(table.field.q, dtype=np.int64)
    sq = table.field.mul_arr(s, s)
    return complex(table.chi_table[table.field.mul_arr(a, sq)].sum())


class QuadraticSum(NamedTuple):
    direct: complex
    closed: complex


def quadratic_exponential_sum(table: CharacterTable, t, beta, enum_cap: int = 10**7) -> QuadraticSum:
    """sum over alpha in F_q^k of chi(t*(alpha.alpha) + beta.alpha), both ways.

    The direct value enumerates all q^k points; the closed form is
    chi((beta.beta)/(-4t)) * eta(t)^k * G_1^k.  The two agree for t != 0 in
    odd characteristic.
    """
    field = table.field
    t = _as_idx(t)
    if t == 0:
        raise ValueError("t = 0 is rejected: complete the square requires 4t invertible")
    beta = np.asarray([_as_idx(b) for b in np.atleast_1d(beta)], dtype=np.int64)
    k = beta.shape[0]
    q = field.q
    if q**k > enum_cap:
        raise ValueError(f"enumeration budget exceeded: q^k = {q**k} > {enum_cap}")

    grid = np.arange(q**k, dtype=np.int64)
    alphas = (grid[:, None] // q ** np.arange(k - 1, -1, -1, dtype=np.int64)) % q
    norms = field.dot_arr(alphas, alphas)
    lin = field.dot_arr(np.broadcast_to(beta, alphas.shape), alphas)
    phases = field.add_arr(field.mul_arr(t, norms), lin)
    direct = complex(table.chi_table[phases].sum())

    beta_norm = int(field.dot_arr(beta, beta))
    shift = field.div(beta_norm, field.neg(field.mul(field.scalar(4), t)))
    closed = table.chi(shift) * (table.eta(t) ** k) * (table.g1**k)
    return QuadraticSum(direct, closed)

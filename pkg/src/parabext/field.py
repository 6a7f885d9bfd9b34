"""Exact arithmetic in GF(p^l) for odd characteristic p.

Elements are indexed by integers 0..q-1.  Index n represents the
polynomial-basis element sum_j c_j x^j with digits c_j = (n // p^j) % p,
so numeric index order coincides with lexicographic order on the
coefficient vector read from the top degree down.  This fixed enumeration
is the canonical ordering used by every downstream table and bit-set.

The defining modulus is the first monic irreducible polynomial of degree l
in that same enumeration, which makes field construction reproducible
across runs and machines.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Fields larger than this are out of scope for desk-scale experiments.
MAX_FIELD_SIZE = 2**14


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def parse_prime_power(token: str | int) -> tuple[int, int]:
    """Parse a field description, either "p^l" or a plain prime power q."""
    if isinstance(token, str) and "^" in token:
        p_str, l_str = token.split("^", 1)
        p, l = int(p_str), int(l_str)
    else:
        q = int(token)
        if q < 3:
            raise ValueError(f"not an odd prime power: {token!r}")
        p = next((f for f in range(2, q + 1) if q % f == 0 and is_prime(f)), q)
        l = 0
        m = q
        while m % p == 0:
            m //= p
            l += 1
        if m != 1:
            raise ValueError(f"not a prime power: {token!r}")
    return p, l


# ---------------------------------------------------------------------------
# Small polynomial arithmetic over Z/p (ascending coefficient tuples).


def _trim(c: tuple[int, ...]) -> tuple[int, ...]:
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def _poly_mod(a: tuple[int, ...], f: tuple[int, ...], p: int) -> tuple[int, ...]:
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] % p
        if c:
            c = (c * inv_lead) % p
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _trim(tuple(v % p for v in a[:df] or [0]))


def _poly_mulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(tuple(out), f, p)


def _poly_powmod(a, e, f, p):
    result = (1,)
    base = _poly_mod(a, f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b != (0,):
        inv_lead = pow(b[-1], p - 2, p)
        monic_b = tuple((c * inv_lead) % p for c in b)
        a, b = b, _poly_mod(a, monic_b, p)
        a, b = _trim(a), _trim(b)
    return a


def is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Monic polynomial irreducibility over Z/p.

    A degree-l polynomial is reducible iff it has an irreducible factor of
    degree at most l/2, and gcd(x^(p^k) - x, f) detects every factor of
    degree dividing k.
    """
    f = _trim(tuple(c % p for c in coeffs))
    l = len(f) - 1
    if l < 1 or f[-1] != 1:
        return False
    if l == 1:
        return True
    xp = (0, 1)
    for _ in range(l // 2):
        xp = _poly_powmod(xp, p, f, p)
        diff = list(xp) + [0] * (2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(_trim(tuple(diff)), f, p)
        if len(g) > 1:
            return False
    return True


def canonical_modulus(p: int, l: int) -> tuple[int, ...]:
    """First monic irreducible of degree l in the canonical enumeration."""
    if l == 1:
        return (0, 1)
    for n in range(p**l):
        low = tuple((n // p**j) % p for j in range(l))
        f = low + (1,)
        if is_irreducible(f, p):
            return f
    raise RuntimeError(f"no irreducible polynomial found for p={p}, l={l}")


# ---------------------------------------------------------------------------


class Field:
    """GF(p^l) with vectorized arithmetic on element indices.

    Instances are immutable after construction; the precomputed tables are
    read-only and safe to share between concurrent workers.
    """

    def __init__(self, p: int, l: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        if p == 2:
            raise ValueError("characteristic two is not supported")
        if l < 1:
            raise ValueError(f"extension degree must be >= 1, got {l}")
        q = p**l
        if q > MAX_FIELD_SIZE:
            raise ValueError(f"field size {q} exceeds desk-scale cap {MAX_FIELD_SIZE}")
        if modulus is None:
            modulus = canonical_modulus(p, l)
        modulus = _trim(tuple(c % p for c in modulus))
        if len(modulus) != l + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {l}: {modulus}")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")

        self.p = p
        self.l = l
        self.q = q
        self.modulus = modulus
        self._pow_p = p ** np.arange(l, dtype=np.int64)

        # Reduction rows: digits of x^(l+k) mod modulus for k = 0..l-2.
        rows = []
        for k in range(l - 1):
            red = _poly_mod((0,) * (l + k) + (1,), modulus, p)
            rows.append([red[j] if j < len(red) else 0 for j in range(l)])
        self._xpow = np.array(rows, dtype=np.int64).reshape(max(l - 1, 0), l)

        self._trace_vec = self._build_trace_vec()
        self._trace_table = (self.digits(np.arange(q)) @ self._trace_vec) % p
        self._trace_rows = self._build_trace_rows()
        self._sqrt_minus_one = self._find_sqrt_minus_one()

    # -- construction helpers ------------------------------------------------

    def _build_trace_vec(self) -> np.ndarray:
        p, l, f = self.p, self.l, self.modulus
        vec = np.zeros(l, dtype=np.int64)
        for j in range(l):
            acc = [0] * l
            cur = _poly_mod((0,) * j + (1,), f, p)
            for _ in range(l):
                for i, c in enumerate(cur):
                    acc[i] = (acc[i] + c) % p
                cur = _poly_powmod(cur, p, f, p)
            if any(acc[1:]):
                raise RuntimeError("trace of basis element is not in the prime field")
            vec[j] = acc[0]
        return vec

    def _build_trace_rows(self) -> np.ndarray:
        # Row a, column j holds trace(a * x^j), so that
        # trace(a*b) = trace_rows[a] . digits(b)  (mod p).
        all_idx = np.arange(self.q, dtype=np.int64)
        cols = [self.trace_arr(self.mul_arr(all_idx, int(self._pow_p[j]))) for j in range(self.l)]
        return np.stack(cols, axis=1).astype(np.int8)

    def _find_sqrt_minus_one(self) -> int | None:
        idx = np.arange(1, self.q, dtype=np.int64)
        hits = idx[self.mul_arr(idx, idx) == self.neg(1)]
        return int(hits.min()) if hits.size else None

    # -- canonical representation --------------------------------------------

    def digits(self, a) -> np.ndarray:
        """Base-p digit vectors, digit j = coefficient of x^j."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pow_p) % self.p

    def encode(self, digits) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ self._pow_p

    # -- arithmetic on indices (scalars or ndarrays) ---------------------------

    def add_arr(self, a, b):
        if self.l == 1:
            return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p
        return self.encode((self.digits(a) + self.digits(b)) % self.p)

    def neg_arr(self, a):
        if self.l == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self.encode((self.p - self.digits(a)) % self.p)

    def sub_arr(self, a, b):
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b):
        if self.l == 1:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
        da, db = self.digits(a), self.digits(b)
        da, db = np.broadcast_arrays(da, db)
        l = self.l
        conv = np.zeros(da.shape[:-1] + (2 * l - 1,), dtype=np.int64)
        for i in range(l):
            for j in range(l):
                conv[..., i + j] += da[..., i] * db[..., j]
        red = (conv[..., :l] + conv[..., l:] @ self._xpow) % self.p
        return self.encode(red)

    def pow_arr(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a, e = self.inv_arr(a), -e
        result = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                result = self.mul_arr(result, base)
            base = self.mul_arr(base, base)
            e >>= 1
        return result

    def inv_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.pow_arr(a, self.q - 2)

    def dot_arr(self, A, B):
        """Field dot product along the last axis of element-index arrays."""
        prod = self.mul_arr(A, B)
        if self.l == 1:
            return prod.sum(axis=-1) % self.p
        return self.encode(self.digits(prod).sum(axis=-2) % self.p)

    def add(self, a: int, b: int) -> int:
        return int(self.add_arr(a, b))

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_arr(a, b))

    def neg(self, a: int) -> int:
        return int(self.neg_arr(a))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_arr(a, b))

    def inv(self, a: int) -> int:
        return int(self.inv_arr(a))

    def pow(self, a: int, e: int) -> int:
        return int(self.pow_arr(a, e))

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # -- structure maps --------------------------------------------------------

    def trace_arr(self, a):
        """Trace to the prime field: a + a^p + ... + a^(p^(l-1)), as ints mod p."""
        return (self.digits(a) @ self._trace_vec) % self.p

    def trace(self, a: int) -> int:
        return int(self._trace_table[a])

    @property
    def trace_table(self) -> np.ndarray:
        return self._trace_table

    @property
    def trace_rows(self) -> np.ndarray:
        return self._trace_rows

    def sqrt_of_minus_one(self) -> int | None:
        """First index i with i*i = -1, or None when -1 is a nonsquare."""
        return self._sqrt_minus_one

    def scalar(self, c: int) -> int:
        """Embed an integer from the prime subfield."""
        return c % self.p

    def elements(self):
        return [FieldElement(self, n) for n in range(self.q)]

    def element(self, n: int) -> FieldElement:
        return FieldElement(self, n)

    # -- identity ---------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.l, self.modulus) == (other.p, other.l, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.l, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, l={self.l}, modulus={list(self.modulus)})"


@dataclass(frozen=True)
class FieldElement:
    """A single element, wrapping its canonical index for readable code paths."""

    field: Field
    idx: int

    def __post_init__(self):
        if not 0 <= self.idx < self.field.q:
            raise ValueError(f"index {self.idx} out of range for q={self.field.q}")

    def _wrap(self, n: int) -> FieldElement:
        return FieldElement(self.field, n)

    def __add__(self, other):
        return self._wrap(self.field.add(self.idx, _idx(other, self.field)))

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.idx, _idx(other, self.field)))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.idx, _idx(other, self.field)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.idx))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.idx, e))

    def inv(self) -> FieldElement:
        return self._wrap(self.field.inv(self.idx))

    def trace(self) -> int:
        return self.field.trace(self.idx)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits(self.idx))

    def is_zero(self) -> bool:
        return self.idx == 0

    def __int__(self):
        return self.idx

    def __repr__(self):
        return f"F{self.field.q}({self.idx})"


def _idx(v, field: Field) -> int:
    if isinstance(v, FieldElement):
        if v.field != field:
            raise ValueError("field mismatch between operands")
        return v.idx
    n = int(v)
    if not 0 <= n < field.q:
        raise ValueError(f"element index {n} out of range for q={field.q}")
    return n


@lru_cache(maxsize=None)
def _cached_field(p: int, l: int) -> Field:
    return Field(p, l)


def make_field(p: int, l: int = 1) -> Field:
    """Field with the canonical (enumeration-first) irreducible modulus."""
    return _cached_field(p, l)


def field_from_string(token: str | int) -> Field:
    return make_field(*parse_prime_power(token))


def odd_prime_powers(limit: int) -> list[int]:
    """All odd prime powers q <= limit, ascending."""
    out = []
    for q in range(3, limit + 1, 2):
        try:
            parse_prime_power(q)
        except ValueError:
            continue
        out.append(q)
    return out

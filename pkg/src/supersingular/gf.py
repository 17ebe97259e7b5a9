"""Finite fields F_{p^m} as residue polynomials modulo a fixed irreducible.

Elements are encoded as integers ``0 <= a < q``: the residue polynomial
``c0 + c1 t + ... + c_{m-1} t^{m-1}`` is stored as ``c0 + c1 p + ... ``.
The integer order of these codes is the total order used everywhere a
canonical (lexicographically minimal) representative is chosen; it compares
the top coefficient first.

The modulus for each ``(p, m)`` is the monic irreducible polynomial of degree
``m`` whose coefficient code ``c0 + c1 p + ... + c_{m-1} p^{m-1}`` is minimal.
The values for small primes are frozen in ``MODULI`` so reductions are
reproducible without recomputing them; other ``(p, m)`` are derived with the
same rule.  For p = 3 and m = 2 this gives t^2 + 1, so ``t`` is a square root
of -1 in F_9.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

# (p, m) -> (c0, ..., c_{m-1}) of the monic modulus t^m + c_{m-1} t^{m-1} + ... + c0
MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 1): (0,), (3, 2): (1, 0), (3, 3): (1, 2, 0), (3, 4): (2, 1, 0, 0),
    (5, 1): (0,), (5, 2): (2, 0), (5, 3): (1, 1, 0), (5, 4): (2, 0, 0, 0),
    (7, 1): (0,), (7, 2): (1, 0), (7, 3): (2, 0, 0), (7, 4): (1, 1, 0, 0),
    (11, 1): (0,), (11, 2): (1, 0), (11, 3): (4, 1, 0),
    (13, 1): (0,), (13, 2): (2, 0), (13, 3): (2, 0, 0),
}

MAX_ORDER = 1 << 16
TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _polymulmod(a, b, mod, p):
    m = len(mod)
    res = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    for k in range(len(res) - 1, m - 1, -1):
        c = res[k]
        if c:
            res[k] = 0
            for i in range(m):
                res[k - m + i] = (res[k - m + i] - c * mod[i]) % p
    return res[:m]


def _is_irreducible(mod: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= m/2."""
    m = len(mod)
    if m == 1:
        return True
    for d in range(1, m // 2 + 1):
        for coeffs in product(range(p), repeat=d):
            g = list(coeffs) + [1]
            if _divides(g, list(mod) + [1], p):
                return False
    return True


def _divides(g, f, p):
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, x in enumerate(g):
            f[shift + i] = (f[shift + i] - c * x) % p
        f.pop()
        while f and f[-1] == 0:
            f.pop()
        if not f:
            return True
    return not any(f)


def find_modulus(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree m with minimal coefficient code."""
    for code in range(p ** m):
        coeffs = tuple((code // p ** i) % p for i in range(m))
        if m > 1 and coeffs[0] == 0:
            continue
        if _is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")


class GF:
    """The field F_{p^m}; build instances through :func:`field`."""

    def __init__(self, p: int, m: int):
        if p % 2 == 0 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if m < 1:
            raise ValueError("extension degree must be positive")
        q = p ** m
        if q > MAX_ORDER:
            raise ValueError(f"field of order {q} is larger than supported ({MAX_ORDER})")
        self.p, self.m, self.q = p, m, q
        self.modulus = MODULI.get((p, m)) or find_modulus(p, m)
        self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    # -- encoding ---------------------------------------------------------
    def coeffs(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // p ** i) % p for i in range(self.m))

    def from_coeffs(self, cs) -> int:
        cs = list(cs)
        if len(cs) > self.m:
            raise ValueError(f"residue polynomial of degree >= {self.m}")
        return sum((c % self.p) * self.p ** i for i, c in enumerate(cs))

    def from_int(self, n: int) -> int:
        return n % self.p

    def is_prime_field_element(self, a: int) -> bool:
        return a < self.p

    # -- tables -----------------------------------------------------------
    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        mod = self.modulus
        # primitive element: smallest code whose powers exhaust F^*
        elems = [self.coeffs(a) for a in range(q)]
        for g in range(2, q):
            exp = [0] * (q - 1)
            cur = [1] + [0] * (m - 1)
            seen = set()
            ok = True
            for k in range(q - 1):
                code = sum(c * p ** i for i, c in enumerate(cur))
                if code in seen:
                    ok = False
                    break
                seen.add(code)
                exp[k] = code
                cur = _polymulmod(cur, elems[g], mod, p)
            if ok:
                break
        self.primitive = g
        self.exp = exp
        log = [0] * q
        for k, a in enumerate(exp):
            log[a] = k
        self.log = log
        self.frob = [0] + [exp[(log[a] * p) % (q - 1)] for a in range(1, q)]
        self.negt = [self.from_coeffs([-c for c in self.coeffs(a)]) for a in range(q)]
        self.invt = [0] + [exp[(-log[a]) % (q - 1)] for a in range(1, q)]
        if q <= TABLE_LIMIT:
            digits = [self.coeffs(a) for a in range(q)]
            self.addt = [[self.from_coeffs([x + y for x, y in zip(digits[a], digits[b])])
                          for b in range(q)] for a in range(q)]
            self.mult = [[0] * q] + [[0] + [exp[(log[a] + log[b]) % (q - 1)] for b in range(1, q)]
                                     for a in range(1, q)]
        else:
            self.addt = None
            self.mult = None

    # -- arithmetic -------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.addt is not None:
            return self.addt[a][b]
        p = self.p
        out, k = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * k
            a //= p
            b //= p
            k *= p
        return out

    def neg(self, a: int) -> int:
        return self.negt[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.negt[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.invt[a]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def frobenius(self, a: int, times: int = 1) -> int:
        times %= self.m
        for _ in range(times):
            a = self.frob[a]
        return a

    def is_square(self, a: int) -> bool:
        return a == 0 or self.log[a] % 2 == 0

    def dot(self, u, v) -> int:
        acc = 0
        for x, y in zip(u, v):
            if x and y:
                acc = self.add(acc, self.mul(x, y))
        return acc


@lru_cache(maxsize=None)
def field(p: int, m: int = 1) -> GF:
    return GF(p, m)

"""Arithmetic for F_{p^(m*n)} with the intermediate subfield F_q, q = p^m.

Elements are plain integers in [0, p^(m*n)): the base-p digits of the index
are the coordinates over the power basis 1, alpha, alpha^2, ... where alpha
is a root of the modulus polynomial.  Index 0 is the additive identity and
index 1 the multiplicative identity.

Fields small enough for the configured table cap run on exp/log tables
(multiplication and inversion by discrete logs); larger fields fall back to
modular polynomial arithmetic.  Both modes implement the same operations and
agree elementwise.

The modulus for a given (p, m, n) is the lexicographically smallest monic
primitive polynomial of degree m*n over F_p, coefficients compared
low-degree-first, so the same parameters always produce the identical field.
"""

from __future__ import annotations

import cmath
import functools
import math

import numpy as np

DEFAULT_TABLE_CAP = 1 << 22

# add/sub lookup matrices are only built for small fields; larger fields use
# digitwise vector arithmetic instead
ADD_TABLE_CAP = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime factors of n >= 1, by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# F_p[x] helpers.  Polynomials are lists of ints in [0, p), little-endian
# (constant term first), with trailing zeros trimmed.
# ---------------------------------------------------------------------------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, modulus, p):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return _poly_modred(prod, modulus, p)


def _poly_modred(a, modulus, p):
    # modulus is monic
    d = len(modulus) - 1
    a = list(a)
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i] % p
        if c:
            a[i] = 0
            for j in range(d):
                a[i - d + j] = (a[i - d + j] - c * modulus[j]) % p
    del a[d:]
    return _poly_trim(a)


def _poly_powmod(base, e, modulus, p):
    result = [1]
    cur = _poly_modred(base, modulus, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, cur, modulus, p)
        cur = _poly_mulmod(cur, cur, modulus, p)
        e >>= 1
    return result


def _x_order_is(modulus, p, order, order_factors):
    """True iff x has multiplicative order exactly `order` mod modulus."""
    if modulus[0] == 0:
        return False
    if _poly_powmod([0, 1], order, modulus, p) != [1]:
        return False
    for r in order_factors:
        if _poly_powmod([0, 1], order // r, modulus, p) == [1]:
            return False
    return True


def find_primitive_modulus(p: int, degree: int) -> tuple[int, ...]:
    """Lexicographically smallest monic primitive polynomial of given degree.

    Coefficient tuples (c_0, ..., c_{d-1}) are compared low-degree-first;
    the returned tuple includes the leading 1.
    """
    order = p**degree - 1
    factors = prime_factors(order)
    for idx in range(p**degree):
        # decode idx with c_0 as the most significant position
        coeffs = [(idx // p ** (degree - 1 - i)) % p for i in range(degree)]
        if coeffs[0] == 0:
            continue
        modulus = coeffs + [1]
        if _x_order_is(modulus, p, order, factors):
            return tuple(modulus)
    raise ValueError(f"no primitive polynomial of degree {degree} over F_{p}")


class FieldCtx:
    """Immutable description of F_{p^(m*n)} with precomputed tables.

    Do not call directly; use new_ctx so identical parameters share one
    cached, verified instance.
    """

    def __init__(self, p: int, m: int, n: int, table_cap: int):
        self.p = p
        self.m = m
        self.n = n
        self.degree = m * n
        self.order = p**self.degree
        self.q = p**m
        self.modulus = find_primitive_modulus(p, self.degree)
        self.table_mode = self.order <= table_cap
        self.exp_table = None
        self.log_table = None
        if self.table_mode:
            self._build_tables()
        self._verify()
        self._cache = {}

    # -- construction ------------------------------------------------------

    def _build_tables(self):
        p, d, N = self.p, self.degree, self.order
        exp = np.zeros(N - 1, dtype=np.int64)
        log = np.full(N, -1, dtype=np.int64)
        digits = [0] * d
        digits[0] = 1
        mod = self.modulus
        pows = [p**i for i in range(d)]
        if d == 1:
            g = (-mod[0]) % p
            cur = 1
            for i in range(N - 1):
                exp[i] = cur
                log[cur] = i
                cur = cur * g % p
        else:
            for i in range(N - 1):
                idx = sum(c * w for c, w in zip(digits, pows))
                exp[i] = idx
                log[idx] = i
                # multiply by alpha: shift digits, reduce by the monic modulus
                top = digits[-1]
                digits = [0] + digits[:-1]
                if top:
                    for j in range(d):
                        digits[j] = (digits[j] - top * mod[j]) % p
        if np.count_nonzero(log >= 0) != N - 1:
            raise ValueError("generator does not have full multiplicative order")
        self.exp_table = exp
        self.log_table = log

    @property
    def generator(self) -> int:
        """Index of the fixed primitive element (the class of x, for degree > 1)."""
        if self.degree == 1:
            return (-self.modulus[0]) % self.p
        return self.p

    def _verify(self):
        p, d = self.p, self.degree
        # irreducibility: x^(p^d) = x and x^(p^(d/r)) != x mod modulus
        x_red = _poly_modred([0, 1], self.modulus, p)
        if _poly_powmod([0, 1], p**d, self.modulus, p) != x_red:
            raise ValueError("modulus is not irreducible")
        for r in prime_factors(d):
            if _poly_powmod([0, 1], p ** (d // r), self.modulus, p) == x_red:
                raise ValueError("modulus is not irreducible")
        if self.table_mode:
            e, l = self.exp_table, self.log_table
            if any(e[l[v]] != v for v in (1, self.generator, self.order - 1)):
                raise ValueError("exp/log tables inconsistent")

    # -- element digits ----------------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_digits(self, ds) -> int:
        idx = 0
        for c in reversed(list(ds)):
            idx = idx * self.p + c % self.p
        return idx

    def parse_element(self, text: str) -> int:
        ds = [int(t) for t in text.split(",")]
        if len(ds) > self.degree or any(not 0 <= c < self.p for c in ds):
            raise ValueError(f"bad element digits {text!r} for {self}")
        return self.from_digits(ds)

    def format_element(self, a: int) -> str:
        return ",".join(str(c) for c in self.digits(a))

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "n": self.n, "modulus": list(self.modulus)}

    # -- scalar arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p, out, w = self.p, 0, 1
        for _ in range(self.degree):
            out += (a % p + b % p) % p * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        p, out, w = self.p, 0, 1
        for _ in range(self.degree):
            out += (-a % p) * w
            a //= p
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.table_mode:
            la = int(self.log_table[a]) + int(self.log_table[b])
            return int(self.exp_table[la % (self.order - 1)])
        prod = _poly_mulmod(list(self.digits(a)), list(self.digits(b)), self.modulus, self.p)
        return self.from_digits(prod + [0] * (self.degree - len(prod)))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.table_mode:
            return int(self.exp_table[-int(self.log_table[a]) % (self.order - 1)])
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0
        e %= self.order - 1
        if self.table_mode:
            return int(self.exp_table[int(self.log_table[a]) * e % (self.order - 1)])
        poly = _poly_powmod(list(self.digits(a)), e, self.modulus, self.p)
        return self.from_digits(poly + [0] * (self.degree - len(poly)))

    def frobenius(self, a: int, e: int) -> int:
        """a^(p^e), with e reduced mod m*n."""
        return self.pow(a, self.p ** (e % self.degree))

    def rel_trace(self, a: int) -> int:
        """Trace from F_{q^n} down to F_q."""
        acc, cur = a, a
        for _ in range(self.n - 1):
            cur = self.frobenius(cur, self.m)
            acc = self.add(acc, cur)
        return acc

    def rel_norm(self, a: int) -> int:
        """Norm from F_{q^n} down to F_q."""
        acc, cur = a, a
        for _ in range(self.n - 1):
            cur = self.frobenius(cur, self.m)
            acc = self.mul(acc, cur)
        return acc

    def in_subfield(self, a: int, level: int = 1) -> bool:
        """Membership in F_{q^level}, tested as a^(q^level) = a."""
        return self.pow(a, self.q**level) == a

    def quadratic_character(self, a: int, level: int | None = None) -> int:
        """+1 for a nonzero square of F_{q^level}, -1 for a nonsquare, 0 for 0."""
        if a == 0:
            return 0
        big_q = self.q ** (self.n if level is None else level)
        v = self.pow(a, (big_q - 1) // 2)
        if v == 1:
            return 1
        if v == self.neg(1):
            return -1
        raise ValueError("element outside the requested subfield level")

    def subfield_abs_trace(self, a: int) -> int:
        """Trace from F_q to F_p of a subfield element, as an int in [0, p)."""
        acc, cur = a, a
        for _ in range(self.m - 1):
            cur = self.frobenius(cur, 1)
            acc = self.add(acc, cur)
        return acc

    def elements(self) -> range:
        return range(self.order)

    def subfield_elements(self, level: int = 1) -> list[int]:
        """Sorted elements of F_{q^level} inside this field."""
        key = ("subfield", level)
        if key not in self._cache:
            sub_order = self.q**level
            if (self.order - 1) % (sub_order - 1) != 0:
                raise ValueError(f"F_q^{level} is not a subfield of {self}")
            if self.table_mode:
                step = (self.order - 1) // (sub_order - 1)
                elems = {0} | {int(self.exp_table[t * step]) for t in range(sub_order - 1)}
            else:
                elems = {a for a in self.elements() if self.in_subfield(a, level)}
            self._cache[key] = sorted(elems)
        return self._cache[key]

    # -- vectorized arithmetic on numpy index arrays -------------------------

    def _need_tables(self):
        if not self.table_mode:
            raise ValueError(f"{self} exceeds the table cap; vector ops unavailable")

    @property
    def digit_matrix(self) -> np.ndarray:
        """(order, degree) uint8 matrix of base-p digits."""
        if "digits" not in self._cache:
            idx = np.arange(self.order, dtype=np.int64)
            cols = []
            for _ in range(self.degree):
                cols.append((idx % self.p).astype(np.uint8))
                idx //= self.p
            self._cache["digits"] = np.stack(cols, axis=1)
        return self._cache["digits"]

    @property
    def _p_powers(self) -> np.ndarray:
        if "ppow" not in self._cache:
            self._cache["ppow"] = self.p ** np.arange(self.degree, dtype=np.int64)
        return self._cache["ppow"]

    @property
    def add_matrix(self) -> np.ndarray | None:
        """Full (order, order) addition table for small fields, else None."""
        if "addmat" not in self._cache:
            if self.order > ADD_TABLE_CAP:
                self._cache["addmat"] = None
            else:
                d = self.digit_matrix.astype(np.int16)
                s = (d[:, None, :] + d[None, :, :]) % self.p
                self._cache["addmat"] = (s.astype(np.int64) @ self._p_powers).astype(
                    np.uint32
                )
        return self._cache["addmat"]

    def add_vec(self, a, b):
        tab = self.add_matrix
        if tab is not None:
            return tab[a, b].astype(np.int64)
        d = (self.digit_matrix[a].astype(np.int16) + self.digit_matrix[b]) % self.p
        return d.astype(np.int64) @ self._p_powers

    def neg_vec(self, a):
        tab = self._cache.get("negvec")
        if tab is None:
            d = (-self.digit_matrix.astype(np.int16)) % self.p
            tab = d.astype(np.int64) @ self._p_powers
            self._cache["negvec"] = tab
        return tab[a]

    def sub_vec(self, a, b):
        return self.add_vec(a, self.neg_vec(b))

    def mul_vec(self, a, b):
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_vec(self, a, e: int):
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        e %= self.order - 1
        out = self.exp_table[self.log_table[a] * e % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def inv_vec(self, a):
        self._need_tables()
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self.exp_table[(-self.log_table[a]) % (self.order - 1)]

    def frob_vec(self, a, e: int):
        return self.pow_vec(a, self.p ** (e % self.degree))

    @property
    def trace_table(self) -> np.ndarray:
        """rel_trace of every element, as an index array."""
        if "trace" not in self._cache:
            idx = np.arange(self.order, dtype=np.int64)
            acc, cur = idx, idx
            for _ in range(self.n - 1):
                cur = self.frob_vec(cur, self.m)
                acc = self.add_vec(acc, cur)
            self._cache["trace"] = acc
        return self._cache["trace"]

    @property
    def norm_table(self) -> np.ndarray:
        """rel_norm of every element, as an index array."""
        if "norm" not in self._cache:
            idx = np.arange(self.order, dtype=np.int64)
            acc, cur = idx, idx
            for _ in range(self.n - 1):
                cur = self.frob_vec(cur, self.m)
                acc = self.mul_vec(acc, cur)
            self._cache["norm"] = acc
        return self._cache["norm"]

    @property
    def square_table(self) -> np.ndarray:
        if "square" not in self._cache:
            self._cache["square"] = self.mul_vec(
                np.arange(self.order), np.arange(self.order)
            )
        return self._cache["square"]

    @property
    def subfield_eta_table(self) -> np.ndarray:
        """Quadratic character of F_q; valid only at subfield element indices."""
        if "eta_sub" not in self._cache:
            out = np.zeros(self.order, dtype=np.int8)
            for a in self.subfield_elements():
                if a:
                    out[a] = self.quadratic_character(a, level=1)
            self._cache["eta_sub"] = out
        return self._cache["eta_sub"]

    # -- misc ----------------------------------------------------------------

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, n={self.n})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.m, self.n) == (other.p, other.m, other.n)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.n))


@functools.lru_cache(maxsize=None)
def _ctx_cached(p: int, m: int, n: int, table_cap: int) -> FieldCtx:
    return FieldCtx(p, m, n, table_cap)


def new_ctx(p: int, m: int, n: int, table_cap: int | None = None) -> FieldCtx:
    """Deterministic context for F_{p^(m*n)} with subfield F_{p^m}."""
    if p % 2 == 0:
        raise ValueError("characteristic must be odd")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1 or n < 1:
        raise ValueError("subfield exponent and tower degree must be >= 1")
    if p ** (m * n) > 1 << 62:
        raise ValueError("field size overflows the element index range")
    cap = DEFAULT_TABLE_CAP if table_cap is None else table_cap
    return _ctx_cached(p, m, n, cap)


def ctx_from_json(obj: dict, table_cap: int | None = None) -> FieldCtx:
    ctx = new_ctx(int(obj["p"]), int(obj["m"]), int(obj["n"]), table_cap)
    if "modulus" in obj and tuple(obj["modulus"]) != ctx.modulus:
        raise ValueError("modulus in serialized ctx is not the canonical one")
    return ctx


# ---------------------------------------------------------------------------
# Characters of the subfield F_q.
# ---------------------------------------------------------------------------

class AdditiveChar:
    """chi_t on F_q: x -> exp(2*pi*i * Tr_{F_q/F_p}(t x) / p), for t in F_q.

    For q = p the selector t ranges over the prime field and the map reduces
    to exp(2*pi*i * t * x / p); general t completes the dual group of (F_q, +).
    """

    def __init__(self, ctx: FieldCtx, t: int):
        if not 0 <= t < ctx.order or not ctx.in_subfield(t):
            raise ValueError("additive character selector must lie in F_q")
        self.ctx = ctx
        self.t = t

    @property
    def trivial(self) -> bool:
        return self.t == 0

    def __call__(self, a: int) -> complex:
        tr = self.ctx.subfield_abs_trace(self.ctx.mul(self.t, a))
        return cmath.exp(2j * math.pi * tr / self.ctx.p)

    def values(self, a) -> np.ndarray:
        """Vectorized evaluation over an array of subfield element indices."""
        ctx = self.ctx
        key = "subtrace"
        if key not in ctx._cache:
            idx = np.arange(ctx.order, dtype=np.int64)
            acc, cur = idx, idx
            for _ in range(ctx.m - 1):
                cur = ctx.frob_vec(cur, 1)
                acc = ctx.add_vec(acc, cur)
            ctx._cache[key] = acc
        tr = ctx._cache[key][ctx.mul_vec(self.t, np.asarray(a, dtype=np.int64))]
        return np.exp(2j * np.pi * tr / ctx.p)


class MultiplicativeChar:
    """psi_j on F_q^*: g^s -> exp(2*pi*i * j * s / (q-1)), with psi_j(0) = 0."""

    def __init__(self, ctx: FieldCtx, j: int):
        if not 0 <= j < ctx.q - 1:
            raise ValueError("multiplicative character index out of range")
        ctx._need_tables()
        self.ctx = ctx
        self.j = j
        self._step = (ctx.order - 1) // (ctx.q - 1)

    @property
    def trivial(self) -> bool:
        return self.j == 0

    def _sublog(self, a: int) -> int:
        l = int(self.ctx.log_table[a])
        s, r = divmod(l, self._step)
        if r:
            raise ValueError("element is not in the subfield F_q")
        return s

    def __call__(self, a: int) -> complex:
        if a == 0:
            return 0j
        return cmath.exp(2j * math.pi * self.j * self._sublog(a) / (self.ctx.q - 1))

    def values(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        s = self.ctx.log_table[a] // self._step
        out = np.exp(2j * np.pi * self.j * s / (self.ctx.q - 1))
        return np.where(a == 0, 0j, out)


def additive_chars(ctx: FieldCtx) -> list[AdditiveChar]:
    return [AdditiveChar(ctx, t) for t in ctx.subfield_elements()]


def multiplicative_chars(ctx: FieldCtx) -> list[MultiplicativeChar]:
    return [MultiplicativeChar(ctx, j) for j in range(ctx.q - 1)]

"""Linearized (p-polynomial) maps on F_{p^(m*n)} and their subspaces.

A linearized polynomial sum_t c_t x^(p^t) induces an F_p-linear endomorphism
of the field.  Functional coefficient vectors have length exactly m*n (reduced
mod x^(p^(m*n)) - x); "formal" coefficient tuples keep the unreduced degree so
identities between polynomials of degree p^(m*n) can be checked exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .field import FieldCtx


# ---------------------------------------------------------------------------
# Dense linear algebra over F_p.
# ---------------------------------------------------------------------------

def fp_rref(rows: np.ndarray, p: int):
    """Reduced row echelon form mod p; returns (matrix, pivot column list)."""
    mat = np.array(rows, dtype=np.int64) % p
    nrows, ncols = mat.shape
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if mat[i, c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        mat[r] = mat[r] * pow(int(mat[r, c]), p - 2, p) % p
        for i in range(nrows):
            if i != r and mat[i, c]:
                mat[i] = (mat[i] - mat[i, c] * mat[r]) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def fp_rank(rows: np.ndarray, p: int) -> int:
    return len(fp_rref(rows, p)[1])


def fp_nullspace(mat: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {v : mat @ v = 0 mod p}, one vector per free column."""
    red, pivots = fp_rref(mat, p)
    ncols = mat.shape[1]
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for r_i, c in enumerate(pivots):
            v[c] = (-red[r_i, f]) % p
        basis.append(v)
    return basis


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional F_p space."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# Subspaces of the field over F_p.
# ---------------------------------------------------------------------------

class Subspace:
    """F_p-subspace of the field, held as a canonical RREF basis."""

    def __init__(self, ctx: FieldCtx, basis: tuple[int, ...]):
        self.ctx = ctx
        self.basis = basis

    @classmethod
    def from_vectors(cls, ctx: FieldCtx, elems) -> "Subspace":
        rows = np.array([ctx.digits(e) for e in elems], dtype=np.int64)
        if len(rows) == 0:
            return cls(ctx, ())
        red, pivots = fp_rref(rows, ctx.p)
        basis = tuple(ctx.from_digits(red[i]) for i in range(len(pivots)))
        return cls(ctx, basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, e: int) -> bool:
        rows = [self.ctx.digits(b) for b in self.basis]
        rank0 = len(rows)
        rows.append(self.ctx.digits(e))
        return fp_rank(np.array(rows, dtype=np.int64), self.ctx.p) == rank0

    def elements(self) -> tuple[int, ...]:
        """All p^dim member elements; one field addition per element visited."""
        if not hasattr(self, "_elems"):
            ctx = self.ctx
            cur = [0]
            for b in self.basis:
                block = list(cur)
                for lam in range(1, ctx.p):
                    shift = ctx.mul(lam, b)
                    block.extend(ctx.add(e, shift) for e in cur)
                cur = block
            self._elems = tuple(cur)
        return self._elems

    def elements_array(self) -> np.ndarray:
        return np.array(self.elements(), dtype=np.int64)

    def intersection_dim(self, other: "Subspace") -> int:
        joint = list(self.basis) + list(other.basis)
        if not joint:
            return 0
        rows = np.array([self.ctx.digits(e) for e in joint], dtype=np.int64)
        return self.dim + other.dim - fp_rank(rows, self.ctx.p)

    def to_json(self) -> dict:
        return {"basis": [self.ctx.format_element(b) for b in self.basis]}

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj: dict) -> "Subspace":
        return cls.from_vectors(ctx, [ctx.parse_element(t) for t in obj["basis"]])

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ctx == other.ctx
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ctx, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={self.basis})"


def all_subspaces(ctx: FieldCtx, dim: int | None = None):
    """Yield every F_p-subspace (via direct RREF enumeration), by dimension."""
    d = ctx.degree
    dims = range(d + 1) if dim is None else [dim]
    for k in dims:
        if k == 0:
            yield Subspace(ctx, ())
            continue
        for pivots in itertools.combinations(range(d), k):
            free_pos = [
                (r, c)
                for r in range(k)
                for c in range(pivots[r] + 1, d)
                if c not in pivots
            ]
            for vals in itertools.product(range(ctx.p), repeat=len(free_pos)):
                mat = np.zeros((k, d), dtype=np.int64)
                for r in range(k):
                    mat[r, pivots[r]] = 1
                for (r, c), v in zip(free_pos, vals):
                    mat[r, c] = v
                yield Subspace(ctx, tuple(ctx.from_digits(row) for row in mat))


# ---------------------------------------------------------------------------
# Linearized polynomials.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizedPoly:
    """sum_t coeffs[t] * x^(p^t) with exactly m*n coefficient slots."""

    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.degree:
            raise ValueError("coefficient vector must have length m*n")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx) -> "LinearizedPoly":
        return cls(ctx, (0,) * ctx.degree)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "LinearizedPoly":
        return cls(ctx, (1,) + (0,) * (ctx.degree - 1))

    @classmethod
    def monomial(cls, ctx: FieldCtx, coeff: int, t: int) -> "LinearizedPoly":
        c = [0] * ctx.degree
        c[t % ctx.degree] = coeff
        return cls(ctx, tuple(c))

    @classmethod
    def from_formal(cls, ctx: FieldCtx, raw) -> "LinearizedPoly":
        """Reduce a formal coefficient tuple mod x^(p^(m*n)) - x."""
        c = [0] * ctx.degree
        for t, v in enumerate(raw):
            s = t % ctx.degree
            c[s] = ctx.add(c[s], v)
        return cls(ctx, tuple(c))

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj: dict) -> "LinearizedPoly":
        c = [0] * ctx.degree
        for t, digits in obj["coeffs"].items():
            c[int(t)] = ctx.parse_element(digits)
        return cls(ctx, tuple(c))

    def to_json(self) -> dict:
        return {
            "coeffs": {
                str(t): self.ctx.format_element(v)
                for t, v in enumerate(self.coeffs)
                if v
            }
        }

    # -- evaluation and algebra --------------------------------------------

    def __call__(self, x: int) -> int:
        ctx = self.ctx
        acc = 0
        for t, c in enumerate(self.coeffs):
            if c:
                acc = ctx.add(acc, ctx.mul(c, ctx.frobenius(x, t)))
        return acc

    def eval_vec(self, xs: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        acc = np.zeros(len(xs), dtype=np.int64)
        for t, c in enumerate(self.coeffs):
            if c:
                acc = ctx.add_vec(acc, ctx.mul_vec(c, ctx.frob_vec(xs, t)))
        return acc

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def compose(self, other: "LinearizedPoly") -> "LinearizedPoly":
        """Symbolic composition self(other(x)), reduced mod x^(p^(m*n)) - x."""
        ctx = self.ctx
        if other.ctx != ctx:
            raise ValueError("composition requires a shared field context")
        d = ctx.degree
        out = [0] * d
        for t, ct in enumerate(self.coeffs):
            if not ct:
                continue
            for s, cs in enumerate(other.coeffs):
                if not cs:
                    continue
                k = (t + s) % d
                out[k] = ctx.add(out[k], ctx.mul(ct, ctx.frobenius(cs, t)))
        return LinearizedPoly(ctx, tuple(out))

    def scale(self, c: int) -> "LinearizedPoly":
        return LinearizedPoly(
            self.ctx, tuple(self.ctx.mul(c, v) for v in self.coeffs)
        )

    def __add__(self, other: "LinearizedPoly") -> "LinearizedPoly":
        return LinearizedPoly(
            self.ctx,
            tuple(self.ctx.add(a, b) for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __sub__(self, other: "LinearizedPoly") -> "LinearizedPoly":
        return LinearizedPoly(
            self.ctx,
            tuple(self.ctx.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self) -> "LinearizedPoly":
        return LinearizedPoly(self.ctx, tuple(self.ctx.neg(v) for v in self.coeffs))

    # -- linear-map structure ------------------------------------------------

    def as_matrix(self) -> np.ndarray:
        """Matrix over F_p acting on digit vectors, columns indexed by alpha^j."""
        ctx = self.ctx
        d = ctx.degree
        cols = [ctx.digits(self(ctx.p**j)) for j in range(d)]
        return np.array(cols, dtype=np.int64).T

    def kernel(self) -> Subspace:
        vecs = fp_nullspace(self.as_matrix(), self.ctx.p)
        return Subspace.from_vectors(
            self.ctx, [self.ctx.from_digits(v) for v in vecs]
        )

    def image(self) -> Subspace:
        ctx = self.ctx
        return Subspace.from_vectors(
            ctx, [self(ctx.p**j) for j in range(ctx.degree)]
        )

    def is_permutation(self) -> bool:
        return fp_rank(self.as_matrix(), self.ctx.p) == self.ctx.degree


# ---------------------------------------------------------------------------
# Formal coefficient vectors (degree tracked, no wraparound).
# ---------------------------------------------------------------------------

def eval_formal(ctx: FieldCtx, raw, x: int) -> int:
    acc = 0
    for t, c in enumerate(raw):
        if c:
            acc = ctx.add(acc, ctx.mul(c, ctx.pow(x, ctx.p**t)))
    return acc


def compose_formal(ctx: FieldCtx, f_raw, g_raw) -> tuple[int, ...]:
    """Formal coefficients of f(g(x)); index t holds the x^(p^t) coefficient."""
    out = [0] * (len(f_raw) + len(g_raw) - 1)
    for t, ct in enumerate(f_raw):
        if not ct:
            continue
        for s, cs in enumerate(g_raw):
            if not cs:
                continue
            out[t + s] = ctx.add(out[t + s], ctx.mul(ct, ctx.pow(cs, ctx.p**t)))
    return tuple(out)


def full_field_annihilator(ctx: FieldCtx) -> tuple[int, ...]:
    """Formal coefficients of x^(p^(m*n)) - x."""
    raw = [0] * (ctx.degree + 1)
    raw[0] = ctx.neg(1)
    raw[ctx.degree] = 1
    return tuple(raw)


def annihilator_coeffs(sub: Subspace) -> tuple[int, ...]:
    """Formal coefficients of the monic linearized polynomial vanishing on sub.

    Built incrementally: adjoining xi maps g to g(x)^p - g(xi)^(p-1) * g(x).
    """
    ctx = sub.ctx
    raw = [1]
    for xi in sub.basis:
        val = eval_formal(ctx, raw, xi)
        if val == 0:
            raise ValueError("subspace basis is not independent")
        factor = ctx.pow(val, ctx.p - 1)
        new = [0] * (len(raw) + 1)
        for t, c in enumerate(raw):
            new[t + 1] = ctx.pow(c, ctx.p)
            new[t] = ctx.sub(new[t], ctx.mul(factor, c))
        raw = new
    return tuple(raw)


def annihilator_poly(sub: Subspace) -> LinearizedPoly:
    """Functional form of the subspace's vanishing polynomial."""
    return LinearizedPoly.from_formal(sub.ctx, annihilator_coeffs(sub))


def image_poly_coeffs(sub: Subspace) -> tuple[int, ...]:
    """Formal coefficients of the monic g of degree p^(m*n - dim) whose image
    is the given subspace.

    g is derived from h = annihilator of the subspace by solving the formal
    identity h(g(x)) = x^(p^(m*n)) - x top-down; each unknown is an exact
    p^k-th root, extracted by the inverse Frobenius power x^(p^(m*n-k)).
    """
    ctx = sub.ctx
    d, k = ctx.degree, sub.dim
    h = annihilator_coeffs(sub)
    target = full_field_annihilator(ctx)
    g = [0] * (d - k + 1)
    g[d - k] = 1
    for s in range(d - k - 1, -1, -1):
        i = k + s
        acc = target[i]
        for j in range(k):
            s2 = i - j
            if s2 <= d - k and g[s2]:
                acc = ctx.sub(acc, ctx.mul(h[j], ctx.pow(g[s2], ctx.p**j)))
        g[s] = ctx.pow(acc, ctx.p ** (d - k)) if acc else 0
    # remaining equations must close; a failure would contradict the
    # subspace/image correspondence
    if compose_formal(ctx, h, tuple(g)) != target:
        raise RuntimeError("image polynomial recursion is inconsistent")
    return tuple(g)


def image_poly_for_subspace(sub: Subspace) -> LinearizedPoly:
    """Functional linearized polynomial whose image equals the subspace."""
    return LinearizedPoly.from_formal(sub.ctx, image_poly_coeffs(sub))

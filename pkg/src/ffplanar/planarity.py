"""Planarity tests for f(x) = Tr(a x^(q+1)) + ell(x^2), cross-validated.

Three independent routes decide whether every difference x -> f(x+c) - f(x)
permutes the field:

* bruteforce - evaluates every difference map and checks bijectivity with a
  hit count, for any function given as a value table;
* rank       - uses that the difference maps of this shape are linear in x up
  to a constant, and tests an F_p matrix for full rank per direction;
* reduction  - substitutes x = u/v and scans the equivalent two-variable
  nonvanishing condition, skipping u whose ell-value lies outside F_q.

A quadratic-extension criterion (n = 2) decides planarity from the values
ell(u)^2 - N(u) on the subspace where ell lands in F_q.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_BRUTE_CAP
from .field import FieldCtx
from .linpoly import LinearizedPoly, Subspace, fp_nullspace

BLOCK = 64


@dataclass(frozen=True)
class PlanarCandidate:
    """f(x) = Tr(a x^(q+1)) + ell(x^2); a = 0 is admitted as a degenerate case."""

    ctx: FieldCtx
    a: int
    ell: LinearizedPoly

    def __post_init__(self):
        if self.ell.ctx != self.ctx:
            raise ValueError("candidate parts use different field contexts")
        if not 0 <= self.a < self.ctx.order:
            raise ValueError("coefficient index out of range")

    def __call__(self, x: int) -> int:
        ctx = self.ctx
        t = ctx.rel_trace(ctx.mul(self.a, ctx.pow(x, ctx.q + 1)))
        return ctx.add(t, self.ell(ctx.mul(x, x)))

    def f_table(self) -> np.ndarray:
        ctx = self.ctx
        xs = np.arange(ctx.order, dtype=np.int64)
        t = ctx.trace_table[ctx.mul_vec(self.a, ctx.pow_vec(xs, ctx.q + 1))]
        return ctx.add_vec(t, self.ell.eval_vec(ctx.square_table))

    def substituted(self, lam: int) -> "PlanarCandidate":
        """Candidate for x -> f(lam * x); planarity is preserved for lam != 0."""
        ctx = self.ctx
        a2 = ctx.mul(self.a, ctx.pow(lam, ctx.q + 1))
        ell2 = self.ell.compose(LinearizedPoly.monomial(ctx, ctx.mul(lam, lam), 0))
        return PlanarCandidate(ctx, a2, ell2)

    def scaled(self, c: int) -> "PlanarCandidate":
        """Candidate for c * f with c in F_q^*; planarity is preserved."""
        ctx = self.ctx
        if not ctx.in_subfield(c) or c == 0:
            raise ValueError("scale factor must lie in F_q^*")
        return PlanarCandidate(ctx, ctx.mul(c, self.a), self.ell.scale(c))

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "a": self.ctx.format_element(self.a),
            "ell": self.ell.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict, table_cap: int | None = None) -> "PlanarCandidate":
        from .field import ctx_from_json

        ctx = ctx_from_json(obj["ctx"], table_cap)
        return cls(
            ctx,
            ctx.parse_element(obj["a"]),
            LinearizedPoly.from_json(ctx, obj["ell"]),
        )


@dataclass(frozen=True)
class VerificationReport:
    planar: bool
    method: str
    witness: tuple[int, int, int] | None
    ms: float

    def __post_init__(self):
        if not self.planar and self.witness is None:
            raise ValueError("a non-planar report needs a witness")
        if self.planar and self.witness is not None:
            raise ValueError("a planar report must not carry a witness")

    def to_json(self, ctx: FieldCtx) -> dict:
        wit = None
        if self.witness is not None:
            c, x1, x2 = self.witness
            wit = {
                "c": ctx.format_element(c),
                "x1": ctx.format_element(x1),
                "x2": ctx.format_element(x2),
            }
        return {"planar": self.planar, "method": self.method, "witness": wit,
                "ms": self.ms}

    @classmethod
    def from_json(cls, ctx: FieldCtx, obj: dict) -> "VerificationReport":
        wit = obj.get("witness")
        if wit is not None:
            wit = tuple(ctx.parse_element(wit[k]) for k in ("c", "x1", "x2"))
        return cls(bool(obj["planar"]), obj["method"], wit, float(obj["ms"]))


def check_witness(f, ctx: FieldCtx, witness) -> bool:
    """True iff f(x1+c) - f(x1) = f(x2+c) - f(x2) with x1 != x2, c != 0."""
    c, x1, x2 = witness
    if c == 0 or x1 == x2:
        return False
    d1 = ctx.sub(f(ctx.add(x1, c)), f(x1))
    d2 = ctx.sub(f(ctx.add(x2, c)), f(x2))
    return d1 == d2


# ---------------------------------------------------------------------------
# Brute force on value tables.
# ---------------------------------------------------------------------------

def _first_collision(ctx: FieldCtx, f_tab: np.ndarray, c: int):
    """Lowest x2 such that some x1 < x2 collides in the c-difference map."""
    seen = {}
    for x in range(ctx.order):
        d = int(ctx.sub(int(f_tab[ctx.add(x, c)]), int(f_tab[x])))
        if d in seen:
            return (c, seen[d], x)
        seen[d] = x
    return None


def _block_widths(n: int):
    """Ascending scan widths: small leading blocks catch early witnesses in
    non-planar candidates without slowing down full scans much."""
    lo = 1
    for width in (16, 48, 64, 128):
        if lo >= n:
            return
        yield lo, min(lo + width, n)
        lo += width
    while lo < n:
        yield lo, min(lo + 256, n)
        lo += 256


def _table_planarity(ctx: FieldCtx, f_tab: np.ndarray, method: str,
                     started: float) -> VerificationReport:
    n = ctx.order
    add = ctx.add_matrix
    xs = np.arange(n, dtype=np.int64) if add is None else None
    neg_f = ctx.neg_vec(f_tab)
    for lo, hi in _block_widths(n):
        if add is not None:
            # diffs[c, x] = f(x + c) - f(x); add[lo:hi] is a view, so the
            # block needs only two table gathers
            diffs = add[f_tab[add[lo:hi]], neg_f]
        else:
            cs = np.arange(lo, hi, dtype=np.int64)
            diffs = ctx.add_vec(f_tab[ctx.add_vec(cs[:, None], xs[None, :])],
                                neg_f[None, :])
        width = hi - lo
        flat = diffs + (np.arange(width) * n)[:, None]
        counts = np.bincount(flat.ravel(), minlength=width * n)
        bad = np.nonzero(counts.reshape(width, n).max(axis=1) > 1)[0]
        if len(bad):
            c = lo + int(bad[0])
            witness = _first_collision(ctx, f_tab, c)
            ms = (time.perf_counter() - started) * 1e3
            return VerificationReport(False, method, witness, ms)
    ms = (time.perf_counter() - started) * 1e3
    return VerificationReport(True, method, None, ms)


def is_planar_bruteforce(cand: PlanarCandidate,
                         brute_cap: int = DEFAULT_BRUTE_CAP) -> VerificationReport:
    """Exact verdict: checks bijectivity of every difference map by hit counts."""
    started = time.perf_counter()
    ctx = cand.ctx
    if ctx.order > brute_cap:
        raise ValueError(f"field order {ctx.order} exceeds brute-force cap {brute_cap}")
    report = _table_planarity(ctx, cand.f_table(), "bruteforce", started)
    if report.witness is not None:
        assert check_witness(cand, ctx, report.witness)
    return report


def eval_general(ctx: FieldCtx, monomials, x: int) -> int:
    """Evaluate sum coeff * x^exp for a list of (coeff, exp) pairs."""
    acc = 0
    for coeff, e in monomials:
        acc = ctx.add(acc, ctx.mul(coeff, ctx.pow(x, e)))
    return acc


def general_table(ctx: FieldCtx, monomials) -> np.ndarray:
    xs = np.arange(ctx.order, dtype=np.int64)
    acc = np.zeros(ctx.order, dtype=np.int64)
    for coeff, e in monomials:
        if e == 0:
            term = np.full(ctx.order, coeff, dtype=np.int64)
        else:
            term = ctx.mul_vec(coeff, ctx.pow_vec(xs, e))
        acc = ctx.add_vec(acc, term)
    return acc


def is_planar_bruteforce_general(ctx: FieldCtx, monomials,
                                 brute_cap: int = DEFAULT_BRUTE_CAP) -> VerificationReport:
    """Brute-force planarity for an arbitrary polynomial given as monomials."""
    started = time.perf_counter()
    if ctx.order > brute_cap:
        raise ValueError(f"field order {ctx.order} exceeds brute-force cap {brute_cap}")
    report = _table_planarity(ctx, general_table(ctx, monomials), "bruteforce", started)
    if report.witness is not None:
        assert check_witness(lambda x: eval_general(ctx, monomials, x), ctx,
                             report.witness)
    return report


# ---------------------------------------------------------------------------
# Rank test on the linear part of the difference maps.
# ---------------------------------------------------------------------------

def _difference_matrix(cand: PlanarCandidate, two_ell: LinearizedPoly,
                       v: int) -> np.ndarray:
    """F_p matrix of x -> Tr(a v x^q + a v^q x) + 2 ell(v x)."""
    ctx = cand.ctx
    av = ctx.mul(cand.a, v)
    avq = ctx.mul(cand.a, ctx.frobenius(v, ctx.m))
    cols = []
    for j in range(ctx.degree):
        x = ctx.p**j
        t = ctx.rel_trace(
            ctx.add(ctx.mul(av, ctx.frobenius(x, ctx.m)), ctx.mul(avq, x))
        )
        cols.append(ctx.digits(ctx.add(t, two_ell(ctx.mul(v, x)))))
    return np.array(cols, dtype=np.int64).T


def is_planar_rank(cand: PlanarCandidate) -> VerificationReport:
    """Planar iff the linear part of every difference map has full rank."""
    started = time.perf_counter()
    ctx = cand.ctx
    two_ell = cand.ell.scale(2)
    for v in range(1, ctx.order):
        mat = _difference_matrix(cand, two_ell, v)
        null = fp_nullspace(mat, ctx.p)
        if null:
            x0 = ctx.from_digits(null[0])
            ms = (time.perf_counter() - started) * 1e3
            report = VerificationReport(False, "rank", (v, x0, 0), ms)
            assert check_witness(cand, ctx, report.witness)
            return report
    ms = (time.perf_counter() - started) * 1e3
    return VerificationReport(True, "rank", None, ms)


# ---------------------------------------------------------------------------
# Two-variable reduction.
# ---------------------------------------------------------------------------

def is_planar_reduction(cand: PlanarCandidate,
                        brute_cap: int = DEFAULT_BRUTE_CAP) -> VerificationReport:
    """Scans Tr(a u^q v^(1-q) + a u v^(q-1)) + 2 ell(u) != 0 over u, v != 0.

    Only u with ell(u) in F_q can produce a zero, so other u are skipped.
    """
    started = time.perf_counter()
    ctx = cand.ctx
    if ctx.order > brute_cap:
        raise ValueError(f"field order {ctx.order} exceeds brute-force cap {brute_cap}")
    n = ctx.order
    vs = np.arange(1, n, dtype=np.int64)
    v_pow_up = ctx.pow_vec(vs, ctx.q - 1)       # v^(q-1)
    v_pow_dn = ctx.inv_vec(v_pow_up)            # v^(1-q)
    tr = ctx.trace_table
    for u in range(1, n):
        lu = cand.ell(u)
        if ctx.pow(lu, ctx.q) != lu:
            continue
        target = ctx.neg(ctx.mul(2, lu))
        auq = ctx.mul(cand.a, ctx.frobenius(u, ctx.m))
        au = ctx.mul(cand.a, u)
        vals = tr[ctx.add_vec(ctx.mul_vec(auq, v_pow_dn), ctx.mul_vec(au, v_pow_up))]
        hits = np.nonzero(vals == target)[0]
        if len(hits):
            v = int(vs[hits[0]])
            witness = (v, ctx.mul(u, ctx.inv(v)), 0)
            ms = (time.perf_counter() - started) * 1e3
            report = VerificationReport(False, "reduction", witness, ms)
            assert check_witness(cand, ctx, report.witness)
            return report
    ms = (time.perf_counter() - started) * 1e3
    return VerificationReport(True, "reduction", None, ms)


# ---------------------------------------------------------------------------
# Closed criterion on quadratic extensions.
# ---------------------------------------------------------------------------

def fq_value_subspace(ell: LinearizedPoly) -> Subspace:
    """The subspace {u : ell(u) in F_q}, as the kernel of u -> ell(u)^q - ell(u)."""
    ctx = ell.ctx
    return Subspace.from_vectors(ctx, _fq_value_elements(ell))


def _fq_value_elements(ell: LinearizedPoly) -> list[int]:
    """Members of {u : ell(u) in F_q} by a small dense kernel computation,
    kept in plain Python for per-candidate sweep speed."""
    ctx = ell.ctx
    d, p = ctx.degree, ctx.p
    rows = [[0] * d for _ in range(d)]
    for j in range(d):
        y = ell(p**j)
        z = ctx.sub(ctx.frobenius(y, ctx.m), y)
        for i, digit in enumerate(ctx.digits(z)):
            rows[i][j] = digit
    pivots = []
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, d) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(d):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    elems = [0]
    for fcol in range(d):
        if fcol in pivots:
            continue
        vec = [0] * d
        vec[fcol] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = -rows[ri][fcol] % p
        b = ctx.from_digits(vec)
        block = list(elems)
        for lam in range(1, p):
            shift = ctx.mul(lam, b)
            block.extend(ctx.add(e, shift) for e in elems)
        elems = block
    return elems


def criterion_quadratic(cand: PlanarCandidate) -> bool:
    """Planarity criterion for n = 2: after normalizing f to x^(q+1) + ell(x^2),
    every nonzero u with ell(u) in F_q must make ell(u)^2 - N(u) a nonzero
    square in F_q."""
    ctx = cand.ctx
    if ctx.n != 2:
        raise ValueError("the quadratic criterion requires a degree-2 tower")
    tr_a = ctx.rel_trace(cand.a)
    if tr_a == 0:
        raise ValueError("criterion requires Tr(a) != 0; use a permutation check")
    ell = cand.ell.scale(ctx.inv(tr_a))
    us = np.array(_fq_value_elements(ell), dtype=np.int64)
    lu = ell.eval_vec(us)
    w = ctx.sub_vec(ctx.mul_vec(lu, lu), ctx.norm_table[us])
    eta = ctx.subfield_eta_table[w]
    return bool(np.all(eta[us != 0] == 1))

"""Uniform measures on Q_p as truncated S-series in Tt = T̃.

An element is a finite sum Σ a_q · Tt^q with exponents q in the grid
(1/p^depth)·Z_{>=0}, known modulo the box (p^(shift+prec), exponents >= degree).
Exponents are stored as integer keys k with q = k / p^depth.  A degree of
None means the element has exact finite support (all other coefficients
are 0 mod p^(shift+prec)); the optional element-wide ``shift`` factors a
power of p out of all coefficients, which lets constructions with
non-integral coefficients stay in one representation.

The Dirac character at s in p^(-m) Z_p is realized at working depth m as

    Delta_s = (1 + Tt^(1/p^m))^(s p^m) = Σ_i C(s p^m, i) · Tt^(i/p^m),

which is multiplicative in s at fixed depth and converges to the measure-
theoretic point mass as the depth grows.  With T_n = Delta_(1/p^n) - 1
realized at depth m >= n, the stage-s approximant T_(n+s)^(p^s) converges
to the basis monomial Tt^(1/p^n) as s grows, and reduces to t^(1/p^n)
mod p at every stage.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (
    BoxExhausted,
    PrecisionExhausted,
    PreconditionError,
    PrimeMismatch,
)
from .padic import (
    LowerBound,
    PadicScalar,
    SExponent,
    binomial_row_tracked,
    is_prime,
    vp_factorial,
    vp_int,
)

__all__ = [
    "AinfElt",
    "dirac_q",
    "t_tilde_approx",
    "rescale_pushforward",
    "reduce_mod_p",
    "w_valuation_S",
]

_INF = math.inf


def _degree_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class AinfElt:
    """A uniform measure on Q_p as a truncated S-series."""

    __slots__ = ("p", "prec", "depth", "degree", "shift", "coeffs")

    def __init__(self, p, prec, depth, degree, coeffs, shift=0):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if prec < 1 or depth < 0:
            raise PreconditionError("box needs prec >= 1 and depth >= 0")
        degree = None if degree is None else Fraction(degree)
        if degree is not None and degree <= 0:
            raise PreconditionError("degree bound must be positive")
        mod = p**prec
        keybound = None if degree is None else degree * p**depth
        cs = {}
        for k, c in coeffs.items():
            if k < 0:
                raise PreconditionError("S-series exponents are nonnegative")
            if keybound is not None and k >= keybound:
                continue  # outside the box: forgotten, not an error
            c %= mod
            if c:
                cs[k] = c
        # canonical depth: all keys in lowest terms
        while depth > 0 and all(k % p == 0 for k in cs):
            cs = {k // p: c for k, c in cs.items()}
            depth -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("AinfElt is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, p, prec, degree=None):
        return cls(p, prec, 0, degree, {})

    @classmethod
    def one(cls, p, prec, degree=None):
        return cls(p, prec, 0, degree, {0: 1})

    @classmethod
    def monomial(cls, p, q, prec, degree=None, coeff=1):
        """coeff * Tt^q for q in S."""
        q = SExponent.from_fraction(p, q) if not isinstance(q, SExponent) else q
        return cls(p, prec, q.logden, degree, {q.num: coeff})

    # -- plumbing ---------------------------------------------------------

    def with_depth(self, depth):
        """Lossless re-expression of the exponent keys on a finer grid."""
        if depth < self.depth:
            raise PreconditionError("cannot coarsen the exponent grid")
        f = self.p ** (depth - self.depth)
        elt = object.__new__(AinfElt)
        object.__setattr__(elt, "p", self.p)
        object.__setattr__(elt, "prec", self.prec)
        object.__setattr__(elt, "depth", depth)
        object.__setattr__(elt, "degree", self.degree)
        object.__setattr__(elt, "shift", self.shift)
        object.__setattr__(elt, "coeffs", {k * f: c for k, c in self.coeffs.items()})
        return elt

    def _pair(self, other):
        if not isinstance(other, AinfElt):
            raise PreconditionError("expected an AinfElt")
        if self.p != other.p:
            raise PrimeMismatch(f"p={self.p} vs p={other.p}")
        m = max(self.depth, other.depth)
        return self.with_depth(m), other.with_depth(m)

    def resize(self, prec=None, degree=None):
        """Shrink the box (truncation only; never a gain of information)."""
        prec = self.prec if prec is None else prec
        if prec > self.prec:
            raise PrecisionExhausted("cannot grow the coefficient precision")
        if degree is not None and self.degree is not None and Fraction(degree) > self.degree:
            raise PrecisionExhausted("cannot grow the degree bound")
        degree = self.degree if degree is None else degree
        return AinfElt(self.p, prec, self.depth, degree, dict(self.coeffs), shift=self.shift)

    def items_sexp(self):
        """Stored terms as (SExponent, coefficient) pairs, ascending."""
        return [
            (SExponent(self.p, k, self.depth), c)
            for k, c in sorted(self.coeffs.items())
        ]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = AinfElt.one(self.p, self.prec) * other
        a, b = self._pair(other)
        s = min(a.shift, b.shift)
        prec = min(a.shift + a.prec, b.shift + b.prec) - s
        if prec < 1:
            raise PrecisionExhausted("shift alignment exhausts the precision")
        mod = self.p**prec
        cs = {k: c * self.p ** (a.shift - s) % mod for k, c in a.coeffs.items()}
        for k, c in b.coeffs.items():
            cs[k] = (cs.get(k, 0) + c * self.p ** (b.shift - s)) % mod
        return AinfElt(
            self.p, prec, a.depth, _degree_min(a.degree, b.degree), cs, shift=s
        )

    __radd__ = __add__

    def __neg__(self):
        return AinfElt(
            self.p, self.prec, self.depth, self.degree,
            {k: -c for k, c in self.coeffs.items()}, shift=self.shift,
        )

    def __sub__(self, other):
        if isinstance(other, int):
            other = AinfElt.one(self.p, self.prec) * other
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, int):
            return AinfElt(
                self.p, self.prec, self.depth, self.degree,
                {k: c * other for k, c in self.coeffs.items()}, shift=self.shift,
            )
        a, b = self._pair(other)
        prec = min(a.prec, b.prec)
        degree = _degree_min(a.degree, b.degree)
        keybound = None if degree is None else degree * self.p**a.depth
        mod = self.p**prec
        cs = {}
        for k1, c1 in a.coeffs.items():
            for k2, c2 in b.coeffs.items():
                k = k1 + k2
                if keybound is not None and k >= keybound:
                    continue
                cs[k] = (cs.get(k, 0) + c1 * c2) % mod
        return AinfElt(self.p, prec, a.depth, degree, cs, shift=a.shift + b.shift)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise PreconditionError("negative powers not supported")
        out = AinfElt.one(self.p, self.prec, self.degree)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, AinfElt):
            return NotImplemented
        if self.p != other.p:
            return False
        a, b = self._pair(other)
        s = min(a.shift, b.shift)
        prec = min(a.shift + a.prec, b.shift + b.prec) - s
        degree = _degree_min(a.degree, b.degree)
        keybound = None if degree is None else degree * self.p**a.depth
        mod = self.p**prec
        keys = set(a.coeffs) | set(b.coeffs)
        for k in keys:
            if keybound is not None and k >= keybound:
                continue
            ca = a.coeffs.get(k, 0) * self.p ** (a.shift - s)
            cb = b.coeffs.get(k, 0) * self.p ** (b.shift - s)
            if (ca - cb) % mod:
                return False
        return True

    def __hash__(self):
        raise TypeError("AinfElt equality is box-relative; not hashable")

    # -- valuation and reduction -------------------------------------------

    def w_valuation(self):
        """w(Σ a_q Tt^q) = min_q v_p(a_q) + q, or a lower-bound marker."""
        grid = Fraction(1, self.p**self.depth)
        best = None
        for k, c in self.coeffs.items():
            v = self.shift + vp_int(c, self.p) + k * grid
            if best is None or v < best:
                best = v
        floor = Fraction(self.shift + self.prec)
        if self.degree is not None:
            floor = min(floor, self.shift + self.degree)
        if best is not None and best <= floor:
            return best
        return LowerBound(floor if best is None else min(floor, best))

    def w_floor(self):
        """The valuation if resolved, else the certified lower bound."""
        w = self.w_valuation()
        return w.bound if isinstance(w, LowerBound) else w

    def reduce_mod_p(self):
        """Coefficient-wise reduction, Tt^q -> t^q, into the perfect ring."""
        from .witt import PerfSeries

        if self.shift > 0:
            return PerfSeries(self.p, 0, self.degree, {})
        if self.shift < 0:
            raise PreconditionError("element has denominators; not reducible mod p")
        return PerfSeries(
            self.p, self.depth, self.degree,
            {k: c % self.p for k, c in self.coeffs.items()},
        )

    # -- presentation --------------------------------------------------------

    def __repr__(self):
        return (
            f"AinfElt(p={self.p}, prec={self.prec}, depth={self.depth}, "
            f"degree={self.degree}, terms={len(self.coeffs)})"
        )

    def __str__(self):
        parts = []
        for q, c in self.items_sexp():
            if self.shift:
                c_str = f"{self.p}^{self.shift}·{c}"
            else:
                c_str = str(c)
            if q.num == 0:
                parts.append(c_str)
            else:
                mono = f"Tt^{q}" if (q.logden or q.num != 1) else "Tt"
                parts.append(mono if c == 1 and not self.shift else f"{c_str}·{mono}")
        body = " + ".join(parts) if parts else "0"
        dstr = "inf" if self.degree is None else str(self.degree)
        return f"{body} + O({self.p}^{self.shift + self.prec}, q>={dstr})"

    def to_json(self):
        if self.degree is None:
            deg = None
        else:
            dq = SExponent.from_fraction(self.p, self.degree)
            deg = dq.to_json()
        doc = {
            "p": self.p,
            "prec": self.prec,
            "depth": self.depth,
            "degree": deg,
            "terms": [
                {"q": q.to_json(), "coeff": c} for q, c in self.items_sexp()
            ],
        }
        if self.shift:
            doc["shift"] = self.shift
        return doc

    @classmethod
    def from_json(cls, doc):
        p = doc["p"]
        depth = doc["depth"]
        deg = doc["degree"]
        degree = None if deg is None else Fraction(deg["num"], p ** deg["logden"])
        cs = {}
        for term in doc["terms"]:
            q = SExponent.from_json(p, term["q"])
            cs[q.num * p ** (depth - q.logden)] = term["coeff"]
        return cls(p, doc["prec"], depth, degree, cs, shift=doc.get("shift", 0))


def dirac_q(p, s, depth, prec, degree):
    """The depth-m realization of the Dirac character at s in p^(-m) Z_p.

    Expands (1 + Tt^(1/p^m))^(s p^m) term by term; s may be a Fraction
    (embedded at the precision the expansion needs) or a PadicScalar,
    in which case its precision must cover every binomial.
    """
    degree = Fraction(degree)
    if degree <= 0:
        raise PreconditionError("degree bound must be positive")
    i_max = math.ceil(degree * p**depth) - 1
    if isinstance(s, PadicScalar):
        if s.p != p:
            raise PrimeMismatch("scalar prime differs")
        if s.val_floor() < -depth:
            raise PreconditionError(
                f"depth {depth} insufficient: v(s) = {s.val_floor()} < -{depth}"
            )
        a = s * PadicScalar.from_int(p, p**depth, s.prec + depth + 1)
    else:
        s = Fraction(s)
        a_frac = s * p**depth
        if a_frac.denominator != 1:
            raise PreconditionError(
                f"depth {depth} insufficient for s = {s}"
            )
        a = PadicScalar.from_int(p, int(a_frac), prec + vp_factorial(i_max, p) + 1)
    if a.shift < 0:
        raise PreconditionError("s * p^depth is not integral")
    need = prec + vp_factorial(i_max, p)
    if a.abs_bound < need:
        raise PrecisionExhausted(
            f"need s*p^depth mod p^{need} for {i_max + 1} coefficients at O(p^{prec})"
        )
    X, M = a.integer_rep(), a.abs_bound
    cs = {}
    for i, val, unit, rel in binomial_row_tracked(p, X, M, i_max, prec):
        if val < prec:
            cs[i] = unit * p**val
    return AinfElt(p, prec, depth, degree, cs)


def t_tilde_approx(p, n, stage, depth, prec, degree):
    """Stage-s approximant of the basis monomial Tt^(1/p^n).

    Returns T_(n+s)^(p^s) with T_(n+s) = Delta_(1/p^(n+s)) - 1 realized at
    the working depth; requires depth >= n + stage.  At stage = depth - n
    the approximant is the monomial itself; mod p every stage equals
    t^(1/p^n) exactly.
    """
    if stage < 0 or n < 0:
        raise PreconditionError("n and stage must be >= 0")
    if depth < n + stage:
        raise BoxExhausted(f"depth {depth} < n + stage = {n + stage}")
    base = dirac_q(p, Fraction(1, p ** (n + stage)), depth, prec, degree) - 1
    return base ** (p**stage)


def rescale_pushforward(x):
    """Pushforward along multiplication by p: Σ a_q Delta_q -> Σ a_q Delta_(pq).

    In series coordinates this is the monomial substitution Tt^q -> Tt^(pq),
    lowering the working depth by one (depth-0 keys simply scale by p).
    """
    if x.depth > 0:
        elt = object.__new__(AinfElt)
        object.__setattr__(elt, "p", x.p)
        object.__setattr__(elt, "prec", x.prec)
        object.__setattr__(elt, "depth", x.depth - 1)
        object.__setattr__(
            elt, "degree", None if x.degree is None else x.degree * x.p
        )
        object.__setattr__(elt, "shift", x.shift)
        object.__setattr__(elt, "coeffs", dict(x.coeffs))
        return elt
    return AinfElt(
        x.p, x.prec, 0,
        None if x.degree is None else x.degree * x.p,
        {k * x.p: c for k, c in x.coeffs.items()}, shift=x.shift,
    )


def reduce_mod_p(x):
    return x.reduce_mod_p()


def w_valuation_S(x):
    return x.w_valuation()

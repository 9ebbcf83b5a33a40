"""Truncated perfect-ring arithmetic over F_p[t^(1/p^infinity)] and the
strict p-ring structure of the uniform measure ring.

A PerfSeries is a finite F_p-combination of monomials t^q on the grid
(1/p^depth)·Z_{>=0}; Frobenius and its inverse act by scaling exponents,
which witnesses perfectness exactly.  The multiplicative (Teichmüller)
representative of x at digit precision N is computed as

    [x] ≡ lift(x^(1/p^(N-1)))^(p^(N-1))   (mod p^N),

where ``lift`` sends each F_p coefficient to its representative in
{0, ..., p-1}.  Witt digits are peeled off with x_0 = a mod p,
a <- (a - [x_0]) / p.
"""

from __future__ import annotations

from fractions import Fraction

from .ainf import AinfElt
from .errors import (
    BoxExhausted,
    InternalConsistencyError,
    PreconditionError,
    PrimeMismatch,
)
from .padic import is_prime

__all__ = [
    "PerfSeries",
    "WittElt",
    "teichmuller",
    "witt_decompose",
    "witt_recompose",
]


def _degree_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PerfSeries:
    """An element of F_p[t^(1/p^infinity)] truncated below exponent ``degree``."""

    __slots__ = ("p", "depth", "degree", "coeffs")

    def __init__(self, p, depth, degree, coeffs):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if depth < 0:
            raise PreconditionError("depth must be >= 0")
        degree = None if degree is None else Fraction(degree)
        keybound = None if degree is None else degree * p**depth
        cs = {}
        for k, c in coeffs.items():
            if k < 0:
                raise PreconditionError("exponents are nonnegative")
            if keybound is not None and k >= keybound:
                continue  # outside the box: forgotten, not an error
            c %= p
            if c:
                cs[k] = c
        while depth > 0 and all(k % p == 0 for k in cs):
            cs = {k // p: c for k, c in cs.items()}
            depth -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("PerfSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p, degree=None):
        return cls(p, 0, degree, {})

    @classmethod
    def one(cls, p, degree=None):
        return cls(p, 0, degree, {0: 1})

    @classmethod
    def monomial(cls, p, q, degree=None, coeff=1):
        q = Fraction(q)
        depth = 0
        while (q * p**depth).denominator != 1:
            depth += 1
        return cls(p, depth, degree, {int(q * p**depth): coeff})

    # -- plumbing -----------------------------------------------------------

    def with_depth(self, depth):
        """Lossless re-expression on a finer grid (kept at that depth)."""
        if depth < self.depth:
            raise PreconditionError("cannot coarsen the exponent grid")
        f = self.p ** (depth - self.depth)
        elt = object.__new__(PerfSeries)
        object.__setattr__(elt, "p", self.p)
        object.__setattr__(elt, "depth", depth)
        object.__setattr__(elt, "degree", self.degree)
        object.__setattr__(elt, "coeffs", {k * f: c for k, c in self.coeffs.items()})
        return elt

    def _pair(self, other):
        if not isinstance(other, PerfSeries):
            raise PreconditionError("expected a PerfSeries")
        if self.p != other.p:
            raise PrimeMismatch(f"p={self.p} vs p={other.p}")
        m = max(self.depth, other.depth)
        return self.with_depth(m), other.with_depth(m)

    # -- F_p-algebra operations ----------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        cs = dict(a.coeffs)
        for k, c in b.coeffs.items():
            cs[k] = (cs.get(k, 0) + c) % self.p
        return PerfSeries(self.p, a.depth, _degree_min(a.degree, b.degree), cs)

    def __neg__(self):
        return PerfSeries(
            self.p, self.depth, self.degree,
            {k: -c for k, c in self.coeffs.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return PerfSeries(
                self.p, self.depth, self.degree,
                {k: c * other for k, c in self.coeffs.items()},
            )
        a, b = self._pair(other)
        degree = _degree_min(a.degree, b.degree)
        keybound = None if degree is None else degree * self.p**a.depth
        cs = {}
        for k1, c1 in a.coeffs.items():
            for k2, c2 in b.coeffs.items():
                k = k1 + k2
                if keybound is not None and k >= keybound:
                    continue
                cs[k] = (cs.get(k, 0) + c1 * c2) % self.p
        return PerfSeries(self.p, a.depth, degree, cs)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise PreconditionError("negative powers not supported")
        out = PerfSeries.one(self.p, self.degree)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def frobenius(self, k=1):
        """x -> x^(p^k), exact: scales every exponent by p^k."""
        if k < 0:
            return self.frobenius_inverse(-k)
        out = self
        for _ in range(k):
            if out.depth > 0:
                out = PerfSeries(
                    out.p, out.depth - 1,
                    None if out.degree is None else out.degree * out.p,
                    dict(out.coeffs),
                )
            else:
                out = PerfSeries(
                    out.p, 0,
                    None if out.degree is None else out.degree * out.p,
                    {k2 * out.p: c for k2, c in out.coeffs.items()},
                )
        return out

    def frobenius_inverse(self, k=1):
        """The exact p^k-th root: scales every exponent by p^-k."""
        if k < 0:
            return self.frobenius(-k)
        return PerfSeries(
            self.p, self.depth + k,
            None if self.degree is None else self.degree / self.p**k,
            dict(self.coeffs),
        )

    def t_adic_valuation(self):
        """min of the exponents (None for the zero series)."""
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.p**self.depth)

    def lift(self, prec):
        """The coefficient-wise integer lift into the measure ring.

        Each F_p coefficient maps to its representative in {0,...,p-1};
        any lift works for the Teichmüller limit, this one is the
        deterministic convention.
        """
        return AinfElt(self.p, prec, self.depth, self.degree, dict(self.coeffs))

    def __eq__(self, other):
        if not isinstance(other, PerfSeries):
            return NotImplemented
        if self.p != other.p:
            return False
        a, b = self._pair(other)
        degree = _degree_min(a.degree, b.degree)
        keybound = None if degree is None else degree * self.p**a.depth
        keys = set(a.coeffs) | set(b.coeffs)
        for k in keys:
            if keybound is not None and k >= keybound:
                continue
            if (a.coeffs.get(k, 0) - b.coeffs.get(k, 0)) % self.p:
                return False
        return True

    def __hash__(self):
        raise TypeError("PerfSeries equality is box-relative; not hashable")

    def __repr__(self):
        return (
            f"PerfSeries(p={self.p}, depth={self.depth}, degree={self.degree}, "
            f"terms={len(self.coeffs)})"
        )

    def __str__(self):
        parts = []
        den = self.p**self.depth
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            q = Fraction(k, den)
            if q == 0:
                parts.append(str(c))
            else:
                mono = "t" if q == 1 else f"t^{q}"
                parts.append(mono if c == 1 else f"{c}·{mono}")
        body = " + ".join(parts) if parts else "0"
        dstr = "inf" if self.degree is None else str(self.degree)
        return f"{body}  (mod {self.p}, q>={dstr})"

    def to_json(self):
        den = self.p**self.depth
        if self.degree is None:
            deg = None
        else:
            deg = {"num": self.degree.numerator,
                   "logden": _logden(self.degree.denominator, self.p)}
        return {
            "p": self.p,
            "depth": self.depth,
            "degree": deg,
            "terms": [
                {"q": {"num": _red_num(k, den, self.p)[0],
                       "logden": _red_num(k, den, self.p)[1]},
                 "coeff": self.coeffs[k]}
                for k in sorted(self.coeffs)
            ],
        }


def _logden(den, p):
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    return e


def _red_num(k, den, p):
    e = _logden(den, p)
    while e > 0 and k % p == 0:
        k //= p
        e -= 1
    return k, e


class WittElt:
    """A strict p-ring element by its Teichmüller digits Σ p^i [x_i]."""

    __slots__ = ("p", "digits")

    def __init__(self, p, digits):
        digits = tuple(digits)
        for d in digits:
            if not isinstance(d, PerfSeries) or d.p != p:
                raise PreconditionError("digits must be PerfSeries over the same p")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "digits", digits)

    def __setattr__(self, name, value):
        raise AttributeError("WittElt is immutable")

    def __eq__(self, other):
        if not isinstance(other, WittElt):
            return NotImplemented
        return self.p == other.p and len(self.digits) == len(other.digits) and all(
            a == b for a, b in zip(self.digits, other.digits)
        )

    def __hash__(self):
        raise TypeError("WittElt is not hashable")

    def __repr__(self):
        return f"WittElt(p={self.p}, digits={len(self.digits)})"

    def to_json(self):
        return {"p": self.p, "digits": [d.to_json() for d in self.digits]}


def teichmuller(x: PerfSeries, prec: int) -> AinfElt:
    """The multiplicative representative [x] modulo p^prec.

    Budget (checked up front): the exponent grid deepens by prec - 1 and a
    finite degree bound shrinks by the factor p^(prec - 1); exact finite
    support stays exact.  Satisfies [x] ≡ x mod p and [x][y] = [xy] at the
    common box.
    """
    if prec < 1:
        raise PreconditionError("digit precision must be >= 1")
    n = prec - 1
    if x.degree is not None:
        eff = x.degree / x.p**n
        if eff * x.p ** (x.depth + n) < 1:
            raise BoxExhausted(
                f"degree bound {x.degree} leaves no terms after {n} root steps"
            )
    y = x.frobenius_inverse(n).lift(prec)
    return y ** (x.p**n)


def witt_decompose(a: AinfElt, digits: int) -> WittElt:
    """Teichmüller-digit decomposition a = Σ p^i [x_i] mod p^digits.

    Peels digits off by subtracting the multiplicative representative and
    dividing by p; a residue not divisible by p after subtraction means
    the element was not a measure-ring value and is reported as corrupted.
    """
    if digits < 1:
        raise PreconditionError("need at least one digit")
    if a.shift != 0:
        raise PreconditionError("element must have integral coefficients")
    if a.prec < digits:
        raise PreconditionError(
            f"element precision O(p^{a.prec}) below digit count {digits}"
        )
    p = a.p
    out = []
    cur = a
    for i in range(digits):
        x_i = cur.reduce_mod_p()
        out.append(x_i)
        if i == digits - 1:
            break
        t = teichmuller(x_i, digits - i)
        diff = cur - t
        cs = {}
        for k, c in diff.coeffs.items():
            if c % p:
                raise InternalConsistencyError(
                    "digit peel-off left a coefficient not divisible by p"
                )
            cs[k] = c // p
        cur = AinfElt(p, diff.prec - 1, diff.depth, diff.degree, cs)
    return WittElt(p, out)


def witt_recompose(w: WittElt, prec=None) -> AinfElt:
    """Σ p^i [x_i] from the digit list, at precision len(digits) by default."""
    n = len(w.digits)
    if n == 0:
        raise PreconditionError("empty digit list")
    prec = n if prec is None else prec
    p = w.p
    total = None
    for i, x_i in enumerate(w.digits):
        if i >= prec:
            break
        t = teichmuller(x_i, prec - i)
        # p^i * [x_i]: an element-wide shift, so no precision is lost
        t = AinfElt(p, t.prec, t.depth, t.degree, t.coeffs, shift=i)
        total = t if total is None else total + t
    return total

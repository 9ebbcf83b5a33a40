"""The measure algebra on Z_p as the power-series ring Z_p[[T]].

Measures are truncated to a box (p^N, T^d): coefficients are residues
mod p^N and degrees run below d.  The Dirac mass at an integral point a
is the series (1+T)^a, convolution of measures is the series product,
and the pairing with a continuous function f = Σ c_n (x choose n)
(Mahler coefficients) is Σ c_n a_n.

Ball values are computed from the closed form

    T^m(a + p^h Z_p) = Σ_{i ≡ a mod p^h, 0 <= i <= m} (-1)^(m-i) C(m, i),

and degree truncation is converted into p-adic precision through the
containment of T^(p^(h+l)) in the ideal of measures taking values in
p^(l+1) Z_p on all balls of radius p^(-h).
"""

from __future__ import annotations

import math

from .errors import (
    BoxExhausted,
    PrecisionExhausted,
    PreconditionError,
    PrimeMismatch,
    UncertifiedTailError,
)
from .padic import (
    LowerBound,
    PadicScalar,
    binomial_row_tracked,
    comb_int,
    is_prime,
    vp_factorial,
    vp_int,
)

__all__ = [
    "IwasawaElt",
    "MahlerFn",
    "BivariateSeries",
    "dirac",
    "convolve",
    "mahler_coeffs_from_samples",
    "mahler_coeffs_by_differences",
    "finite_difference",
    "integrate",
    "eval_mahler",
    "ball_measure",
    "w_valuation",
    "natural_ideal_membership",
    "coproduct",
    "ptadic_power_generators",
    "ball_ideal_equal_generators",
    "ball_ideal_middle_generators",
    "middle_ideal_contains",
    "intersection_vs_middle_scan",
]

_INF = math.inf


class IwasawaElt:
    """A measure on Z_p as a series in T, known mod the box (p^N, T^d).

    ``exact_tail`` records that every coefficient from degree d on is
    exactly zero (true for Dirac masses of small integers and for
    monomials); it sharpens ball-value certificates but is never
    required.
    """

    __slots__ = ("p", "prec", "degree", "coeffs", "exact_tail")

    def __init__(self, p, prec, degree, coeffs, exact_tail=False):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if prec < 1 or degree < 1:
            raise PreconditionError("box needs prec >= 1 and degree >= 1")
        mod = p**prec
        cs = [0] * degree
        for n, c in enumerate(coeffs):
            if n >= degree:
                break  # outside the box: forgotten, not an error
            cs[n] = c % mod
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "exact_tail", bool(exact_tail))

    def __setattr__(self, name, value):
        raise AttributeError("IwasawaElt is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, p, prec, degree):
        return cls(p, prec, degree, [], exact_tail=True)

    @classmethod
    def one(cls, p, prec, degree):
        return cls(p, prec, degree, [1], exact_tail=True)

    @classmethod
    def monomial(cls, p, m, prec, degree, coeff=1):
        cs = [0] * degree
        if m >= degree:
            raise BoxExhausted(f"T^{m} does not fit below degree {degree}")
        cs[m] = coeff
        return cls(p, prec, degree, cs, exact_tail=True)

    # -- box plumbing ----------------------------------------------------

    def _common_box(self, other):
        if not isinstance(other, IwasawaElt):
            raise PreconditionError("expected an IwasawaElt")
        if self.p != other.p:
            raise PrimeMismatch(f"p={self.p} vs p={other.p}")
        return min(self.prec, other.prec), min(self.degree, other.degree)

    def resize(self, prec=None, degree=None):
        """Shrink the box (never a gain of information)."""
        prec = self.prec if prec is None else prec
        degree = self.degree if degree is None else degree
        if prec > self.prec or (degree > self.degree and not self.exact_tail):
            raise PrecisionExhausted("cannot grow a truncation box")
        return IwasawaElt(
            self.p, prec, degree, self.coeffs[:degree],
            exact_tail=self.exact_tail,
        )

    def poly_degree(self):
        """Largest stored index with a nonzero residue (-1 for zero)."""
        for n in range(self.degree - 1, -1, -1):
            if self.coeffs[n]:
                return n
        return -1

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        prec, degree = self._common_box(other)
        cs = [self.coeffs[n] + other.coeffs[n] for n in range(degree)]
        return IwasawaElt(
            self.p, prec, degree, cs,
            exact_tail=self.exact_tail and other.exact_tail
            and self.poly_degree() < degree and other.poly_degree() < degree,
        )

    def __neg__(self):
        return IwasawaElt(
            self.p, self.prec, self.degree, [-c for c in self.coeffs],
            exact_tail=self.exact_tail,
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IwasawaElt(
                self.p, self.prec, self.degree,
                [c * other for c in self.coeffs], exact_tail=self.exact_tail,
            )
        prec, degree = self._common_box(other)
        mod = self.p**prec
        cs = [0] * degree
        for i, a in enumerate(self.coeffs):
            if a == 0 or i >= degree:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= degree:
                    break
                if b:
                    cs[i + j] = (cs[i + j] + a * b) % mod
        exact = (
            self.exact_tail
            and other.exact_tail
            and self.poly_degree() + other.poly_degree() < degree
        )
        return IwasawaElt(self.p, prec, degree, cs, exact_tail=exact)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise PreconditionError("negative powers not supported")
        out = IwasawaElt.one(self.p, self.prec, self.degree)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if not isinstance(other, IwasawaElt):
            return NotImplemented
        if self.p != other.p:
            return False
        prec, degree = self._common_box(other)
        mod = self.p**prec
        return all(
            (self.coeffs[n] - other.coeffs[n]) % mod == 0 for n in range(degree)
        )

    def __hash__(self):
        raise TypeError("IwasawaElt equality is box-relative; not hashable")

    # -- measure-theoretic operations ---------------------------------------

    def ball_tail_floor(self, h):
        """Certified valuation floor for the unknown tail's ball values.

        Every T^m with m >= p^(h+l) takes values in p^(l+1) Z_p on balls
        of radius p^(-h); the largest l with p^(h+l) <= degree converts
        the degree cut into a p-adic bound.  Exact tails have no unknown
        terms at all.
        """
        if self.exact_tail:
            return _INF
        l = 0
        while self.p ** (h + l + 1) <= self.degree:
            l += 1
        if self.p ** (h + l) > self.degree:
            return 0
        return l + 1

    def ball_measure(self, a, h):
        """The value of the measure on the ball a + p^h Z_p."""
        p = self.p
        if h < 0 or not 0 <= a < p**h:
            raise PreconditionError("need 0 <= a < p^h")
        floor = self.ball_tail_floor(h)
        out_prec = min(self.prec, floor)
        if out_prec <= 0:
            raise UncertifiedTailError(
                f"degree bound {self.degree} certifies nothing at radius p^-{h}"
            )
        mod = p**self.prec
        total = 0
        for m, c in enumerate(self.coeffs):
            if c:
                total = (total + c * _tpower_ball_value(p, m, a, h, self.prec)) % mod
        return PadicScalar(p, 0, total, self.prec).truncate(out_prec)

    def w_valuation(self):
        """w(Σ a_n T^n) = min_n v_p(a_n) + n, or a lower-bound marker.

        Stored nonzero residues give exact candidates; zero residues and
        the unknown tail only give floors N+n and d.
        """
        best = None
        for n, c in enumerate(self.coeffs):
            if c:
                v = vp_int(c, self.p) + n
                if best is None or v < best:
                    best = v
        zero_floors = [self.prec + n for n, c in enumerate(self.coeffs) if c == 0]
        floor = min(zero_floors) if zero_floors else _INF
        if not self.exact_tail:
            floor = min(floor, self.degree)
        if best is not None and best <= floor:
            return best
        bound = floor if best is None else min(floor, best)
        if bound is _INF:
            return best if best is not None else LowerBound(self.prec)
        return LowerBound(int(bound))

    def natural_ideal_membership(self, h, l):
        """Does the measure take values in p^l Z_p on every ball of radius p^-h?

        Returns (member, witness) where witness is the limiting ball: the
        first ball breaking membership, or the one of minimal certified
        valuation.  Raises when the box cannot decide.
        """
        p = self.p
        witness = None
        min_val = _INF
        for a in range(p**h):
            val = self.ball_measure(a, h)
            if val.is_zero():
                if val.abs_bound < l:
                    raise UncertifiedTailError(
                        f"ball {a} + p^{h} Z_p only certified to O(p^{val.abs_bound}) < {l}"
                    )
                cand = val.abs_bound
            else:
                if val.shift < l:
                    return False, a
                cand = val.shift
            if cand < min_val:
                min_val, witness = cand, a
        return True, witness

    def coproduct(self, degree=None):
        """Image under the ring map T -> T⊗1 + 1⊗T + T⊗T, truncated.

        The certified output region is the triangle i + j < degree: the
        unknown input coefficients a_n (n >= d) map to images supported
        on total degree >= d, so a square bidegree box would have an
        uncertified corner.
        """
        d = self.degree if degree is None else degree
        gen = BivariateSeries(self.p, self.prec, d, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
        out = BivariateSeries(self.p, self.prec, d, {})
        power = BivariateSeries(self.p, self.prec, d, {(0, 0): 1})
        for n, c in enumerate(self.coeffs[:d]):
            if n > 0:
                power = power * gen
            if c:
                out = out + power * c
        return out

    # -- presentation -----------------------------------------------------

    def __repr__(self):
        return f"IwasawaElt(p={self.p}, prec={self.prec}, degree={self.degree})"

    def __str__(self):
        parts = []
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if n == 0:
                parts.append(str(c))
            elif n == 1:
                parts.append(f"{c}·T" if c != 1 else "T")
            else:
                parts.append(f"{c}·T^{n}" if c != 1 else f"T^{n}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({self.p}^{self.prec}, T^{self.degree})"

    def to_json(self):
        doc = {
            "p": self.p,
            "prec": self.prec,
            "degree": self.degree,
            "coeffs": list(self.coeffs),
        }
        if self.exact_tail:
            doc["exact_tail"] = True
        return doc

    @classmethod
    def from_json(cls, doc):
        return cls(
            doc["p"], doc["prec"], doc["degree"], doc["coeffs"],
            exact_tail=doc.get("exact_tail", False),
        )


def _tpower_ball_value(p, m, a, h, prec):
    """T^m(a + p^h Z_p) mod p^prec via the signed binomial sum.

    Walked incrementally so that huge m stays affordable: C(m, i) is
    updated factor by factor with the p-part tracked separately.
    """
    if m == 0:
        return 1 if a == 0 else 0
    ph = p**h
    mod = p**prec
    total = 0
    # C(m, i) for i = 0..m, tracked as p^val * unit mod p^work
    work = prec
    mod_w = p**work
    val, unit = 0, 1
    if a == 0:
        total = (-1) ** (m % 2)  # i = 0 term
    for i in range(1, m + 1):
        f = m - i + 1
        fv = vp_int(f, p)
        val += fv
        unit = unit * (f // p**fv) % mod_w
        iv = vp_int(i, p)
        val -= iv
        unit = unit * pow(i // p**iv % mod_w, -1, mod_w) % mod_w
        if i % ph == a:
            if val < prec:
                term = unit * p**val % mod
                if (m - i) % 2:
                    term = -term
                total += term
    return total % mod


def dirac(a, degree, prec, p=None):
    """The Dirac mass at an integral point, as the series (1+T)^a.

    ``a`` may be a plain integer (exact) or an integral PadicScalar, in
    which case each coefficient C(a, n) costs v_p(n!) digits of a's
    precision and the box precision must still be reachable.
    """
    if isinstance(a, PadicScalar):
        p = a.p
        if a.shift < 0:
            raise PreconditionError("Dirac points on Z_p must be integral")
        need = prec + vp_factorial(degree - 1, p)
        if a.abs_bound < need:
            raise PrecisionExhausted(
                f"need a mod p^{need} for degree {degree} at precision {prec}"
            )
        X, M = a.integer_rep(), a.abs_bound
        cs = []
        for n, val, unit, rel in binomial_row_tracked(p, X, M, degree - 1, prec):
            cs.append(unit * p**val if val < prec else 0)
        # exactness of the tail is only known for small true integers
        return IwasawaElt(p, prec, degree, cs, exact_tail=False)
    if p is None:
        raise PreconditionError("p is required when a is a plain integer")
    cs = [comb_int(a, n) for n in range(degree)]
    exact = 0 <= a < degree
    return IwasawaElt(p, prec, degree, cs, exact_tail=exact)


def convolve(mu, nu):
    """Convolution of measures = product of the series."""
    return mu * nu


def ball_measure(mu, a, h):
    return mu.ball_measure(a, h)


def w_valuation(mu):
    return mu.w_valuation()


def natural_ideal_membership(mu, h, l):
    return mu.natural_ideal_membership(h, l)


def coproduct(mu, degree=None):
    return mu.coproduct(degree)


class BivariateSeries:
    """Minimal truncated series in T1, T2 over Z/p^N, total degree < d."""

    __slots__ = ("p", "prec", "degree", "coeffs")

    def __init__(self, p, prec, degree, coeffs):
        mod = p**prec
        cs = {}
        for (i, j), c in coeffs.items():
            if i + j < degree:
                c %= mod
                if c:
                    cs[(i, j)] = c
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, name, value):
        raise AttributeError("BivariateSeries is immutable")

    @classmethod
    def tensor(cls, mu, nu):
        """The product measure mu ⊗ nu on Z_p x Z_p."""
        if mu.p != nu.p:
            raise PrimeMismatch("tensor factors over different primes")
        prec = min(mu.prec, nu.prec)
        degree = min(mu.degree, nu.degree)
        cs = {}
        for i, a in enumerate(mu.coeffs[:degree]):
            if a:
                for j, b in enumerate(nu.coeffs[:degree]):
                    if b:
                        cs[(i, j)] = a * b
        return cls(mu.p, prec, degree, cs)

    def __add__(self, other):
        cs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            cs[k] = cs.get(k, 0) + c
        return BivariateSeries(
            self.p, min(self.prec, other.prec), min(self.degree, other.degree), cs
        )

    def __mul__(self, other):
        if isinstance(other, int):
            return BivariateSeries(
                self.p, self.prec, self.degree,
                {k: c * other for k, c in self.coeffs.items()},
            )
        prec = min(self.prec, other.prec)
        degree = min(self.degree, other.degree)
        mod = self.p**prec
        cs = {}
        for (i1, j1), a in self.coeffs.items():
            for (i2, j2), b in other.coeffs.items():
                i, j = i1 + i2, j1 + j2
                if i + j < degree:
                    key = (i, j)
                    cs[key] = (cs.get(key, 0) + a * b) % mod
        return BivariateSeries(self.p, prec, degree, cs)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        degree = min(self.degree, other.degree)
        mod = self.p**prec
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            (self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) % mod == 0
            for k in keys
            if k[0] + k[1] < degree
        )

    def __hash__(self):
        raise TypeError("BivariateSeries is not hashable")

    def __repr__(self):
        return f"BivariateSeries(p={self.p}, prec={self.prec}, degree={self.degree})"


# ---------------------------------------------------------------------------
# Continuous functions via Mahler coefficients
# ---------------------------------------------------------------------------


class MahlerFn:
    """A continuous function Z_p -> Z_p mod p^N via its Mahler coefficients.

    coeffs maps n to the residue of the n-th coefficient; indices below
    tail_cert that are absent are exactly zero.  ``exact_tail=True``
    states that every coefficient from tail_cert on vanishes (finite
    Mahler support, e.g. binomial basis functions); otherwise a function
    built from samples of a locally constant input carries its period,
    and the omitted true coefficients at index >= period * p^l are only
    certified to valuation >= l+1.
    """

    __slots__ = ("p", "prec", "coeffs", "tail_cert", "exact_tail", "period")

    def __init__(self, p, prec, coeffs, tail_cert, exact_tail=False, period=None):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        mod = p**prec
        cs = {}
        for n, c in coeffs.items():
            c %= mod
            if c:
                if n >= tail_cert:
                    raise PreconditionError("stored coefficient beyond the tail certificate")
                cs[n] = c
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "tail_cert", tail_cert)
        object.__setattr__(self, "exact_tail", bool(exact_tail))
        object.__setattr__(self, "period", period)

    def __setattr__(self, name, value):
        raise AttributeError("MahlerFn is immutable")

    @classmethod
    def basis(cls, p, n, prec):
        """The binomial function x -> (x choose n)."""
        return cls(p, prec, {n: 1}, n + 1, exact_tail=True)

    @classmethod
    def from_coeffs(cls, p, coeffs, prec, exact_tail=True, tail_cert=None):
        cs = dict(enumerate(coeffs)) if isinstance(coeffs, (list, tuple)) else dict(coeffs)
        d = tail_cert if tail_cert is not None else (max(cs, default=-1) + 1)
        return cls(p, prec, cs, max(d, 1), exact_tail=exact_tail)

    def tail_floor_at(self, n0):
        """Certified valuation floor of all true coefficients at index >= n0."""
        if self.exact_tail:
            return _INF if n0 >= self.tail_cert else 0
        if self.period is not None:
            if n0 < self.period:
                return 0
            l = 0
            while self.period * self.p ** (l + 1) <= n0:
                l += 1
            return min(l + 1, self.prec)
        # plain scalar certificate
        return self.prec if n0 >= self.tail_cert else 0

    def finite_difference(self, k):
        """The k-th iterated difference f(x+1) - f(x); shifts coefficients."""
        if k < 0:
            raise PreconditionError("k must be >= 0")
        if k == 0:
            return self
        if self.period is not None:
            vals = self.values_on_period()
            m = len(vals)
            for _ in range(k):
                vals = [(vals[(i + 1) % m] - vals[i]) for i in range(m)]
            return mahler_coeffs_from_samples(self.p, vals, prec=self.prec)
        cs = {n - k: c for n, c in self.coeffs.items() if n >= k}
        return MahlerFn(
            self.p, self.prec, cs, max(self.tail_cert - k, 1),
            exact_tail=self.exact_tail,
        )

    def values_on_period(self):
        """Exact residues f(0..period-1) mod p^N for a periodic function."""
        if self.period is None:
            raise PreconditionError("function carries no period certificate")
        return [self._eval_at_int(a) for a in range(self.period)]

    def _eval_at_int(self, a):
        mod = self.p**self.prec
        total = 0
        row = 1  # C(a, 0)
        for n in range(0, min(a, self.tail_cert - 1) + 1):
            if n > 0:
                row = row * (a - n + 1) // n
            c = self.coeffs.get(n)
            if c:
                total = (total + c * row) % mod
        return total

    def eval(self, x):
        """Evaluate the truncated Mahler sum at an integral point.

        For period-carrying functions the argument is reduced mod the
        period and the finite exact sum is used (local constancy).  For
        finite Mahler support the direct sum applies; each binomial
        factor costs v_p(n!) digits of x's precision.
        """
        p = self.p
        if isinstance(x, int):
            x = PadicScalar.from_int(
                p, x, self.prec + vp_factorial(self.tail_cert, p) + 1
            )
        if x.p != p:
            raise PrimeMismatch("argument prime differs")
        if x.shift < 0:
            raise PreconditionError("Mahler evaluation needs an integral point")
        if self.period is not None:
            vper = vp_int(self.period, p)
            if x.abs_bound < vper:
                raise PrecisionExhausted(
                    f"argument known mod p^{x.abs_bound} < period p^{vper}"
                )
            a = x.integer_rep() % self.period
            return PadicScalar(p, 0, self._eval_at_int(a), self.prec)
        X, M = x.integer_rep(), x.abs_bound
        mod = p**self.prec
        total = 0
        out_prec = self.prec
        top = max(self.coeffs, default=0)
        for n, val, unit, rel in binomial_row_tracked(p, X, M, top, self.prec):
            c = self.coeffs.get(n)
            if c:
                out_prec = min(out_prec, val + rel, M - vp_factorial(n, p))
                term = unit * p**val if val < self.prec else 0
                total = (total + c * term) % mod
        if out_prec < 1:
            raise PrecisionExhausted("argument precision exhausted by binomials")
        return PadicScalar(p, 0, total, self.prec).truncate(out_prec)

    def __eq__(self, other):
        if not isinstance(other, MahlerFn):
            return NotImplemented
        if self.p != other.p:
            return False
        prec = min(self.prec, other.prec)
        mod = self.p**prec
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            (self.coeffs.get(n, 0) - other.coeffs.get(n, 0)) % mod == 0 for n in keys
        )

    def __hash__(self):
        raise TypeError("MahlerFn is not hashable")

    def __repr__(self):
        return (
            f"MahlerFn(p={self.p}, prec={self.prec}, terms={len(self.coeffs)}, "
            f"tail_cert={self.tail_cert}, period={self.period})"
        )

    def to_json(self):
        doc = {
            "p": self.p,
            "prec": self.prec,
            "coeffs": {str(n): c for n, c in sorted(self.coeffs.items())},
            "tail_cert": self.tail_cert,
        }
        if self.exact_tail:
            doc["exact_tail"] = True
        if self.period is not None:
            doc["period"] = self.period
        return doc


def mahler_coeffs_from_samples(p, values, prec=None):
    """Mahler coefficients of a locally constant function from its samples.

    ``values`` must list f(0), ..., f(p^M - 1) for some M; the function is
    promised constant on residue classes mod p^M.  The lower-triangular
    unipotent system C(n, a) against the coefficient vector is solved by
    forward substitution, exactly mod p^(M+1) (or the samples' precision
    if lower).  Coefficients beyond index p^M - 1 are not extrapolated.
    """
    m = len(values)
    M = 0
    while p**M < m:
        M += 1
    if p**M != m:
        raise PreconditionError(f"sample count {m} is not a power of {p}")
    native = M + 1
    if values and isinstance(values[0], PadicScalar):
        native = min(native, min(v.abs_bound for v in values))
    out_prec = native if prec is None else min(prec, native)
    if out_prec < 1:
        raise PrecisionExhausted("samples carry no digits")
    mod = p**out_prec
    vals = [
        (v.residue(out_prec) if isinstance(v, PadicScalar) else v % mod)
        for v in values
    ]
    coeffs = [0] * m
    for n in range(m):
        acc = vals[n]
        row = 1  # C(n, 0)
        for a in range(n):
            if a > 0:
                row = row * (n - a + 1) // a
            if coeffs[a]:
                acc -= row * coeffs[a] % mod
        # row now holds C(n, n-1); final term a = n has C(n, n) = 1
        coeffs[n] = acc % mod
    return MahlerFn(
        p, out_prec, dict(enumerate(coeffs)), m, exact_tail=False, period=m
    )


def mahler_coeffs_by_differences(p, values, prec):
    """Independent oracle: c_n = Σ_i (-1)^(n-i) C(n, i) f(i), n < len(values)."""
    mod = p**prec
    out = []
    for n in range(len(values)):
        acc = 0
        for i in range(n + 1):
            acc += (-1) ** (n - i) * comb_int(n, i) * values[i]
        out.append(acc % mod)
    return out


def finite_difference(f, k):
    return f.finite_difference(k)


def eval_mahler(f, x):
    return f.eval(x)


def integrate(f, mu):
    """The pairing Σ c_n a_n of a function with a measure.

    Crossing terms (a coefficient unknown on one side, possibly nonzero
    on the other) are folded into the reported precision; if nothing can
    be certified the tail is flagged instead of silently truncated.
    """
    if f.p != mu.p:
        raise PrimeMismatch("function and measure primes differ")
    p = f.p
    prec = min(f.prec, mu.prec)
    mod = p**prec
    total = 0
    out_prec = prec
    for n, c in f.coeffs.items():
        if n < mu.degree:
            a = mu.coeffs[n]
            if a:
                total = (total + c * a) % mod
        elif not mu.exact_tail:
            # stored coefficient against an unknown measure digit
            out_prec = min(out_prec, vp_int(c, p))
    if not f.exact_tail:
        start = f.period if f.period is not None else f.tail_cert
        for n in range(start, mu.degree):
            if n in f.coeffs:
                continue
            a = mu.coeffs[n]
            av = vp_int(a, p) if a else mu.prec
            out_prec = min(out_prec, f.tail_floor_at(n) + av)
        if not mu.exact_tail:
            out_prec = min(out_prec, f.tail_floor_at(max(start, mu.degree)))
    if out_prec < 1:
        raise UncertifiedTailError(
            "neither the degree bound nor the tail certificate covers the pairing"
        )
    return PadicScalar(p, 0, total, prec).truncate(out_prec)


# ---------------------------------------------------------------------------
# The natural topology: explicit ideals and the desk-scale scan
# ---------------------------------------------------------------------------


def ptadic_power_generators(p, N):
    """Generators p^i T^(p^N - i), 0 <= i <= p^N, of (p, T)^(p^N)."""
    out = []
    q = p**N
    for i in range(q + 1):
        out.append((i, q - i))
    return out


def ball_ideal_equal_generators(p, N):
    """Generators of the intersection of the ball ideals with h + l = N + 1.

    The list is (p^(N+1)) together with p^(N-j) T^i for p^j <= i < p^(j+1),
    j = 0..N-1, and T^(p^N); given as (power of p, power of T) pairs with
    (N+1, 0) meaning the constant p^(N+1).
    """
    gens = [(N + 1, 0)]
    for j in range(N):
        for i in range(p**j, p ** (j + 1)):
            gens.append((N - j, i))
    gens.append((0, p**N))
    return gens


def ball_ideal_middle_generators(p, N):
    """Generators p^N (p, T, T^p / p, ..., T^(p^N) / p^N) of the deepened
    intersection of the ball ideals U_(h, l+1) over h + l = N."""
    gens = [(N + 1, 0)]
    for j in range(N + 1):
        gens.append((N - j, p**j))
    return gens


def middle_ideal_contains(p, N, coeffs):
    """Per-coefficient membership test for the deepened middle ideal.

    The ideal is spanned, degree by degree, by p^(N+1) in degree 0 and by
    p^(max(0, N - floor(log_p m))) in degree m >= 1.
    """
    for m, c in enumerate(coeffs):
        if m == 0:
            need = N + 1
        else:
            j = 0
            while p ** (j + 1) <= m:
                j += 1
            need = max(0, N - j)
        if c % p**need:
            return False
    return True


def intersection_vs_middle_scan(p, N, coefficient_sets=None):
    """Scan truncated polynomials mod (p^(N+2), T^(p^N + 1)) for members of
    the deepened ball-ideal intersection that escape the middle ideal.

    The intersection runs over the ball ideals U_(h, l+1) with h + l = N;
    its members are compared against the deepened middle ideal
    p^N (p, T, T^p/p, ..., T^(p^N)/p^N) coefficient-wise.  With
    coefficient_sets=None every coefficient ranges over the full
    Z/p^(N+2) (feasible for p=2, N<=2); otherwise each degree uses the
    given bounded candidate list.  Returns (checked, escapees, missed):
    escapees counts intersection members outside the middle ideal and
    missed counts middle-ideal members outside the intersection — both
    expected to be zero.
    """
    import numpy as np

    deg = p**N + 1
    mod = p ** (N + 2)
    if coefficient_sets is None:
        sets = [list(range(mod))] * deg
    else:
        sets = [list(s) for s in coefficient_sets]
        if len(sets) != deg:
            raise PreconditionError(f"need {deg} coefficient sets")

    sizes = [len(s) for s in sets]
    total = 1
    for s in sizes:
        total *= s
    # all candidate coefficient vectors, mixed-radix enumeration
    grid = np.indices(sizes).reshape(deg, total).T
    cands = np.empty((total, deg), dtype=np.int64)
    for m in range(deg):
        cands[:, m] = np.asarray(sets[m], dtype=np.int64)[grid[:, m]]

    inter = np.ones(total, dtype=bool)
    for h in range(N + 1):
        l = N - h
        ph = p**h
        lmod = p ** (l + 1)
        W = np.zeros((deg, ph), dtype=np.int64)
        for m in range(deg):
            for a in range(ph):
                W[m, a] = _tpower_ball_value(p, m, a, h, N + 2) % mod
        balls = cands @ W % lmod
        inter &= (balls == 0).all(axis=1)

    middle = np.ones(total, dtype=bool)
    for m in range(deg):
        if m == 0:
            need = N + 1
        else:
            j = 0
            while p ** (j + 1) <= m:
                j += 1
            need = max(0, N - j)
        middle &= cands[:, m] % p**need == 0

    escapees = int(np.count_nonzero(inter & ~middle))
    missed = int(np.count_nonzero(middle & ~inter))
    return total, escapees, missed

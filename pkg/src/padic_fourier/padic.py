"""Exact truncated arithmetic in Z_p and Q_p.

A scalar is stored as ``p^shift * unit`` with ``unit`` known modulo
``p^prec``, i.e. the value is known modulo ``p^(shift+prec)`` (absolute
precision).  All operations propagate the provable precision and never
report digits beyond it.  The module also provides the classical binomial
coefficient function on Z_p and its generalized version on Q_p with
exponents in S = Z[1/p] ∩ R_{>=0}, obtained as the limit of
``C(p^n x, p^n q)`` over scaling levels n.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    PrecisionExhausted,
    PreconditionError,
    PrimeMismatch,
)

__all__ = [
    "PadicScalar",
    "SExponent",
    "LowerBound",
    "binomial",
    "comb_int",
    "gen_binomial",
    "gen_binomial_approximants",
    "gen_binomial_profile",
    "gen_binomial_valuation_bound",
    "gen_binomial_valuation_floor",
    "vp_int",
    "vp_factorial",
]


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


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is unbounded")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    s = 0
    q = n
    while q:
        q //= p
        s += q
    return s


def comb_int(a: int, n: int) -> int:
    """Exact integer binomial C(a, n) for any integer a and n >= 0.

    The product of n consecutive integers is always divisible by n!.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    num = 1
    for j in range(n):
        num *= a - j
    den = 1
    for j in range(2, n + 1):
        den *= j
    return num // den


class LowerBound:
    """Marker for a quantity only known to be ``>= bound``.

    Returned by valuation-style queries when truncation prevents
    resolving the exact value.
    """

    __slots__ = ("bound",)

    def __init__(self, bound):
        self.bound = bound

    def __eq__(self, other):
        return isinstance(other, LowerBound) and self.bound == other.bound

    def __hash__(self):
        return hash(("LowerBound", self.bound))

    def __repr__(self):
        return f">= {self.bound}"


class PadicScalar:
    """An element of Q_p known to absolute precision O(p^(shift+prec)).

    Normal form: either ``unit`` is coprime to p (so the valuation is
    exactly ``shift``), or ``unit == 0 and prec == 0`` (the canonical
    "zero at precision O(p^shift)" element, whose valuation is only
    bounded below by ``shift``).
    """

    __slots__ = ("p", "shift", "unit", "prec")

    def __init__(self, p: int, shift: int, unit: int, prec: int):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if prec < 0:
            raise PreconditionError("prec must be >= 0")
        unit %= p**prec if prec > 0 else 1
        if unit == 0:
            shift, prec = shift + prec, 0
        else:
            v = vp_int(unit, p)
            if v:
                shift, prec, unit = shift + v, prec - v, unit // p**v
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):
        raise AttributeError("PadicScalar is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_int(cls, p: int, value: int, prec: int) -> "PadicScalar":
        return cls(p, 0, value % p**prec, prec)

    @classmethod
    def from_fraction(cls, p: int, value, prec: int) -> "PadicScalar":
        """Embed a rational with the given relative precision budget."""
        fr = Fraction(value)
        if fr == 0:
            return cls.zero(p, prec)
        num, den = fr.numerator, fr.denominator
        vn = vp_int(num, p)
        vd = vp_int(den, p)
        num //= p**vn
        den //= p**vd
        mod = p**prec
        unit = num * pow(den, -1, mod) % mod
        return cls(p, vn - vd, unit, prec)

    @classmethod
    def zero(cls, p: int, abs_bound: int) -> "PadicScalar":
        return cls(p, abs_bound, 0, 0)

    @classmethod
    def one(cls, p: int, prec: int) -> "PadicScalar":
        return cls(p, 0, 1, prec)

    # -- basic queries -------------------------------------------------

    @property
    def abs_bound(self) -> int:
        """Exponent b such that the value is known modulo p^b."""
        return self.shift + self.prec

    def is_zero(self) -> bool:
        """True when the value is 0 at its stated precision."""
        return self.unit == 0

    def valuation(self):
        """Exact valuation, or a LowerBound marker for a truncated zero."""
        if self.unit == 0:
            return LowerBound(self.shift)
        return self.shift

    def val_floor(self) -> int:
        """Certified lower bound on the valuation (exact when nonzero)."""
        return self.shift

    def integer_rep(self) -> int:
        """The representative of an integral element in [0, p^abs_bound)."""
        if self.shift < 0:
            raise PreconditionError("element is not integral")
        return self.unit * self.p**self.shift

    def residue(self, k: int) -> int:
        """Value modulo p^k (requires k <= abs_bound)."""
        if k > self.abs_bound:
            raise PrecisionExhausted(
                f"residue mod p^{k} requested, only O(p^{self.abs_bound}) known"
            )
        if k <= self.shift:
            return 0
        return self.unit * self.p**self.shift % self.p**k

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise PrimeMismatch(f"p={self.p} vs p={other.p}")
            return other
        if isinstance(other, int):
            return PadicScalar.from_int(self.p, other, self.prec + max(self.shift, 0) + 1)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        bound = min(self.abs_bound, other.abs_bound)
        s = min(self.shift, other.shift, bound)
        mod = self.p ** (bound - s)
        val = (
            self.unit * self.p ** (self.shift - s)
            + other.unit * self.p ** (other.shift - s)
        ) % mod
        return PadicScalar(self.p, s, val, bound - s)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.shift, -self.unit, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        bound = min(self.shift + other.abs_bound, other.shift + self.abs_bound)
        s = self.shift + other.shift
        prec = bound - s
        return PadicScalar(self.p, s, self.unit * other.unit, prec)

    __rmul__ = __mul__

    def invert(self) -> "PadicScalar":
        if self.unit == 0:
            raise PreconditionError("cannot invert a truncated zero")
        mod = self.p**self.prec
        return PadicScalar(self.p, -self.shift, pow(self.unit, -1, mod), self.prec)

    def truncate(self, abs_bound: int) -> "PadicScalar":
        """Forget digits: reduce the absolute precision to ``abs_bound``."""
        if abs_bound > self.abs_bound:
            raise PrecisionExhausted(
                f"cannot extend precision O(p^{self.abs_bound}) to O(p^{abs_bound})"
            )
        if abs_bound <= self.shift:
            return PadicScalar.zero(self.p, abs_bound)
        return PadicScalar(self.p, self.shift, self.unit, abs_bound - self.shift)

    def __eq__(self, other):
        """Equality at the coarsest common precision."""
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if self.p != other.p:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("PadicScalar equality is precision-relative; not hashable")

    # -- presentation ---------------------------------------------------

    def __repr__(self):
        return f"PadicScalar(p={self.p}, shift={self.shift}, unit={self.unit}, prec={self.prec})"

    def __str__(self):
        if self.unit == 0:
            return f"0 + O({self.p}^{self.abs_bound})"
        return f"{self.p}^{self.shift} * {self.unit} + O({self.p}^{self.abs_bound})"

    def to_json(self) -> dict:
        return {"p": self.p, "shift": self.shift, "unit": self.unit, "prec": self.prec}

    @classmethod
    def from_json(cls, doc: dict) -> "PadicScalar":
        return cls(doc["p"], doc["shift"], doc["unit"], doc["prec"])


class SExponent:
    """An exponent q = num / p^logden in S = Z[1/p] ∩ R_{>=0}, in lowest terms."""

    __slots__ = ("p", "num", "logden")

    def __init__(self, p: int, num: int, logden: int = 0):
        if num < 0 or logden < 0:
            raise PreconditionError("S-exponents are nonnegative")
        if num == 0:
            logden = 0
        while logden > 0 and num % p == 0:
            num //= p
            logden -= 1
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "logden", logden)

    def __setattr__(self, name, value):
        raise AttributeError("SExponent is immutable")

    @classmethod
    def from_fraction(cls, p: int, value) -> "SExponent":
        fr = Fraction(value)
        if fr < 0:
            raise PreconditionError("S-exponents are nonnegative")
        den = fr.denominator
        if den == 1:
            return cls(p, fr.numerator, 0)
        logden = vp_int(den, p)
        if p**logden != den:
            raise PreconditionError(f"denominator {den} is not a power of {p}")
        return cls(p, fr.numerator, logden)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.p**self.logden)

    def vp(self):
        """Valuation of q, or None for q = 0 (valuation unbounded)."""
        if self.num == 0:
            return None
        return vp_int(self.num, self.p) - self.logden

    def __add__(self, other: "SExponent") -> "SExponent":
        if self.p != other.p:
            raise PrimeMismatch("exponent primes differ")
        m = max(self.logden, other.logden)
        num = self.num * self.p ** (m - self.logden) + other.num * self.p ** (
            m - other.logden
        )
        return SExponent(self.p, num, m)

    def scale_by_p(self, k: int = 1) -> "SExponent":
        """Multiply by p^k (k may be negative; result must stay in S)."""
        if k >= 0:
            return SExponent(self.p, self.num * self.p**k, self.logden)
        return SExponent(self.p, self.num, self.logden - k)

    def _key(self):
        return self.num * 1.0 / self.p**self.logden  # only for error text

    def __eq__(self, other):
        return (
            isinstance(other, SExponent)
            and self.p == other.p
            and self.num == other.num
            and self.logden == other.logden
        )

    def __lt__(self, other):
        if isinstance(other, SExponent):
            other = other.as_fraction()
        return self.as_fraction() < other

    def __le__(self, other):
        if isinstance(other, SExponent):
            other = other.as_fraction()
        return self.as_fraction() <= other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __hash__(self):
        return hash((self.p, self.num, self.logden))

    def __repr__(self):
        if self.logden == 0:
            return str(self.num)
        return f"{self.num}/{self.p ** self.logden}"

    def to_json(self) -> dict:
        return {"num": self.num, "logden": self.logden}

    @classmethod
    def from_json(cls, p: int, doc: dict) -> "SExponent":
        return cls(p, doc["num"], doc["logden"])


# ---------------------------------------------------------------------------
# Binomial coefficient machinery
# ---------------------------------------------------------------------------


def binomial_row_tracked(p: int, X: int, M: int, n_max: int, work: int):
    """Yield (n, val, unit, rel) for C(x, n), n = 0..n_max, where x ≡ X mod p^M.

    C(x, n) = p^val * u with u ≡ unit mod p^rel and rel = min(work, M - maxfv),
    maxfv being the largest factor valuation met so far.  The absolute
    precision of the n-th entry is val + rel.

    The walk runs on X reduced mod p^(work + guard); a factor whose
    valuation eats into the guard would leave its unit under-precise, so
    those rare factors are recomputed from the unreduced X.
    """
    if M <= 0:
        raise PrecisionExhausted("argument has no known digits")
    work = max(work, 1)
    guard = 4
    mod_w = p**work
    mod_g = p ** (work + guard)
    Xg = X % mod_g
    val = 0
    unit = 1
    maxfv = 0
    yield 0, 0, 1, min(work, M)
    for j in range(n_max):
        f_red = (Xg - j) % mod_g
        if f_red == 0 or vp_int(f_red, p) > guard:
            # the reduction cannot certify work digits of this factor's unit
            f = X - j
            if f == 0:
                fv, fu = M, 1
            else:
                fv = min(vp_int(f, p), M)
                fu = (f // p**fv) % mod_w
        else:
            fv = vp_int(f_red, p)
            fu = (f_red // p**fv) % mod_w
        maxfv = max(maxfv, fv)
        val += fv
        unit = unit * fu % mod_w
        k = j + 1
        kv = vp_int(k, p)
        val -= kv
        unit = unit * pow(k // p**kv % mod_w, -1, mod_w) % mod_w
        yield k, val, unit, min(work, M - maxfv)


def comb_tracked(p: int, X: int, M: int, n: int, work: int) -> PadicScalar:
    """C(x, n) as a PadicScalar, for x ≡ X mod p^M, at the provable precision."""
    for k, val, unit, rel in binomial_row_tracked(p, X, M, n, work):
        if k == n:
            return PadicScalar(p, val, unit % (p**rel if rel > 0 else 1), max(rel, 0))
    raise AssertionError("unreachable")


def binomial(x: PadicScalar, n: int) -> PadicScalar:
    """Classical binomial C(x, n) for integral x, n >= 0.

    The output precision is the input's absolute precision minus v_p(n!):
    the numerator product is known mod p^bound and the division by n!
    costs exactly that many digits.
    """
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if x.shift < 0:
        raise PreconditionError("binomial requires an integral argument")
    p = x.p
    bound = x.abs_bound
    vfact = vp_factorial(n, p)
    if bound <= vfact:
        raise PrecisionExhausted(
            f"input precision O(p^{bound}) <= v_p({n}!) = {vfact}"
        )
    if n == 0:
        return PadicScalar.one(p, bound)
    out = comb_tracked(p, x.integer_rep(), bound, n, work=bound)
    return out.truncate(bound - vfact)


def gen_binomial_valuation_floor(s: PadicScalar, q) -> int:
    """Certified lower bound v(s) - v(q) on v((s choose q)) when v(s) > v(q).

    Proof by carry counting: writing the pairing at a scaling level where
    both arguments are integral, the base-p addition of p^n q and
    p^n (s - q) is forced to carry at every position from n + v(q) up to
    n + v(s) - 1, and each carry contributes one to the valuation of the
    binomial coefficient.  The bound is sharp (s = p^k, q = 1 attains it).
    """
    q = _as_sexponent(s.p, q)
    vq = q.vp()
    if vq is None:
        return 0
    vs = s.val_floor()
    return max(0, vs - vq)


def gen_binomial_valuation_bound(s: PadicScalar, q) -> int:
    """The (p-1)-scaled valuation bound (p-1)(v(s)-v(q)), else 0.

    This is the stated interface constant; it coincides with the certified
    floor at p = 2.  For p >= 3 it can overstate the guarantee (already
    s = p^2, q = 1 gives a binomial of valuation exactly 2), so all
    internal truncation logic uses gen_binomial_valuation_floor instead.
    """
    return (s.p - 1) * gen_binomial_valuation_floor(s, q)


def _as_sexponent(p: int, q) -> SExponent:
    if isinstance(q, SExponent):
        if q.p != p:
            raise PrimeMismatch("exponent prime differs from scalar prime")
        return q
    return SExponent.from_fraction(p, q)


def _level_for(x: PadicScalar, q: SExponent, target_prec: int) -> int:
    vx = x.val_floor()
    n = max(q.logden, -min(vx, 0), target_prec - 1 - vx)
    return max(n, 0)


def gen_binomial(x: PadicScalar, q, target_prec: int) -> PadicScalar:
    """Generalized binomial (x choose q) on Q_p, q in S, to >= target_prec digits.

    Computed as the scaling-level approximant C(p^n x, p^n q) with n chosen
    so that the tail of the level sequence is certified below p^-target_prec:
    consecutive approximants differ by a multiple of p^(1+n+v(x)).
    """
    p = x.p
    q = _as_sexponent(p, q)
    if target_prec < 1:
        raise PreconditionError("target_prec must be >= 1")
    if q.num == 0:
        return PadicScalar.one(p, target_prec)
    n = _level_for(x, q, target_prec)
    K = q.num * p ** (n - q.logden)
    M = x.abs_bound + n
    X = x.unit * p ** (x.shift + n)
    out = comb_tracked(p, X, M, K, work=target_prec + 2)
    tail = 1 + n + x.val_floor()
    certified = min(out.abs_bound, tail)
    if certified < target_prec:
        raise PrecisionExhausted(
            f"input precision certifies only O(p^{certified}); "
            f"raise the precision of x to reach O(p^{target_prec})"
        )
    return out.truncate(certified)


def gen_binomial_approximants(x: PadicScalar, q, levels) -> list:
    """The raw approximants C(p^n x, p^n q) for the given levels n.

    Levels must make both arguments integral.  Used to inspect the
    convergence of the defining limit.
    """
    p = x.p
    q = _as_sexponent(p, q)
    out = []
    for n in levels:
        if n < q.logden or x.shift + n < 0:
            raise PreconditionError(f"level {n} leaves arguments non-integral")
        K = q.num * p ** (n - q.logden)
        M = x.abs_bound + n
        X = x.unit * p ** (x.shift + n)
        out.append((n, comb_tracked(p, X, M, K, work=M)))
    return out


def gen_binomial_profile(x: PadicScalar, logden: int, q_max, target_prec: int) -> dict:
    """All (x choose j/p^logden) for 0 <= j/p^logden <= q_max, in one sweep.

    Returns {j: PadicScalar}.  A single scaling level serves every exponent,
    so the falling-factorial walk is shared; this is the fast path for
    addition-formula sums and Dirac-combination transforms.
    """
    p = x.p
    q_max = Fraction(q_max)
    j_max = int(q_max * p**logden)
    q_top = SExponent(p, max(j_max, 1), logden)
    n = _level_for(x, q_top, target_prec)
    n = max(n, logden)
    step = p ** (n - logden)
    K_max = j_max * step
    M = x.abs_bound + n
    X = x.unit * p ** (x.shift + n)
    tail = 1 + n + x.val_floor()
    out = {}
    for k, val, unit, rel in binomial_row_tracked(p, X, M, K_max, target_prec + 2):
        if k % step == 0:
            sc = PadicScalar(p, val, unit % (p**rel if rel > 0 else 1), max(rel, 0))
            certified = min(sc.abs_bound, tail)
            if certified < target_prec:
                raise PrecisionExhausted(
                    f"profile entry q={k // step}/p^{logden} certified only to O(p^{certified})"
                )
            out[k // step] = sc.truncate(certified)
    return out

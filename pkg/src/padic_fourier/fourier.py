"""The Fourier pair on Q_p.

The basis functions (x choose q) for q in S are orthogonal to the
monomial measures Tt^(q'): integrating the one against the other gives
the Kronecker delta.  A uniformly continuous function is stored by its
coefficients b_q against that basis together with a decay certificate
for the omitted ones; a uniform measure stored as an S-series has the
coefficients of its own expansion as Fourier coefficients, so the
forward transform on stored data is coefficient extraction, and for a
finite Dirac combination it is computed through the generalized
binomial.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .ainf import AinfElt
from .errors import (
    PreconditionError,
    PrimeMismatch,
    UncertifiedTailError,
)
from .padic import (
    PadicScalar,
    SExponent,
    gen_binomial,
    is_prime,
    vp_int,
)

__all__ = [
    "UnifFn",
    "integrate_unif",
    "forward_transform",
    "forward_transform_diracs",
    "eval_unif",
    "pullback_rescale",
]

_INF = math.inf


class UnifFn:
    """A uniformly continuous function Q_p -> Z_p via basis coefficients.

    coeffs maps integer keys k to residues mod p^prec of b_q at
    q = k / p^depth.  The decay certificate is either ``exact_tail=True``
    (all omitted coefficients vanish) or a list of (q_threshold, floor)
    pairs asserting v(b_q) >= floor for every omitted q >= q_threshold;
    thresholds are Fractions in ascending order and the floor of the
    largest applicable threshold wins.
    """

    __slots__ = ("p", "prec", "depth", "coeffs", "decay_cert", "exact_tail")

    def __init__(self, p, prec, depth, coeffs, decay_cert=None, exact_tail=False):
        if not is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if prec < 1 or depth < 0:
            raise PreconditionError("need prec >= 1 and depth >= 0")
        mod = p**prec
        cs = {}
        for k, c in coeffs.items():
            if k < 0:
                raise PreconditionError("exponents are nonnegative")
            c %= mod
            if c:
                cs[k] = c
        while depth > 0 and all(k % p == 0 for k in cs):
            cs = {k // p: c for k, c in cs.items()}
            depth -= 1
        if not exact_tail:
            if not decay_cert:
                raise PreconditionError(
                    "a non-exact tail needs an explicit decay certificate"
                )
            decay_cert = tuple(
                sorted((Fraction(t), int(f)) for t, f in decay_cert)
            )
        else:
            decay_cert = ()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "decay_cert", decay_cert)
        object.__setattr__(self, "exact_tail", bool(exact_tail))

    def __setattr__(self, name, value):
        raise AttributeError("UnifFn is immutable")

    @classmethod
    def basis(cls, p, q, prec):
        """The generalized binomial function x -> (x choose q)."""
        q = SExponent.from_fraction(p, q) if not isinstance(q, SExponent) else q
        return cls(p, prec, q.logden, {q.num: 1}, exact_tail=True)

    @classmethod
    def constant(cls, p, value, prec):
        return cls(p, prec, 0, {0: value}, exact_tail=True)

    def items_sexp(self):
        return [
            (SExponent(self.p, k, self.depth), c)
            for k, c in sorted(self.coeffs.items())
        ]

    def decay_floor_beyond(self, q0):
        """Certified valuation floor of all omitted b_q with q >= q0."""
        if self.exact_tail:
            return _INF
        floor = 0
        for t, f in self.decay_cert:
            if t <= q0:
                floor = max(floor, f)
        return floor

    def __eq__(self, other):
        if not isinstance(other, UnifFn):
            return NotImplemented
        if self.p != other.p:
            return False
        m = max(self.depth, other.depth)
        prec = min(self.prec, other.prec)
        mod = self.p**prec
        a = {k * self.p ** (m - self.depth): c for k, c in self.coeffs.items()}
        b = {k * other.p ** (m - other.depth): c for k, c in other.coeffs.items()}
        return all((a.get(k, 0) - b.get(k, 0)) % mod == 0 for k in set(a) | set(b))

    def __hash__(self):
        raise TypeError("UnifFn is not hashable")

    def __repr__(self):
        return (
            f"UnifFn(p={self.p}, prec={self.prec}, depth={self.depth}, "
            f"terms={len(self.coeffs)})"
        )

    def to_json(self):
        doc = {
            "p": self.p,
            "prec": self.prec,
            "depth": self.depth,
            "terms": [
                {"q": q.to_json(), "coeff": c} for q, c in self.items_sexp()
            ],
            "decay_cert": [
                {
                    "q_ge": SExponent.from_fraction(self.p, t).to_json(),
                    "val_floor": f,
                }
                for t, f in self.decay_cert
            ],
        }
        if self.exact_tail:
            doc["exact_tail"] = True
        return doc

    @classmethod
    def from_json(cls, doc):
        p = doc["p"]
        depth = doc["depth"]
        cs = {}
        for term in doc["terms"]:
            q = SExponent.from_json(p, term["q"])
            cs[q.num * p ** (depth - q.logden)] = term["coeff"]
        cert = [
            (SExponent.from_json(p, e["q_ge"]).as_fraction(), e["val_floor"])
            for e in doc.get("decay_cert", [])
        ]
        return cls(
            p, doc["prec"], depth, cs,
            decay_cert=cert or None, exact_tail=doc.get("exact_tail", False),
        )


def integrate_unif(f: UnifFn, mu: AinfElt) -> PadicScalar:
    """The pairing Σ_q b_q a_q of a uniform function with a uniform measure.

    Terms where one side is outside its box are bounded by the other
    side's certificate and folded into the reported precision; an
    unbounded crossing raises instead of silently truncating.
    """
    if f.p != mu.p:
        raise PrimeMismatch("function and measure primes differ")
    p = f.p
    m = max(f.depth, mu.depth)
    mud = mu.with_depth(m)
    fk = {k * p ** (m - f.depth): c for k, c in f.coeffs.items()}
    grid = Fraction(1, p**m)
    keybound = None if mu.degree is None else mu.degree * p**m
    prec = min(f.prec, mu.prec)
    out_prec = prec
    total = 0
    mod = p**prec
    for k, b in fk.items():
        if keybound is None or k < keybound:
            a = mud.coeffs.get(k, 0)
            if a:
                total = (total + b * a) % mod
        else:
            # stored function coefficient against an unknown measure digit
            out_prec = min(out_prec, vp_int(b, p))
    if not f.exact_tail:
        for k, a in mud.coeffs.items():
            if k not in fk:
                out_prec = min(
                    out_prec,
                    f.decay_floor_beyond(k * grid) + vp_int(a, p) + mu.shift,
                )
        if mu.degree is not None:
            out_prec = min(out_prec, f.decay_floor_beyond(mu.degree))
    if out_prec < 1:
        raise UncertifiedTailError("boxes do not jointly certify the pairing tail")
    value = PadicScalar(p, mu.shift, total, prec)
    return value.truncate(min(out_prec, value.abs_bound))


def forward_transform(mu: AinfElt) -> dict:
    """Fourier coefficients q -> (x choose q)-integral of a stored S-series.

    For a measure already stored as an S-series this is coefficient
    extraction (the expansion is unique); the result maps SExponents to
    scalars at the box precision.
    """
    out = {}
    for q, c in mu.items_sexp():
        out[q] = PadicScalar(mu.p, mu.shift, c, mu.prec)
    return out


def forward_transform_diracs(p, combo, qs, prec) -> dict:
    """Fourier coefficients of a finite Dirac combination Σ c_i Δ(s_i).

    combo is a list of (c_i, s_i) with integer weights and PadicScalar
    (or Fraction) points; the coefficient at q is Σ c_i (s_i choose q),
    each computed through the generalized binomial at the target
    precision.
    """
    out = {}
    points = []
    for c, s in combo:
        if not isinstance(s, PadicScalar):
            s = PadicScalar.from_fraction(p, Fraction(s), prec + 24)
        points.append((c, s))
    for q in qs:
        q = SExponent.from_fraction(p, q) if not isinstance(q, SExponent) else q
        acc = PadicScalar.zero(p, prec)
        for c, s in points:
            acc = acc + gen_binomial(s, q, prec) * c
        out[q] = acc
    return out


def eval_unif(f: UnifFn, x: PadicScalar, target_prec=None) -> PadicScalar:
    """Evaluate Σ_q b_q (x choose q) at a point of Q_p.

    Stored terms go through the generalized binomial; omitted terms are
    bounded by the decay certificate (the basis functions are bounded by
    1 everywhere, and sharper bounds from the valuation inequality can be
    folded into the certificate by the caller).
    """
    if x.p != f.p:
        raise PrimeMismatch("argument prime differs")
    p = f.p
    target = f.prec if target_prec is None else min(target_prec, f.prec)
    floor = f.decay_floor_beyond(Fraction(0)) if not f.exact_tail else _INF
    out_prec = min(target, floor if floor is not _INF else target)
    if out_prec < 1:
        raise UncertifiedTailError("decay certificate certifies no digits")
    acc = PadicScalar.zero(p, out_prec)
    for q, b in f.items_sexp():
        basis_val = gen_binomial(x, q, out_prec)
        acc = acc + basis_val * b
    return acc.truncate(min(out_prec, acc.abs_bound))


def pullback_rescale(f: UnifFn) -> UnifFn:
    """The pullback (x -> f(px)) on uniform functions.

    Adjoint to the measure pushforward Tt^q -> Tt^(pq): pairing the
    pullback against Tt^(q') equals pairing f against Tt^(p q'), so the
    coefficient map contracts exponents, b'_(q') = b_(p q').  Exponent
    keys are kept and the depth grows by one, which realizes q -> q/p.
    """
    cert = None
    if not f.exact_tail:
        cert = [(t / f.p, fl) for t, fl in f.decay_cert]
    return UnifFn(
        f.p, f.prec, f.depth + 1, dict(f.coeffs),
        decay_cert=cert, exact_tail=f.exact_tail,
    )

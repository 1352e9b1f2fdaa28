"""Computable divisible-group backends: Q, the Pruefer groups Z(p^infinity), Q/Z.

Elements are exact: rationals are ``fractions.Fraction``; a Pruefer element is
a reduced fraction a/p^n modulo 1; a Q/Z element is a reduced fraction in
[0, 1). Multiplication endomorphisms on these backends admit exact preimage
solving, so witness strings are built with real elements rather than symbols.

Verdicts here come from the backends' specialized structure (local
quasi-periodicity, divisibility, injectivity), not from the lattice engine;
each Infinite verdict can carry a constructed witness family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, UnsupportedBackend, VerdictMismatch
from .strings import (
    INFINITE,
    ZERO,
    Disjointness,
    StringPrefix,
    Verdict,
    WitnessFamily,
    build_fan_terms,
    build_garland,
    null_exponent,
    verify_distinct,
    verify_relation,
)


def _is_prime(n: int) -> bool:
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


@dataclass(frozen=True)
class RationalElement:
    """Just a tagged Fraction; kept as a named type for the wire format."""

    value: Fraction

    def __add__(self, other):
        return RationalElement(self.value + other.value)

    def __neg__(self):
        return RationalElement(-self.value)

    def __sub__(self, other):
        return RationalElement(self.value - other.value)

    def scale(self, m: int):
        return RationalElement(self.value * m)

    @property
    def is_zero(self):
        return self.value == 0

    def order(self):
        return 1 if self.value == 0 else None

    def to_json(self):
        return {"q": f"{self.value.numerator}/{self.value.denominator}"}


@dataclass(frozen=True)
class PruferElement:
    """a / p^n modulo 1 with 0 <= a < p^n and p not dividing a unless a = 0."""

    p: int
    num: int
    exp: int

    @staticmethod
    def make(p: int, num: int, exp: int) -> PruferElement:
        if not _is_prime(p):
            raise InputError("prufer.p", f"{p} is not prime")
        mod = p ** exp
        num %= mod
        while exp > 0 and num % p == 0:
            num //= p
            exp -= 1
        if num == 0:
            exp = 0
        return PruferElement(p, num, exp)

    @staticmethod
    def c(p: int, n: int) -> PruferElement:
        """The standard generator 1/p^n."""
        return PruferElement.make(p, 1 if n else 0, n)

    def __add__(self, other: PruferElement):
        assert self.p == other.p
        e = max(self.exp, other.exp)
        a = self.num * self.p ** (e - self.exp) + other.num * self.p ** (e - other.exp)
        return PruferElement.make(self.p, a, e)

    def __neg__(self):
        return PruferElement.make(self.p, -self.num, self.exp)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, m: int):
        return PruferElement.make(self.p, self.num * m, self.exp)

    @property
    def is_zero(self):
        return self.num == 0

    def order(self) -> int:
        return self.p ** self.exp

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.p ** self.exp)

    def to_json(self):
        return {"prufer": {"p": self.p, "a": self.num, "n": self.exp}}


@dataclass(frozen=True)
class ModOneElement:
    """A reduced fraction a/b with 0 <= a/b < 1, read modulo 1."""

    value: Fraction

    @staticmethod
    def make(value: Fraction) -> ModOneElement:
        return ModOneElement(value - (value.numerator // value.denominator))

    def __add__(self, other):
        return ModOneElement.make(self.value + other.value)

    def __neg__(self):
        return ModOneElement.make(-self.value)

    def __sub__(self, other):
        return ModOneElement.make(self.value - other.value)

    def scale(self, m: int):
        return ModOneElement.make(self.value * m)

    @property
    def is_zero(self):
        return self.value == 0

    def order(self) -> int:
        return self.value.denominator

    def to_json(self):
        return {"modone": f"{self.value.numerator}/{self.value.denominator}"}


@dataclass(frozen=True)
class MulEndo:
    """Multiplication map on one backend: by a rational on Q, an integer otherwise."""

    backend: str  # "q" | "prufer" | "qmodz"
    multiplier: Fraction | int
    p: int | None = None  # backend prime for "prufer"

    @staticmethod
    def on_q(r) -> MulEndo:
        return MulEndo("q", Fraction(r))

    @staticmethod
    def on_prufer(p: int, m: int) -> MulEndo:
        if not _is_prime(p):
            raise InputError("backend", f"{p} is not prime")
        return MulEndo("prufer", int(m), p)

    @staticmethod
    def on_qmodz(m: int) -> MulEndo:
        return MulEndo("qmodz", int(m))

    def zero(self):
        if self.backend == "q":
            return RationalElement(Fraction(0))
        if self.backend == "prufer":
            return PruferElement.make(self.p, 0, 0)
        if self.backend == "qmodz":
            return ModOneElement.make(Fraction(0))
        raise UnsupportedBackend(self.backend)

    def apply(self, x):
        if self.backend == "q":
            return RationalElement(x.value * self.multiplier)
        if self.backend == "prufer":
            return x.scale(self.multiplier)
        if self.backend == "qmodz":
            return x.scale(self.multiplier)
        raise UnsupportedBackend(self.backend)


def backend_arithmetic(op: str, *args):
    """Add | Neg | Apply | Order on one backend's values."""
    if op == "add":
        a, b = args
        if type(a) is not type(b) or (isinstance(a, PruferElement) and a.p != b.p):
            raise InputError("args", "mixed backends in arithmetic")
        return a + b
    if op == "neg":
        return -args[0]
    if op == "apply":
        endo, x = args
        return endo.apply(x)
    if op == "order":
        return args[0].order()
    raise InputError("op", f"unknown arithmetic op {op!r}")


def mul_preimage(endo: MulEndo, b):
    """One x with endo(x) = b, or None. Deterministic branch choices.

    Q: exact division. Pruefer: modular inverse on the unit part, smallest
    non-negative numerator among the p^v lifts. Q/Z: componentwise over the
    primary decomposition, recombined.
    """
    m = endo.multiplier
    if m == 0:
        return None
    if endo.backend == "q":
        return RationalElement(b.value / m)
    if endo.backend == "prufer":
        p = endo.p
        v = 0
        mm = abs(int(m))
        while mm % p == 0:
            mm //= p
            v += 1
        unit = int(m) // (p ** v)
        modulus = p ** b.exp
        inv = pow(unit % modulus if modulus > 1 else 0, -1, modulus) if modulus > 1 else 0
        c0 = (inv * b.num) % modulus if modulus > 1 else 0
        x = PruferElement.make(p, c0, b.exp + v)
        assert endo.apply(x) == b, "prufer preimage post-check failed"
        return x
    if endo.backend == "qmodz":
        d = b.value.denominator
        a = b.value.numerator
        total = ModOneElement.make(Fraction(0))
        rest = d
        f = 2
        while rest > 1:
            if rest % f == 0:
                pe = 1
                while rest % f == 0:
                    rest //= f
                    pe *= f
                # CRT component a * (d/pe)^{-1} mod pe over denominator pe
                co = (a * pow(d // pe, -1, pe)) % pe
                comp = PruferElement.make(f, co, _valuation_exp(pe, f))
                pre = mul_preimage(MulEndo.on_prufer(f, int(m)), comp)
                total = total + ModOneElement.make(pre.as_fraction())
            f += 1
        assert endo.apply(total) == b, "qmodz preimage post-check failed"
        return total
    raise UnsupportedBackend(endo.backend)


def _valuation_exp(pe: int, p: int) -> int:
    n = 0
    while pe > 1:
        pe //= p
        n += 1
    return n


def backward_string(endo: MulEndo, x0, n: int) -> StringPrefix:
    """x0..x_n by iterated exact preimage, verified by application."""
    terms = [x0]
    for _ in range(n):
        nxt = mul_preimage(endo, terms[-1])
        assert nxt is not None
        terms.append(nxt)
    assert verify_relation(terms, endo.apply)
    return StringPrefix(tuple(terms), True, verify_distinct(terms), ("plain",))


def concrete_string_numbers(endo: MulEndo, witnesses: bool = False,
                            count: int = 5, length: int = 20):
    """(s, ns, s0) for a multiplication map on Q, Z(p^infinity) or Q/Z."""
    m = endo.multiplier
    if endo.backend == "q":
        if m in (0, 1, -1):
            vals = (ZERO, ZERO, ZERO)
            basis = ("scalar-quasi-periodic", "scalar-quasi-periodic",
                     "injective-multiplication")
        else:
            vals = (INFINITE, INFINITE, ZERO)
            basis = ("rational-prime-fan", "rational-prime-fan", "injective-multiplication")
    elif endo.backend == "prufer":
        if m != 0 and int(m) % endo.p == 0:
            vals = (INFINITE, ZERO, INFINITE)
            basis = ("divisible-null-garland", "locally-quasi-periodic-torsion",
                     "divisible-null-garland")
        else:
            vals = (ZERO, ZERO, ZERO)
            basis = ("coprime-locally-periodic", "coprime-locally-periodic",
                     "coprime-locally-periodic")
    elif endo.backend == "qmodz":
        if m not in (0, 1, -1):
            vals = (INFINITE, ZERO, INFINITE)
            basis = ("divisible-null-garland", "locally-quasi-periodic-torsion",
                     "divisible-null-garland")
        else:
            vals = (ZERO, ZERO, ZERO)
            basis = ("scalar-quasi-periodic", "scalar-quasi-periodic",
                     "scalar-quasi-periodic")
    else:
        raise UnsupportedBackend(endo.backend)
    fams = (None, None, None)
    if witnesses:
        fams = tuple(
            concrete_witnesses(endo, kind, count, length) if v == INFINITE else None
            for kind, v in zip(("s", "ns", "s0"), vals))
    return (Verdict("s", vals[0], basis[0], fams[0]),
            Verdict("ns", vals[1], basis[1], fams[1]),
            Verdict("s0", vals[2], basis[2], fams[2]))


def concrete_witnesses(endo: MulEndo, kind: str, count: int, length: int) -> WitnessFamily:
    """Element-level witness family for an Infinite backend verdict."""
    s, ns, s0 = concrete_string_numbers(endo)
    want = {"s": s, "ns": ns, "s0": s0}[kind]
    if not want.is_infinite:
        raise VerdictMismatch(f"{kind} verdict is Zero on this backend")
    if endo.backend == "q":
        # the hyperbola string 1/r^n with a fan of primes coprime to r
        r = Fraction(endo.multiplier)
        base = backward_string(endo, RationalElement(Fraction(1)), length)
        primes = []
        q = 2
        while len(primes) < count:
            if _is_prime(q) and r.numerator % q and r.denominator % q:
                primes.append(q)
            q += 1
        ev = Disjointness(True, True, "prime-fan-coprime",
                          tuple(f"coprime-to-{r.numerator}/{r.denominator}-{q}" for q in primes))
        fam = build_fan_terms(base, primes, length, lambda t, a: t.scale(a), endo.apply, ev)
        strings = tuple(StringPrefix(p.terms, True, True, ("nonsingular",))
                        for p in fam.strings)
        return WitnessFamily(strings, "fan", fam.evidence, fam.multipliers)
    if endo.backend == "prufer":
        x0 = PruferElement.c(endo.p, 1)
        base = backward_string(endo, x0, length + count)
        k = null_exponent(base.terms[0], endo.apply, endo.zero(), 8)
        assert k is not None
        base = StringPrefix(base.terms, True, True, ("null", k))
        return build_garland(base, count, length, endo.apply, "plain",
                             zero=endo.zero(), null_horizon=length + count + 4)
    if endo.backend == "qmodz":
        # work inside the p-primary component for the smallest prime p | m
        m = abs(int(endo.multiplier))
        p = next(q for q in range(2, m + 1) if m % q == 0 and _is_prime(q))
        inner = MulEndo.on_prufer(p, int(endo.multiplier))
        fam = concrete_witnesses(inner, kind, count, length)
        lift = lambda t: ModOneElement.make(t.as_fraction())
        strings = tuple(
            StringPrefix(tuple(lift(t) for t in s.terms), True, True, s.kind)
            for s in fam.strings)
        for s in strings:
            assert verify_relation(s.terms, endo.apply)
            assert verify_distinct(s.terms)
        return WitnessFamily(strings, fam.strategy, fam.evidence, fam.multipliers)
    raise UnsupportedBackend(endo.backend)


def element_from_json(obj):
    if "q" in obj:
        num, den = obj["q"].split("/")
        return RationalElement(Fraction(int(num), int(den)))
    if "prufer" in obj:
        o = obj["prufer"]
        return PruferElement.make(int(o["p"]), int(o["a"]), int(o["n"]))
    if "modone" in obj:
        num, den = obj["modone"].split("/")
        return ModOneElement.make(Fraction(int(num), int(den)))
    raise InputError("element", f"unknown backend element {obj!r}")


def backend_from_selector(selector: str, multiplier) -> MulEndo:
    """CLI selector: q | prufer:p | qmodz."""
    if selector == "q":
        return MulEndo.on_q(Fraction(multiplier))
    if selector.startswith("prufer:"):
        return MulEndo.on_prufer(int(selector.split(":", 1)[1]), int(multiplier))
    if selector == "qmodz":
        return MulEndo.on_qmodz(int(multiplier))
    raise UnsupportedBackend(selector)

"""Steenrod squares on F2[x1..xk], the Kameko maps and substitution maps."""

from dataclasses import dataclass
from functools import lru_cache

from .core_algebra import mono_mul, poly_mul


def submasks(a, limit):
    """Bit-subsets b of a with b <= limit, i.e. the b with C(a, b) odd."""
    b = a
    while True:
        if b <= limit:
            yield b
        if b == 0:
            return
        b = (b - 1) & a


def sq_terms(i, x):
    """Uncached Cartan expansion of Sq^i(x) as a set; no degree checks."""
    k = len(x)
    tail = [0] * (k + 1)
    for j in range(k - 1, -1, -1):
        tail[j] = tail[j + 1] + x[j]
    out = set()
    cur = list(x)

    def rec(j, rest):
        if j == k - 1:
            a = x[j]
            if rest & ~a == 0:
                cur[j] = a + rest
                out.symmetric_difference_update((tuple(cur),))
                cur[j] = a
            return
        a = x[j]
        floor = rest - tail[j + 1]
        for b in submasks(a, rest):
            if b < floor:
                continue
            cur[j] = a + b
            rec(j + 1, rest - b)
        cur[j] = a

    rec(0, i)
    return out


@lru_cache(maxsize=1 << 14)
def _sq_cached(i, x):
    return frozenset(sq_terms(i, x))


def sq_monomial(i, x):
    """Sq^i(x) by the Cartan formula; binomials mod 2 via Lucas' theorem."""
    x = tuple(x)
    if i == 0:
        return frozenset((x,))
    if i > sum(x) or not x:
        return frozenset()
    return _sq_cached(i, x)


def sq(i, p):
    out = set()
    for x in p:
        out ^= sq_monomial(i, x)
    return frozenset(out)


def sq_seq(ops, p):
    """Apply Sq^{ops[-1]} first, then the others right to left."""
    for i in reversed(ops):
        p = sq(i, p)
    return p


# -- Kameko ----------------------------------------------------------------

def kameko_phi(x):
    """y when x = x1...xk y^2, else 0."""
    if all(a & 1 for a in x):
        return frozenset((tuple(a >> 1 for a in x),))
    return frozenset()


def kameko_phi_poly(p):
    out = set()
    for x in p:
        out ^= kameko_phi(x)
    return frozenset(out)


def kameko_up(x):
    return tuple(2 * a + 1 for a in x)


# -- substitution maps ----------------------------------------------------

@dataclass(frozen=True)
class SubMapSpec:
    """One of f_i, p_(i;I) or theta_J, with its source and target arity.

    Indices are 1-based as in the usual notation.
    """

    kind: str
    k: int
    i: int = 0
    I: tuple = ()
    J: tuple = ()

    def __post_init__(self):
        k = self.k
        if self.kind == "f":
            if not 1 <= self.i <= k:
                raise ValueError(f"f_i needs 1 <= i <= {k}, got {self.i}")
        elif self.kind == "p":
            seq = (self.i,) + tuple(self.I)
            if not (1 <= self.i and all(a < b for a, b in zip(seq, seq[1:]))
                    and seq[-1] <= k and len(self.I) < k):
                raise ValueError(f"bad (i;I) = ({self.i};{self.I}) for k = {k}")
        elif self.kind == "theta":
            J = tuple(self.J)
            if not J or not all(a < b for a, b in zip(J, J[1:])) or J[0] < 1 or J[-1] > k:
                raise ValueError(f"theta_J needs increasing J in 1..{k}, got {J}")
        else:
            raise ValueError(f"unknown map kind {self.kind!r}")

    @classmethod
    def f(cls, i, k):
        return cls("f", k, i=i)

    @classmethod
    def p(cls, i, I, k):
        return cls("p", k, i=i, I=tuple(I))

    @classmethod
    def theta(cls, J, k):
        return cls("theta", k, J=tuple(J))

    @property
    def source(self):
        return {"f": self.k - 1, "p": self.k, "theta": len(self.J)}[self.kind]

    @property
    def target(self):
        return {"f": self.k, "p": self.k - 1, "theta": self.k}[self.kind]

    def __str__(self):
        if self.kind == "f":
            return f"f_{self.i}"
        if self.kind == "p":
            return f"p_({self.i};{','.join(map(str, self.I))})"
        return f"theta_({','.join(map(str, self.J))})"


def _unit(m, j):
    e = [0] * m
    e[j] = 1
    return tuple(e)


def _variable_images(s):
    """Image of each source variable as a polynomial in the target."""
    m = s.target
    if s.kind == "f":
        return [frozenset((_unit(m, j if j < s.i - 1 else j + 1),)) for j in range(s.source)]
    if s.kind == "theta":
        return [frozenset((_unit(m, j - 1),)) for j in s.J]
    imgs = []
    for j in range(1, s.k + 1):
        if j < s.i:
            imgs.append(frozenset((_unit(m, j - 1),)))
        elif j == s.i:
            imgs.append(frozenset(_unit(m, t - 2) for t in s.I))
        else:
            imgs.append(frozenset((_unit(m, j - 2),)))
    return imgs


def frobenius(p, e):
    """p^(2^e): squaring is additive over F2."""
    return frozenset(tuple(a << e for a in x) for x in p)


def poly_pow(p, a):
    """p^a by binary powering with cancellation; p must be nonempty when a = 0."""
    out = frozenset((tuple([0] * _arity(p)),))
    e = 0
    while a:
        if a & 1:
            out = poly_mul(out, frobenius(p, e))
        a >>= 1
        e += 1
    return out


def _arity(p):
    for x in p:
        return len(x)
    return 0


def apply_submap(s, p):
    """Extend the variable substitution s to an algebra map and apply it to p."""
    imgs = _variable_images(s)
    m = s.target
    one = tuple([0] * m)
    out = set()
    for x in p:
        if len(x) != s.source:
            raise ValueError(f"{s} expects arity {s.source}, got {len(x)}")
        term = frozenset((one,))
        for a, img in zip(x, imgs):
            if not a:
                continue
            if len(img) == 1:
                (v,) = img
                term = frozenset(mono_mul(t, tuple(c * a for c in v)) for t in term)
            else:
                term = poly_mul(term, poly_pow(img, a)) if img else frozenset()
            if not term:
                break
        out ^= term
    return frozenset(out)

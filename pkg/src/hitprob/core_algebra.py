"""Monomials, weight vectors, the monomial order and spikes.

A monomial in F2[x1..xk] is a plain tuple of non-negative exponents and a
polynomial is a frozenset of such tuples (F2 coefficients are implicit, so
addition is symmetric difference).
"""

from functools import lru_cache
from itertools import combinations, product
from math import comb

from .config import check_size


def alpha(n):
    """Number of ones in the binary expansion of n."""
    return bin(n).count("1")


@lru_cache(maxsize=None)
def mu(n):
    """Smallest m with alpha(n + m) <= m."""
    m = 0
    while alpha(n + m) > m:
        m += 1
    return m


def beta(n):
    return alpha(n + mu(n))


# -- monomials and polynomials ---------------------------------------------

def degree(x):
    return sum(x)


def poly(*terms):
    """Polynomial from monomials, cancelling repeated terms in pairs."""
    out = set()
    for t in terms:
        out ^= {tuple(t)}
    return frozenset(out)


def poly_add(*ps):
    out = set()
    for p in ps:
        out ^= set(p)
    return frozenset(out)


def mono_mul(x, y):
    return tuple(a + b for a, b in zip(x, y))


def poly_mul(p, q):
    out = set()
    for x in p:
        for y in q:
            out ^= {mono_mul(x, y)}
    return frozenset(out)


def is_positive(x):
    """True when every variable occurs, i.e. x lies in P_k^+."""
    return all(x)


def support(x):
    return tuple(j for j, a in enumerate(x) if a)


# -- weight vectors ---------------------------------------------------------

def trim(w):
    w = list(w)
    while w and w[-1] == 0:
        w.pop()
    return tuple(w)


def weight_vector(x):
    """omega_i = number of exponents with bit i-1 set, trailing zeros trimmed."""
    w = []
    i = 0
    top = max(x, default=0)
    while top >> i:
        w.append(sum((a >> i) & 1 for a in x))
        i += 1
    return trim(w)


def weight_degree(w):
    return sum(c << i for i, c in enumerate(w))


def weight_length(w):
    return len(trim(w))


def concat(*ws):
    """omega|eta: concatenation after trimming each piece."""
    out = ()
    for w in ws:
        out += trim(w)
    return out


def repeat(a, b):
    """(a)|^b."""
    return (a,) * b


def _sign(a, b):
    return (a > b) - (a < b)


def cmp_weight(w, v):
    """Left-lex comparison with zero padding; returns -1, 0 or 1."""
    w, v = trim(w), trim(v)
    # trimmed tuples compare exactly like zero-padded ones
    return _sign(w, v)


def monomial_key(x):
    """Sort key realizing the monomial order on a fixed degree."""
    return (weight_vector(x), tuple(x))


def cmp_monomial(x, y):
    if len(x) != len(y):
        raise ValueError(f"arity mismatch: {len(x)} vs {len(y)}")
    if sum(x) != sum(y):
        raise ValueError(f"degree mismatch: {sum(x)} vs {sum(y)}")
    return _sign(monomial_key(x), monomial_key(y))


def mono_lt(x, y):
    return cmp_monomial(x, y) < 0


# -- spikes -----------------------------------------------------------------

def is_spike(x):
    return all(a & (a + 1) == 0 for a in x)


def spike_partition(n):
    """Exponents of the minimal spike of degree n, largest first."""
    r = mu(n)
    parts = []
    rest = n
    for left in range(r, 0, -1):
        # greedily take the largest 2^d - 1 that leaves a sum of left-1 parts
        d = rest.bit_length()
        while d > 0:
            p = (1 << d) - 1
            if p <= rest and mu(rest - p) <= left - 1 and (left > 1 or p == rest):
                break
            d -= 1
        parts.append(p)
        rest -= p
    if rest:
        raise ValueError(f"no spike decomposition of {n}")
    return parts


class NoSpikeError(ValueError):
    pass


def minimal_spike(n, k):
    if mu(n) > k:
        raise NoSpikeError(f"mu({n}) = {mu(n)} > {k}: no spike of degree {n}")
    parts = spike_partition(n)
    return tuple(parts) + (0,) * (k - len(parts))


# -- enumeration ------------------------------------------------------------

def compositions(n, k, positive=False):
    """All exponent tuples of length k summing to n, in lex order."""
    lo = 1 if positive else 0
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        if n >= lo:
            yield (n,)
        return
    for a in range(lo, n - lo * (k - 1) + 1):
        for rest in compositions(n - a, k - 1, positive):
            yield (a,) + rest


def count_degree(k, n, positive=False):
    if k == 0:
        return int(n == 0)
    if positive:
        return comb(n - 1, k - 1) if n >= k else 0
    return comb(n + k - 1, k - 1)


def enumerate_degree(k, n, positive=False):
    """All monomials of degree n in k variables, ascending in the monomial order."""
    size = count_degree(k, n, positive)
    check_size(size * (56 + 36 * k), f"monomials of degree {n} in {k} variables")
    return sorted(compositions(n, k, positive), key=monomial_key)


def enumerate_weight_layer(k, w):
    """All monomials in k variables whose weight vector is exactly w, sorted."""
    w = trim(w)
    if any(c > k for c in w):
        return []
    levels = [list(combinations(range(k), c)) for c in w]
    out = []
    for choice in product(*levels):
        x = [0] * k
        for t, js in enumerate(choice):
            for j in js:
                x[j] |= 1 << t
        out.append(tuple(x))
    return sorted(out, key=monomial_key)


def weight_vectors_of_degree(n, k):
    """All trimmed weight vectors w with entries <= k and deg w = n."""
    out = []

    def rec(rest, i, acc):
        if rest == 0:
            out.append(trim(acc))
            return
        step = 1 << i
        for c in range(min(k, rest // step) + 1):
            r = rest - c * step
            # remaining bits must be reachable by higher levels
            if r % (step << 1) == 0:
                rec(r, i + 1, acc + [c])

    rec(n, 0, [])
    return sorted(set(out))


def arity(p):
    for x in p:
        return len(x)
    return None

"""Hit subspaces, QP dimensions and admissible bases.

Every Sq^i maps a monomial to monomials with exactly the same support, so
the hit space splits as a direct sum over supports J of copies of the hit
space of P_r^+ (r = |J|).  Relabeling by the increasing embedding theta_J
preserves the monomial order, hence the pivots over J are the embedded
pivots of the positive block.  Only the blocks P_r^+ are ever reduced.
"""

from collections import Counter, OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
import threading

from . import config
from .core_algebra import (compositions, count_degree, monomial_key, mu,
                           support, weight_vector)
from .linalg_f2 import (DegreeBasis, F2RowSpace, coordinate_space, intersection_dim,
                        load_rowspace, map_kernel_dim, save_rowspace)
from .steenrod import kameko_phi_poly, kameko_up, sq_terms

INF = 1 << 30


def compress(x):
    """Drop zero exponents: the positive-block monomial and its support."""
    J = support(x)
    return tuple(x[j] for j in J), J


def embed(y, J, k):
    x = [0] * k
    for a, j in zip(y, J):
        x[j] = a
    return tuple(x)


# -- positive blocks ----------------------------------------------------------

def _block_vectors(args):
    r, n, u, index = args
    out = []
    for m in compositions(n - (1 << u), r, positive=True):
        v = 0
        for t in sq_terms(1 << u, m):
            v ^= 1 << index[t]
        if v:
            out.append(v)
    return out


def _generators(basis, r, n, top):
    """Bit vectors of Sq^(2^u)(m), m in P_r^+, for 2^u <= n and u < top."""
    us = [u for u in range(n.bit_length()) if (1 << u) <= n and u < top]
    jobs = [(r, n, u, basis.index) for u in us]
    threads = config.current().threads
    if threads > 1 and len(basis) > 4096:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for vs in ex.map(_block_vectors, jobs):
                yield from vs
    else:
        for job in jobs:
            yield from _block_vectors(job)


_block_cache = OrderedDict()
_block_lock = threading.Lock()
_BLOCK_CACHE_SIZE = 12


def block_space(r, n, top=INF):
    """Reduced span of Sq^(2^u)(P_r^+), u < top, in degree n (over P_r^+)."""
    top = min(top, max(n.bit_length(), 1))
    key = (r, n, top)
    with _block_lock:
        S = _block_cache.get(key)
        if S is not None:
            _block_cache.move_to_end(key)
            return S
    basis = DegreeBasis(r, n, positive=True)
    cfg = config.current()
    path = None
    if cfg.use_cache and cfg.cache_dir is not None:
        path = cfg.cache_dir / f"block_r{r}_n{n}_t{top}.hprs"
        S = load_rowspace(path, basis)
    if S is None:
        S = F2RowSpace(basis)
        S.extend(_generators(basis, r, n, top))
        S.canonical()
        if path is not None:
            save_rowspace(S, path)
    with _block_lock:
        _block_cache[key] = S
        while len(_block_cache) > _BLOCK_CACHE_SIZE:
            _block_cache.popitem(last=False)
    return S


def clear_caches():
    with _block_lock:
        _block_cache.clear()
    _qp_memo.clear()


def block_admissible(r, n):
    S = block_space(r, n)
    return [x for i, x in enumerate(S.basis.monomials) if i not in S.rows]


def block_qp_dim(r, n):
    S = block_space(r, n)
    return len(S.basis) - S.rank()


# -- hit spaces -----------------------------------------------------------------

class HitSpace:
    """The hit subspace of (P_k)_n, stored as its positive blocks."""

    def __init__(self, k, n, top=INF):
        self.k, self.n, self.top = k, n, top
        self.blocks = {r: block_space(r, n, top)
                       for r in range(0, min(k, n) + 1) if count_degree(r, n, True)}

    def _supports(self):
        for r, S in self.blocks.items():
            for J in combinations(range(self.k), r):
                yield r, J, S

    def rank(self):
        return sum(comb(self.k, r) * S.rank() for r, S in self.blocks.items())

    def dim_total(self):
        return count_degree(self.k, self.n)

    def qp_dim(self):
        return self.dim_total() - self.rank()

    def admissible(self):
        out = []
        for r, J, S in self._supports():
            for i, y in enumerate(S.basis.monomials):
                if i not in S.rows:
                    out.append(embed(y, J, self.k))
        return sorted(out, key=monomial_key)

    def leading_set(self):
        out = set()
        for r, J, S in self._supports():
            for p in S.rows:
                out.add(embed(S.basis.monomials[p], J, self.k))
        return out

    def _split(self, p):
        parts = {}
        for x in p:
            if len(x) != self.k or sum(x) != self.n:
                raise ValueError(f"{x} is not in degree {self.n} of P_{self.k}")
            y, J = compress(x)
            parts.setdefault(J, set()).symmetric_difference_update((y,))
        return parts

    def reduce(self, p):
        """Normal form modulo the space: a sum of admissible monomials."""
        out = []
        for J, ys in self._split(p).items():
            S = self.blocks[len(J)]
            v = S.reduce(S.basis.vector(ys))
            out.extend(embed(y, J, self.k) for y in S.basis.terms(v))
        return frozenset(out)

    def contains(self, p):
        return not self.reduce(p)

    def is_leading(self, x):
        y, J = compress(x)
        S = self.blocks[len(J)]
        return S.basis.index[y] in S.rows

    def row_space(self):
        """Materialize the space over the full degree basis."""
        basis = DegreeBasis(self.k, self.n)
        R = F2RowSpace(basis)
        for r, J, S in self._supports():
            for row in S.canonical():
                R.extend([basis.vector(embed(y, J, self.k) for y in S.basis.terms(row))])
        return R


def hit_space(k, n):
    return HitSpace(k, n)


def hit_space_direct(k, n):
    """Reduce all Sq^(2^u)(m) over the full basis, without the block split."""
    basis = DegreeBasis(k, n)
    S = F2RowSpace(basis)
    idx = basis.index
    u = 0
    while (1 << u) <= n:
        for m in compositions(n - (1 << u), k):
            v = 0
            for t in sq_terms(1 << u, m):
                v ^= 1 << idx[t]
            S.extend([v])
        u += 1
    S.canonical()
    return S


_qp_memo = {}


def qp_dim(k, n):
    key = (k, n)
    if key not in _qp_memo:
        _qp_memo[key] = sum(comb(k, r) * block_qp_dim(r, n)
                            for r in range(0, min(k, n) + 1) if count_degree(r, n, True))
    return _qp_memo[key]


# -- admissible bases and layers ---------------------------------------------------

@dataclass
class AdmissibleBasis:
    k: int
    n: int
    monomials: list = field(default_factory=list)

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __contains__(self, x):
        return tuple(x) in set(self.monomials)

    def by_weight(self):
        out = {}
        for x in self.monomials:
            out.setdefault(weight_vector(x), []).append(x)
        return out

    def layer(self, w):
        w = tuple(w)
        return [x for x in self.monomials if weight_vector(x) == w]


def admissible_basis(k, n):
    return AdmissibleBasis(k, n, HitSpace(k, n).admissible())


def split_zero_plus(b):
    """(B^0, B^+): some exponent zero versus all exponents positive."""
    zero = [x for x in b if not all(x)]
    plus = [x for x in b if all(x)]
    return zero, plus


def _block_layers_filtration(r, n):
    return Counter(weight_vector(x) for x in block_admissible(r, n))


def _block_layers_quotient(r, n):
    """dim P(w) - dim((H cap P(w)) + P^-(w)) per weight w, on one block."""
    S = block_space(r, n)
    ws = [weight_vector(x) for x in S.basis.monomials]
    out = {}
    lo = 0
    while lo < len(ws):
        hi = lo
        while hi < len(ws) and ws[hi] == ws[lo]:
            hi += 1
        below = coordinate_space(S.basis, range(lo))
        upto = coordinate_space(S.basis, range(hi))
        cap_upto = intersection_dim(upto, S)
        cap_below = intersection_dim(below, S)
        out[ws[lo]] = hi - (cap_upto + lo - cap_below)
        lo = hi
    return out


def layer_dims(k, n, semantics="filtration"):
    """Layer dimensions by weight vector.

    "filtration" counts admissible monomials per weight; "quotient" computes
    dim P(w) - dim((H cap P(w)) + P^-(w)) by intersections; "both" maps each
    weight to the pair.
    """
    if semantics not in ("filtration", "quotient", "both"):
        raise ValueError(f"unknown semantics {semantics!r}")
    rs = [r for r in range(0, min(k, n) + 1) if count_degree(r, n, True)]
    parts = {}
    for sem in ("filtration", "quotient"):
        if semantics in (sem, "both"):
            fn = _block_layers_filtration if sem == "filtration" else _block_layers_quotient
            acc = Counter()
            for r in rs:
                for w, d in fn(r, n).items():
                    acc[w] += comb(k, r) * d
            parts[sem] = {w: d for w, d in sorted(acc.items()) if d or sem == "filtration"}
    if semantics != "both":
        return parts[semantics]
    keys = sorted(set(parts["filtration"]) | {w for w, d in parts["quotient"].items() if d})
    return {w: (parts["filtration"].get(w, 0), parts["quotient"].get(w, 0)) for w in keys}


# -- Kameko -------------------------------------------------------------------

@dataclass
class KamekoReport:
    k: int
    m: int
    domain_dim: int
    target_dim: int
    kernel_dim: int
    is_epi: bool
    is_iso: bool
    iso_expected: bool


def kameko_kernel_dim(k, m):
    """Kernel of [x] -> [phi(x)] from (QP_k)_(2m+k) to (QP_k)_m."""
    n = 2 * m + k
    domain = HitSpace(k, n).admissible()
    H = HitSpace(k, m)
    target = H.row_space()
    rows = []
    for i, x in enumerate(domain):
        img = H.reduce(kameko_phi_poly([x]))
        if img:
            rows.append((i, target.basis.vector(img)))
    kernel = map_kernel_dim(rows, len(domain), target)
    image = len(domain) - kernel
    tdim = H.qp_dim()
    epi = image == tdim
    return KamekoReport(k, m, len(domain), tdim, kernel, epi, epi and kernel == 0,
                        mu(n) == k)


def kameko_right_inverse(k, m):
    """True when phi composed with x -> x1..xk x^2 is the identity on (QP_k)_m."""
    up_space = HitSpace(k, 2 * m + k)
    H = HitSpace(k, m)
    for y in H.admissible():
        nf = up_space.reduce([kameko_up(y)])
        if H.reduce(kameko_phi_poly(nf)) != frozenset((y,)):
            return False
    return True


def is_hit(p):
    p = frozenset(tuple(x) for x in p)
    if not p:
        return True
    ks = {len(x) for x in p}
    ns = {sum(x) for x in p}
    if len(ks) != 1 or len(ns) != 1:
        raise ValueError("is_hit needs a homogeneous polynomial of one arity")
    return HitSpace(ks.pop(), ns.pop()).contains(p)

"""Two-sided bounds for a weight layer of QP_5.

The upper bound filters the weight layer with hit criteria and the strict
catalog; the survivors span the layer.  The lower bound pushes the survivors
through projections p_(i;I) into P_4, takes coordinates on the weight-omega
admissible monomials of P_4 and stacks them: the rank of that matrix counts
classes that are certainly independent.  Equal bounds certify the dimension.
"""

import re
import time
from dataclasses import asdict, dataclass, field
from math import comb

from .config import MemoryGuardError
from .core_algebra import (count_degree, enumerate_weight_layer, trim, weight_degree,
                           weight_vector)
from .corpus import serialize_weight
from .filters import CatalogIndex, catalog_filter, load_catalog, walker_wood_hit
from .hit_core import HitSpace, block_admissible
from .linalg_f2 import F2RowSpace
from .steenrod import SubMapSpec, apply_submap

DEFAULT_MAPS = ((1, (2,)), (1, (3,)), (4, (5,)), (2, (3,)),
                (1, (4,)), (1, (5,)), (2, (4,)), (2, (5,)))

# Widest P_4^+ block the lower bound will row-reduce (degree 62 has 35990).
P4_WIDTH_LIMIT = 60000


def parse_map(text):
    """'(1;2)' or '(1;(2,3))' -> (1, (2,)) / (1, (2, 3))."""
    m = re.fullmatch(r"\s*\(?\s*(\d+)\s*;\s*\(?\s*([\d,\s]+?)\s*\)?\s*\)?\s*", text)
    if not m:
        raise ValueError(f"bad map {text!r}")
    return int(m.group(1)), tuple(int(v) for v in m.group(2).split(",") if v.strip())


def format_map(mp):
    i, I = mp
    return f"({i};{I[0]})" if len(I) == 1 else f"({i};({','.join(map(str, I))}))"


def mothebe_lift(B, d=None, exponent=None):
    """{x_i^(2^d - 1) f_i(x) : x in B, i = 1..k}, deduplicated in listing order.

    `exponent` overrides 2^d - 1 for lifts with a fixed power.
    """
    if exponent is None:
        if d is None or d < 1:
            raise ValueError("mothebe_lift needs d >= 1 or an explicit exponent")
        exponent = (1 << d) - 1
    out, seen = [], set()
    for w in B:
        w = tuple(w)
        for i in range(len(w) + 1):
            x = w[:i] + (exponent,) + w[i:]
            if x not in seen:
                seen.add(x)
                out.append(x)
    return out


def upper_bound_candidates(omega, catalog=None, k=5):
    """Monomials of weight omega that survive Walker-Wood and the catalog windows."""
    omega = trim(omega)
    if any(w > k for w in omega):
        raise ValueError(f"weight {omega} has an entry above {k}")
    layer = [x for x in enumerate_weight_layer(k, omega) if not walker_wood_hit(x)]
    index = catalog if isinstance(catalog, CatalogIndex) else CatalogIndex(
        load_catalog() if catalog is None else catalog)
    return catalog_filter(layer, index)


def _p4_space(n):
    width = count_degree(4, n, positive=True)
    if width > P4_WIDTH_LIMIT:
        raise MemoryGuardError(
            f"P_4 reduction in degree {n} needs a block of width {width} "
            f"(limit {P4_WIDTH_LIMIT})")
    return HitSpace(4, n)


def lower_bound_pmaps(candidates, omega, maps=DEFAULT_MAPS):
    """Rank of the stacked p_(i;I) images on the weight-omega admissibles of P_4."""
    omega = trim(omega)
    cands = [tuple(x) for x in candidates]
    if not cands:
        return 0
    n = weight_degree(omega)
    for x in cands:
        if weight_vector(x) != omega:
            raise ValueError(f"candidate {x} does not have weight {omega}")
    k = len(cands[0])
    H = _p4_space(n)
    specs = [SubMapSpec.p(i, I, k) for i, I in maps]
    coords = {}
    rows = []
    for x in cands:
        v = 0
        for j, s in enumerate(specs):
            for y in H.reduce(apply_submap(s, [x])):
                if weight_vector(y) == omega:
                    pos = coords.setdefault((j, y), len(coords))
                    v ^= 1 << pos
        rows.append(v)
    S = F2RowSpace(max(len(coords), 1))
    S.extend(rows)
    return S.rank()


def zero_part_dim(omega, k=5):
    """Exact sum over r < k of C(k, r) * (weight-omega admissibles of P_r^+)."""
    omega = trim(omega)
    n = weight_degree(omega)
    total = 0
    for r in range(1, k):
        if not count_degree(r, n, positive=True):
            continue
        if r == 4 and count_degree(4, n, positive=True) > P4_WIDTH_LIMIT:
            raise MemoryGuardError(f"P_4^+ in degree {n} is beyond the exact solver")
        total += comb(k, r) * sum(1 for y in block_admissible(r, n) if weight_vector(y) == omega)
    return total


@dataclass
class SandwichReport:
    omega: tuple
    d: int | None
    degree: int
    upper: int
    lower: int | None
    maps: list
    zero_dim: int | None = None
    seconds: float = 0.0
    survivors: list = field(default_factory=list)
    note: str = ""

    @property
    def certified(self):
        return self.lower is not None and self.lower == self.upper

    @property
    def total(self):
        if not self.certified or self.zero_dim is None:
            return None
        return self.zero_dim + self.upper

    def verdict(self):
        if self.certified:
            return f"certified dim QP_5^+{serialize_weight(self.omega)} = {self.upper}"
        if self.lower is None:
            return f"upper bound {self.upper} only ({self.note})"
        return f"gap: {self.lower} <= dim <= {self.upper}"

    def to_json(self):
        """Serializable form; timing is left out so identical runs print identical JSON."""
        d = asdict(self)
        d.pop("seconds")
        d["omega"] = list(self.omega)
        d["survivors"] = [list(x) for x in self.survivors]
        d.update(certified=self.certified, total=self.total, verdict=self.verdict())
        return d


def sandwich_certify(omega, d=None, catalog=None, maps=DEFAULT_MAPS, lower=True):
    """Both bounds for QP_5^+(omega); infeasible lower bounds are reported, not raised."""
    t0 = time.perf_counter()
    omega = trim(omega)
    n = weight_degree(omega)
    plus = [x for x in upper_bound_candidates(omega, catalog) if all(x)]
    low = zero = None
    note = ""
    if lower:
        try:
            low = lower_bound_pmaps(plus, omega, maps)
            zero = zero_part_dim(omega)
        except MemoryGuardError as exc:
            note = str(exc)
    else:
        note = "lower bound skipped"
    return SandwichReport(omega, d, n, len(plus), low, [format_map(m) for m in maps],
                          zero, time.perf_counter() - t0, plus, note)

"""Hit criteria, strict inadmissibility, the strict catalog and certificates.

A monomial w with s = len(weight_vector(w)) is strictly inadmissible when
w = sum(y_j) + sum(Sq^u(h_u)) with every y_j < w and 1 <= u <= 2^s - 1.
If w is strictly inadmissible then so is w * y^(2^s), and z * w^(2^r) stays
inadmissible whenever every exponent of z is below 2^r.  So a candidate X is
discarded as soon as some bit window (X >> r) & (2^s - 1) equals a catalog
instance w of weight length s.
"""

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from itertools import permutations
from pathlib import Path

from .core_algebra import (cmp_weight, degree, minimal_spike, monomial_key, mu,
                           weight_vector)
from .hit_core import block_space, compress
from .steenrod import sq

# -- hit criteria -----------------------------------------------------------------


def singer_hit(x):
    """True when omega(x) is below the weight of the minimal spike (x is hit).

    With mu(deg x) > len(x) there is no spike and every monomial is hit.
    """
    if mu(degree(x)) > len(x):
        return True
    z = minimal_spike(degree(x), len(x))
    return cmp_weight(weight_vector(x), weight_vector(z)) < 0


def walker_wood_hit(x):
    """Some prefix of the dyadic weight sum of x falls below the minimal spike's."""
    if mu(degree(x)) > len(x):
        return True
    z = minimal_spike(degree(x), len(x))
    wx, wz = weight_vector(x), weight_vector(z)
    h = max(len(wx), len(wz))
    sx = sz = 0
    for i in range(h):
        sx += (wx[i] if i < len(wx) else 0) << i
        sz += (wz[i] if i < len(wz) else 0) << i
        if sx < sz:
            return True
    return False


def silverman_hit(x, m):
    """Split x = f * g^(2^m) with exponents of f below 2^m; hit if deg f < (2^m - 1) mu(deg g)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    low = (1 << m) - 1
    f = sum(a & low for a in x)
    g = sum(a >> m for a in x)
    return g > 0 and f < low * mu(g)


def silverman_hit_any(x):
    top = max(x, default=0).bit_length()
    return any(silverman_hit(x, m) for m in range(1, top + 1))


# -- strict inadmissibility --------------------------------------------------------


def strictly_inadmissible(x):
    """Exact decision through the reduced span of Sq^(2^j), j < s, on the support of x.

    Sq^(2^j) for j < s generate every Sq^u with u < 2^s, and squares keep the
    support, so x is strictly inadmissible iff its compressed form is a pivot
    of that block space.  Raises MemoryGuardError when the block is too big.
    """
    x = tuple(x)
    if not any(x):
        return False
    s = len(weight_vector(x))
    y, J = compress(x)
    S = block_space(len(J), degree(x), top=s)
    return S.basis.index[y] in S.rows


# -- the strict catalog ------------------------------------------------------------

LETTERS = "ijtuv"
_FACTOR = re.compile(r"x(\d+|[ijtuv])(?:\^(\d+|\{\d*\}))?")


def parse_pattern(text):
    """'xi^2 xj xt^3' or 'x1^3 x2^5' -> list of (variable, exponent)."""
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _FACTOR.match(text, pos)
        if not m:
            raise ValueError(f"bad catalog pattern {text!r} at {text[pos:]!r}")
        e = m.group(2)
        e = 1 if e is None else int(e.strip("{}") or 1)
        v = m.group(1)
        out.append((int(v) if v.isdigit() else v, e))
        pos = m.end()
    return out


def _parse_symmetry(sym):
    """'fixed' | 'perm5' | 'perm4' | 'perm5(i<j<t)' -> (arity or None, order constraints)."""
    m = re.fullmatch(r"\s*(fixed|perm(\d))\s*(?:\((.*)\))?\s*", sym)
    if not m:
        raise ValueError(f"bad symmetry {sym!r}")
    if m.group(1) == "fixed":
        return None, []
    cons = []
    for chain in (m.group(3) or "").split(","):
        names = [c.strip() for c in chain.split("<") if c.strip()]
        cons += list(zip(names, names[1:]))
    return int(m.group(2)), cons


@dataclass(frozen=True)
class CatalogEntry:
    """A strictly inadmissible pattern with its symmetry scope.

    With `lift` set, the pattern lives in P_4 and the instances are
    x_r^lift * f_r(w) for r = 1..5.
    """

    pattern: str
    symmetry: str = "fixed"
    source: str = ""
    lift: int | None = None

    def _base(self):
        factors = parse_pattern(self.pattern)
        arity, cons = _parse_symmetry(self.symmetry)
        k = 4 if self.lift is not None else 5
        if arity is None:
            x = [0] * k
            for v, e in factors:
                if not isinstance(v, int) or not 1 <= v <= k:
                    raise ValueError(f"fixed pattern {self.pattern!r} needs variables 1..{k}")
                x[v - 1] += e
            return {tuple(x)}
        k = arity
        used = sorted({v for v, _ in factors}, key=LETTERS.index)
        out = set()
        for img in permutations(range(k), len(used)):
            a = dict(zip(used, img))
            if any(a[p] >= a[q] for p, q in cons if p in a and q in a):
                continue
            x = [0] * k
            for v, e in factors:
                x[a[v]] += e
            out.add(tuple(x))
        return out

    def instances(self):
        base = self._base()
        if self.lift is None:
            return base
        out = set()
        for w in base:
            for r in range(5):
                out.add(w[:r] + (self.lift,) + w[r:])
        return out

    def to_json(self):
        d = {"pattern": self.pattern, "symmetry": self.symmetry, "source": self.source}
        if self.lift is not None:
            d["lift"] = self.lift
        return d

    @classmethod
    def from_json(cls, d):
        return cls(d["pattern"], d.get("symmetry", "fixed"), d.get("source", ""), d.get("lift"))


def _data_file(*parts):
    return resources.files("hitprob").joinpath("data", *parts)


def load_catalog(path=None):
    text = Path(path).read_text() if path else _data_file("catalog.json").read_text()
    return [CatalogEntry.from_json(d) for d in json.loads(text)]


def save_catalog(entries, path):
    Path(path).write_text(json.dumps([e.to_json() for e in entries], indent=1) + "\n")


def catalog_instances(catalog):
    """All concrete instances, deduplicated, in a deterministic order."""
    out = set()
    for e in catalog:
        out |= e.instances()
    return sorted(out, key=lambda x: (len(x), degree(x), monomial_key(x)))


class CatalogIndex:
    """Instances grouped by (arity, weight length) for window lookups."""

    def __init__(self, catalog=(), instances=()):
        self.groups = {}
        for w in list(instances) + catalog_instances(catalog):
            w = tuple(w)
            s = len(weight_vector(w))
            if s:
                self.groups.setdefault((len(w), s), set()).add(w)

    def witness(self, x):
        """(r, w) with (x >> r) & (2^s - 1) == w for a catalog w, or None."""
        top = max(x, default=0).bit_length()
        for (k, s), ws in sorted(self.groups.items()):
            if k != len(x):
                continue
            mask = (1 << s) - 1
            for r in range(0, max(top - s, 0) + 1):
                win = tuple((a >> r) & mask for a in x)
                if win in ws:
                    return r, win
        return None


def catalog_filter(candidates, catalog):
    """Drop candidates that contain a catalog instance as a bit window; input order kept."""
    index = catalog if isinstance(catalog, CatalogIndex) else CatalogIndex(catalog)
    return [tuple(x) for x in candidates if index.witness(tuple(x)) is None]


# -- certificates ---------------------------------------------------------------------


@dataclass
class Certificate:
    """Claim: target + sum(smaller) + sum(Sq^u(h_u)) only has terms of weight < omega."""

    k: int
    target: tuple
    omega: tuple | None = None
    smaller: list = field(default_factory=list)
    squares: list = field(default_factory=list)
    source: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.target = tuple(self.target)
        self.smaller = [tuple(y) for y in self.smaller]
        self.squares = [(int(u), [tuple(h) for h in poly]) for u, poly in self.squares]
        w = weight_vector(self.target)
        self.omega = w if self.omega is None else tuple(self.omega)
        if len(self.target) != self.k or any(a < 0 for a in self.target):
            raise ValueError(f"target {self.target} is not a monomial in {self.k} variables")
        if self.omega != w:
            raise ValueError(f"omega {self.omega} differs from the target weight {w}")
        n = degree(self.target)
        for y in self.smaller:
            if len(y) != self.k or sum(y) != n or min(y) < 0:
                raise ValueError(f"smaller monomial {y} has the wrong arity or degree")
        for u, poly in self.squares:
            if u < 1:
                raise ValueError(f"square index {u} must be >= 1")
            for h in poly:
                if len(h) != self.k or sum(h) + u != n or min(h) < 0:
                    raise ValueError(f"Sq^{u} argument {h} has the wrong arity or degree")

    @property
    def s(self):
        return len(self.omega)

    def to_json(self):
        d = {"k": self.k, "target": list(self.target), "omega": list(self.omega),
             "smaller": [list(y) for y in self.smaller],
             "squares": [{"u": u, "poly": [list(h) for h in poly]} for u, poly in self.squares],
             "source": self.source}
        d.update(self.meta)
        return d

    @classmethod
    def from_json(cls, d):
        known = {"k", "target", "omega", "smaller", "squares", "source"}
        return cls(d["k"], d["target"], d.get("omega"), d.get("smaller", []),
                   [(q["u"], q["poly"]) for q in d.get("squares", [])],
                   d.get("source", ""), {k: v for k, v in d.items() if k not in known})


def load_certificate(path):
    return Certificate.from_json(json.loads(Path(path).read_text()))


def save_certificate(c, path):
    Path(path).write_text(json.dumps(c.to_json()) + "\n")


def bundled_certificates():
    """Name -> Certificate for every file shipped under data/certificates."""
    out = {}
    for f in sorted(_data_file("certificates").iterdir(), key=lambda p: p.name):
        if f.name.endswith(".json"):
            out[f.name[:-5]] = Certificate.from_json(json.loads(f.read_text()))
    return out


def certificate_residual(c):
    """The polynomial target + sum(smaller) + sum(Sq^u(h_u))."""
    r = {c.target}
    for y in c.smaller:
        r ^= {y}
    for u, poly in c.squares:
        r ^= sq(u, poly)
    return frozenset(r)


def certificate_problems(c):
    """Human-readable reasons a certificate fails; empty when it verifies."""
    out = []
    key = monomial_key(c.target)
    for y in c.smaller:
        if monomial_key(y) >= key:
            out.append(f"smaller term {y} is not below the target")
    top = (1 << c.s) - 1
    for u, _ in c.squares:
        if u > top:
            out.append(f"Sq^{u} exceeds 2^s - 1 = {top}")
    for t in sorted(certificate_residual(c), key=monomial_key):
        if cmp_weight(weight_vector(t), c.omega) >= 0:
            out.append(f"residual term {t} has weight {weight_vector(t)}, not below {c.omega}")
    return out


def verify_certificate(c):
    return not certificate_problems(c)

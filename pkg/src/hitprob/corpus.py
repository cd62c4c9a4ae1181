"""Text forms, d-parameterized monomial templates and the bundled datasets.

Monomials read and print as `x1^3 x2^5 x4` (absent variables have exponent
0) or as tuples `(3,5,0,1)`.  Template exponents are c0 + c1*2^(d+s), written
like `2^d-3`, `2^(d-1)`, `3*2^d-2` or plain integers.
"""

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .core_algebra import trim, weight_vector

# -- exponents ----------------------------------------------------------------------

_EXP = re.compile(
    r"""\s*(?:
        (?P<int>-?\d+)\s*$ |
        (?:(?P<c1>\d+)\s*\*\s*)?2\s*\^\s*(?:d|\(\s*d\s*(?P<shift>[+-]\s*\d+)?\s*\))
        \s*(?P<c0>[+-]\s*\d+)?\s*$
    )""",
    re.X,
)


@dataclass(frozen=True)
class Exponent:
    """c0 + c1 * 2^(d + shift)."""

    c0: int = 0
    c1: int = 0
    shift: int = 0

    def __call__(self, d=None):
        if not self.c1:
            return self.c0
        if d is None:
            raise ValueError("template exponent needs a value of d")
        if d + self.shift < 0:
            raise ValueError(f"2^(d{self.shift:+d}) undefined at d = {d}")
        return self.c0 + self.c1 * (1 << (d + self.shift))

    @property
    def constant(self):
        return not self.c1

    def __str__(self):
        if not self.c1:
            return str(self.c0)
        base = "2^d" if not self.shift else f"2^(d{self.shift:+d})"
        if self.c1 != 1:
            base = f"{self.c1}*{base}"
        return base + (f"{self.c0:+d}" if self.c0 else "")


def parse_exponent(text):
    text = str(text).strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    text = text.replace("{", "(").replace("}", ")")
    text = text.replace("2^(d)", "2^d")
    m = _EXP.fullmatch(text)
    if not m:
        raise ValueError(f"bad exponent {text!r}")
    if m.group("int") is not None:
        return Exponent(int(m.group("int")))
    c1 = int(m.group("c1") or 1)
    shift = int((m.group("shift") or "0").replace(" ", ""))
    c0 = int((m.group("c0") or "0").replace(" ", ""))
    return Exponent(c0, c1, shift)


# -- monomials --------------------------------------------------------------------

_TUPLE = re.compile(r"\s*\(\s*(\d+(?:\s*,\s*\d+)*)?\s*,?\s*\)\s*|\s*(\d+(?:\s*,\s*\d+)+)\s*")
_FACTOR = re.compile(r"x_?\{?(\d+)\}?(?:\^(\{[^{}]*(?:\{[^{}]*\}[^{}]*)*\}|\([^()]*(?:\([^()]*\)[^()]*)*\)|[-+*\w^()]+))?")


def _factors(text):
    out = []
    pos = 0
    text = text.strip()
    if text in ("", "1"):
        return out
    while pos < len(text):
        if text[pos].isspace() or text[pos] == "*":
            pos += 1
            continue
        m = _FACTOR.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse monomial {text!r} near {text[pos:]!r}")
        exp = m.group(2)
        if exp and exp[0] == "(" and exp[-1] == ")" and "d" not in exp:
            exp = exp[1:-1]
        out.append((int(m.group(1)), parse_exponent(exp) if exp else Exponent(1)))
        pos = m.end()
    return out


@dataclass(frozen=True)
class MonomialTemplate:
    exponents: tuple

    @property
    def k(self):
        return len(self.exponents)

    @property
    def constant(self):
        return all(e.constant for e in self.exponents)

    def __call__(self, d=None):
        x = tuple(e(d) for e in self.exponents)
        if any(a < 0 for a in x):
            raise ValueError(f"template {self} is negative at d = {d}: {x}")
        return x

    def degree(self, d=None):
        return sum(e(d) for e in self.exponents)

    def __str__(self):
        parts = []
        for j, e in enumerate(self.exponents, 1):
            if e.constant and e.c0 == 0:
                continue
            s = str(e)
            parts.append(f"x{j}" if s == "1" else (f"x{j}^{s}" if e.constant else f"x{j}^{{{s}}}"))
        return " ".join(parts) or "1"


def parse_template(text, k=None):
    """`x1^3 x2^{2^d-3} x3^{2^d-1}` -> MonomialTemplate; k pads to that arity."""
    m = _TUPLE.fullmatch(text)
    if m:
        vals = [int(v) for v in (m.group(1) or m.group(2) or "").split(",") if v.strip()]
        exps = [Exponent(v) for v in vals]
    else:
        fs = _factors(text)
        top = max((j for j, _ in fs), default=0)
        exps = [Exponent(0)] * max(top, k or 0)
        for j, e in fs:
            if j < 1:
                raise ValueError(f"variable index must be >= 1 in {text!r}")
            prev = exps[j - 1]
            if not (prev.constant and prev.c0 == 0):
                raise ValueError(f"variable x{j} repeated in {text!r}")
            exps[j - 1] = e
    if k is not None:
        if len(exps) > k:
            raise ValueError(f"{text!r} uses more than {k} variables")
        exps = exps + [Exponent(0)] * (k - len(exps))
    return MonomialTemplate(tuple(exps))


def parse_monomial(text, k=None):
    """`x1^3 x2^5` or `(3,5)` -> exponent tuple; d-dependent exponents are rejected."""
    t = parse_template(text, k)
    if not t.constant:
        raise ValueError(f"{text!r} depends on d; use parse_template")
    return t()


def serialize_monomial(x):
    return str(MonomialTemplate(tuple(Exponent(a) for a in x)))


def serialize_tuple(x):
    return "(" + ",".join(map(str, x)) + ")"


# -- weight vectors ---------------------------------------------------------------

def _count(text, d):
    text = text.strip().strip("()")
    if text == "":
        return 1
    if "d" in text:
        if d is None:
            raise ValueError("weight notation needs a value of d")
        m = re.fullmatch(r"\s*d\s*([+-]\s*\d+)?\s*", text)
        if not m:
            raise ValueError(f"bad repeat count {text!r}")
        return d + int((m.group(1) or "0").replace(" ", ""))
    return int(text)


_GROUP = re.compile(r"\(([^()]*)\)\s*(?:\|?\s*\^\s*(\d+|d|\(\s*d\s*[+-]\s*\d+\s*\)|\{[^{}]*\}))?")


def parse_weight(text, d=None):
    """`(2,4,3,3)`, `(4)|(3)^3|(1)`, `(4)|(3)|^3|(1)` or `(2)|^d` -> trimmed tuple."""
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos] in " |":
            pos += 1
            continue
        m = _GROUP.match(text, pos)
        if not m:
            raise ValueError(f"bad weight vector {text!r} near {text[pos:]!r}")
        vals = tuple(int(v) for v in m.group(1).split(",") if v.strip())
        times = _count(m.group(2).strip("{}"), d) if m.group(2) else 1
        if times < 0:
            raise ValueError(f"negative repeat in {text!r}")
        out.extend(vals * times)
        pos = m.end()
    if not out:
        raise ValueError(f"empty weight vector {text!r}")
    return trim(out)


def serialize_weight(w):
    return "(" + ",".join(map(str, trim(w))) + ")"


# -- datasets -------------------------------------------------------------------------

@dataclass
class Dataset:
    name: str
    k: int
    omega: str | None
    degree_formula: str
    valid_d: list | None = None
    declared_count: int = 0
    entries: list = field(default_factory=list)
    construction: dict | None = None
    source: str = ""
    note: str = ""
    expected_counts: dict = field(default_factory=dict)
    entry_min_d: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, d):
        return cls(d["name"], d["k"], d.get("omega"), str(d["degree_formula"]), d.get("valid_d"),
                   d.get("declared_count", len(d.get("entries", []))),
                   [parse_template(t, d["k"] if "construction" not in d else None)
                    for t in d.get("entries", [])],
                   d.get("construction"), d.get("source", ""), d.get("note", ""),
                   {int(a): b for a, b in d.get("expected_counts", {}).items()},
                   {int(a): b for a, b in d.get("entry_min_d", {}).items()})

    def to_json(self):
        d = {"name": self.name, "k": self.k, "omega": self.omega,
             "degree_formula": self.degree_formula, "valid_d": self.valid_d,
             "declared_count": self.declared_count, "source": self.source}
        if self.construction:
            d["construction"] = self.construction
        else:
            d["entries"] = [str(t) for t in self.entries]
        for key in ("note", "expected_counts", "entry_min_d"):
            if getattr(self, key):
                d[key] = getattr(self, key)
        return d

    @property
    def parametric(self):
        return self.valid_d is not None

    def in_range(self, d):
        if not self.parametric:
            return True
        lo, hi = self.valid_d
        return d is not None and d >= lo and (hi is None or d <= hi)

    def expected(self, d=None):
        return self.expected_counts.get(d, self.declared_count)

    def degree(self, d=None):
        return parse_exponent(self.degree_formula)(d)

    def weight(self, d=None):
        return parse_weight(self.omega, d) if self.omega else None


def _data_dir():
    return resources.files("hitprob").joinpath("data", "datasets")


def load_dataset(path):
    return Dataset.from_json(json.loads(Path(path).read_text()))


def load_datasets():
    """Name -> Dataset for every bundled file."""
    out = {}
    for f in sorted(_data_dir().iterdir(), key=lambda p: p.name):
        if f.name.endswith(".json"):
            ds = Dataset.from_json(json.loads(f.read_text()))
            out[ds.name] = ds
    return out


def instantiate(ds, d=None, registry=None):
    """Evaluate a dataset at d: deduplicated monomials in listing order.

    Constructions lift another dataset (looked up in `registry`, default the
    bundled ones) with x_i^e f_i(w).  Negative exponents raise ValueError.
    """
    if ds.parametric and d is None:
        raise ValueError(f"dataset {ds.name} needs d")
    if ds.construction:
        from .certify import mothebe_lift
        reg = load_datasets() if registry is None else registry
        base = reg[ds.construction["lift"]]
        e = parse_exponent(ds.construction["exponent"])(d)
        return mothebe_lift(instantiate(base, d, reg), exponent=e)
    out, seen = [], set()
    for t, tmpl in enumerate(ds.entries, 1):
        if d is not None and d < ds.entry_min_d.get(t, -1):
            continue
        x = tmpl(d)
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


@dataclass
class CheckRow:
    name: str
    d: int | None
    expected: int
    count: int
    listed: int
    in_range: bool
    weight_ok: bool
    degree_ok: bool
    error: str = ""

    @property
    def ok(self):
        return not self.error and self.count == self.expected and self.weight_ok and self.degree_ok


def check_dataset(ds, d=None, registry=None):
    """Count, weight and degree checks; misprinted entries show up as failed rows, not exceptions."""
    listed = len(ds.entries)
    try:
        xs = instantiate(ds, d, registry)
    except ValueError as exc:
        return CheckRow(ds.name, d, ds.expected(d), 0, listed, ds.in_range(d), False, False, str(exc))
    w = ds.weight(d) if ds.omega else None
    n = ds.degree(d)
    return CheckRow(ds.name, d, ds.expected(d), len(xs), listed, ds.in_range(d),
                    w is None or all(weight_vector(x) == w for x in xs),
                    all(sum(x) == n for x in xs))


@dataclass
class DiffReport:
    missing: list
    extra: list

    @property
    def ok(self):
        return not self.missing and not self.extra


def compare_with_computed(ds, d, basis, registry=None):
    """Set differences between an instantiated dataset and computed monomials."""
    xs = instantiate(ds, d, registry)
    got = [tuple(x) for x in basis]
    for x in got:
        if len(x) != ds.k or sum(x) != ds.degree(d):
            raise ValueError(f"computed monomial {x} does not match dataset {ds.name} at d = {d}")
    a, b = set(xs), set(got)
    return DiffReport(sorted(a - b), sorted(b - a))

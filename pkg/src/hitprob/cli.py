"""Command-line entry point: `hitprob <command> ...`.

Exit status: 0 success, 1 usage or bad input, 2 refused by the memory
guard, 3 a verification failed.
"""

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

from . import config
from .config import MemoryGuardError, parse_size
from .core_algebra import minimal_spike, mu, weight_vector
from .corpus import (check_dataset, load_datasets, parse_monomial, parse_weight,
                     serialize_monomial, serialize_weight)

EXIT_USAGE, EXIT_GUARD, EXIT_FAIL = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _mono(x):
    return serialize_monomial(x)


def _emit(out, fmt, payload, rows=None, header=None, text=None):
    """Write one result in the chosen format; `rows` feed csv, `text` feeds plain."""
    if fmt == "json":
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(header)
        w.writerows(rows if rows is not None else [[payload]])
        out.write(buf.getvalue())
    else:
        out.write((text if text is not None else str(payload)) + "\n")


# -- commands ---------------------------------------------------------------------

def cmd_dim(a, out):
    from .hit_core import qp_dim
    d = qp_dim(a.k, a.n)
    _emit(out, a.format, {"k": a.k, "n": a.n, "dim": d}, [[a.k, a.n, d]], ["k", "n", "dim"], str(d))


def cmd_basis(a, out):
    from .hit_core import admissible_basis, split_zero_plus
    if a.plus and a.zero:
        raise UsageError("--plus and --zero exclude each other")
    xs = list(admissible_basis(a.k, a.n))
    if a.layer:
        w = parse_weight(a.layer, a.d)
        xs = [x for x in xs if weight_vector(x) == w]
    zero, plus = split_zero_plus(xs)
    xs = plus if a.plus else zero if a.zero else xs
    _emit(out, a.format, {"k": a.k, "n": a.n, "count": len(xs), "monomials": [list(x) for x in xs]},
          [list(x) for x in xs], [f"x{j}" for j in range(1, a.k + 1)],
          "\n".join([_mono(x) for x in xs] + [f"# {len(xs)} monomials"]))


def cmd_layers(a, out):
    from .hit_core import layer_dims
    dims = layer_dims(a.k, a.n, a.semantics)
    if a.semantics == "both":
        rows = [[serialize_weight(w), f, q] for w, (f, q) in dims.items()]
        header = ["omega", "filtration", "quotient"]
    else:
        rows = [[serialize_weight(w), v] for w, v in dims.items()]
        header = ["omega", "dim"]
    payload = {"k": a.k, "n": a.n, "semantics": a.semantics,
               "layers": [dict(zip(header, r)) for r in rows]}
    _emit(out, a.format, payload, rows, header, "\n".join(" ".join(map(str, r)) for r in rows))


def cmd_mu(a, out):
    v = mu(a.n)
    _emit(out, a.format, {"n": a.n, "mu": v}, [[a.n, v]], ["n", "mu"], str(v))


def cmd_spike(a, out):
    z = minimal_spike(a.n, a.k)
    _emit(out, a.format, {"n": a.n, "k": a.k, "spike": list(z)}, [list(z)], None, _mono(z))


def cmd_check_strict(a, out):
    from .filters import strictly_inadmissible
    x = parse_monomial(a.monomial, a.k)
    v = strictly_inadmissible(x)
    _emit(out, a.format, {"monomial": list(x), "strictly_inadmissible": v}, [[_mono(x), v]],
          ["monomial", "strictly_inadmissible"],
          f"{_mono(x)}: {'strictly inadmissible' if v else 'not strictly inadmissible'}")


def _read_poly(path, k):
    text = Path(path).read_text() if path != "-" else sys.stdin.read()
    terms = set()
    for chunk in text.replace("+", "\n").splitlines():
        chunk = chunk.split("#", 1)[0].strip()
        if chunk:
            terms ^= {parse_monomial(chunk, k)}
    return terms


def cmd_is_hit(a, out):
    from .hit_core import is_hit
    p = _read_poly(a.polyfile, a.k)
    v = is_hit(p)
    _emit(out, a.format, {"terms": len(p), "hit": v}, [[len(p), v]], ["terms", "hit"],
          "hit" if v else "not hit")


def cmd_kameko(a, out):
    from .hit_core import kameko_kernel_dim
    r = dataclasses.asdict(kameko_kernel_dim(a.k, a.m))
    _emit(out, a.format, r, [list(r.values())], list(r),
          "\n".join(f"{key}: {v}" for key, v in r.items()))


def cmd_certify(a, out):
    from .certify import DEFAULT_MAPS, parse_map, sandwich_certify
    from .filters import load_catalog
    w = parse_weight(a.omega, a.d)
    catalog = load_catalog(a.catalog) if a.catalog else None
    maps = DEFAULT_MAPS
    if a.maps:
        maps = [parse_map(line) for line in Path(a.maps).read_text().split("\n") if line.strip()]
    r = sandwich_certify(w, a.d, catalog, maps, lower=not a.no_lower)
    payload = r.to_json()
    if not a.survivors:
        payload.pop("survivors")
    rows = [[serialize_weight(r.omega), r.d, r.degree, r.upper, r.lower, r.zero_dim, r.certified]]
    text = "\n".join([
        f"omega      {serialize_weight(r.omega)}  degree {r.degree}",
        f"upper      {r.upper}",
        f"lower      {r.lower if r.lower is not None else '-'}",
        f"zero part  {r.zero_dim if r.zero_dim is not None else '-'}",
        f"maps       {' '.join(r.maps)}",
        f"verdict    {r.verdict()}",
    ] + ([f"total      {r.total}"] if r.total is not None else [])
      + ([_mono(x) for x in r.survivors] if a.survivors else []))
    _emit(out, a.format, payload, rows,
          ["omega", "d", "degree", "upper", "lower", "zero_dim", "certified"], text)


def cmd_verify_cert(a, out):
    from .filters import certificate_problems, load_certificate
    try:
        c = load_certificate(a.file)
    except (ValueError, KeyError) as exc:
        _emit(out, a.format, {"file": a.file, "ok": False, "problems": [str(exc)]},
              [[a.file, False]], ["file", "ok"], f"malformed certificate: {exc}")
        return EXIT_FAIL
    probs = certificate_problems(c)
    _emit(out, a.format, {"file": a.file, "target": list(c.target), "ok": not probs,
                          "problems": probs},
          [[a.file, not probs]], ["file", "ok"],
          f"{_mono(c.target)}: " + ("verified" if not probs else "FAILED\n  " + "\n  ".join(probs)))
    return 0 if not probs else EXIT_FAIL


def cmd_corpus_check(a, out):
    reg = load_datasets()
    names = [a.dataset] if a.dataset else sorted(reg)
    rows = []
    for name in names:
        if name not in reg:
            raise UsageError(f"unknown dataset {name!r}; known: {', '.join(sorted(reg))}")
        ds = reg[name]
        rows.append(check_dataset(ds, a.d if ds.parametric else None, reg))
    header = ["name", "d", "expected", "count", "listed", "in_range", "weight_ok", "degree_ok", "ok", "error"]
    table = [[r.name, r.d, r.expected, r.count, r.listed, r.in_range, r.weight_ok, r.degree_ok,
              r.ok, r.error] for r in rows]
    text = "\n".join(
        f"{r.name:<14} d={r.d!s:<4} {r.count:>4}/{r.expected:<4} "
        f"{'ok' if r.ok else 'MISMATCH'}{'' if r.in_range else ' (outside stated range)'}"
        f"{'  ' + r.error if r.error else ''}" for r in rows)
    _emit(out, a.format, {"d": a.d, "datasets": [dict(zip(header, t)) for t in table]},
          table, header, text)
    return EXIT_FAIL if a.strict and not all(r.ok for r in rows) else 0


# -- parser ------------------------------------------------------------------------

# Filled in after parsing: set_defaults would mutate the actions shared with subcommands.
SHARED_DEFAULTS = {"format": "plain", "no_cache": False, "mem_limit": None, "threads": None,
                   "verbose": 0}


def build_parser():
    # Shared options are accepted before or after the command name.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("plain", "json", "csv"))
    common.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--no-cache", action="store_true", help="ignore HITPROB_CACHE")
    common.add_argument("--mem-limit", help="memory cap such as 2G (default HITPROB_MEM_LIMIT or 8G)")
    common.add_argument("--threads", type=int, help="worker processes for generator vectors")
    common.add_argument("-v", "--verbose", action="count")
    p = _Parser(prog="hitprob", parents=[common],
                description="Admissible monomials and QP_k dimensions over F2.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    s = sub.add_parser("dim", help="dim (QP_k)_n")
    s.add_argument("k", type=int)
    s.add_argument("n", type=int)
    s.set_defaults(fn=cmd_dim)

    s = sub.add_parser("basis", help="admissible monomials of degree n")
    s.add_argument("k", type=int)
    s.add_argument("n", type=int)
    s.add_argument("--layer", help='weight vector, e.g. "(2)|^4" or "(4,3,3,1)"')
    s.add_argument("-d", type=int, help="value of d inside --layer")
    s.add_argument("--plus", action="store_true", help="only monomials with every exponent positive")
    s.add_argument("--zero", action="store_true", help="only monomials with some exponent zero")
    s.set_defaults(fn=cmd_basis)

    s = sub.add_parser("layers", help="dimensions per weight vector")
    s.add_argument("k", type=int)
    s.add_argument("n", type=int)
    s.add_argument("--semantics", choices=("filtration", "quotient", "both"), default="filtration")
    s.set_defaults(fn=cmd_layers)

    s = sub.add_parser("mu", help="least number of spike parts summing to n")
    s.add_argument("n", type=int)
    s.set_defaults(fn=cmd_mu)

    s = sub.add_parser("spike", help="minimal spike of degree n in k variables")
    s.add_argument("n", type=int)
    s.add_argument("k", type=int)
    s.set_defaults(fn=cmd_spike)

    s = sub.add_parser("check-strict", help="decide strict inadmissibility of a monomial")
    s.add_argument("monomial", help='"x1^3 x2^5 x3^10" or "(3,5,10)"')
    s.add_argument("-k", type=int, help="arity when trailing exponents are zero")
    s.set_defaults(fn=cmd_check_strict)

    s = sub.add_parser("is-hit", help="decide whether a polynomial is hit")
    s.add_argument("polyfile", help="monomials separated by newlines or '+'; '-' reads stdin")
    s.add_argument("-k", type=int, help="arity when trailing exponents are zero")
    s.set_defaults(fn=cmd_is_hit)

    s = sub.add_parser("kameko", help="kernel of the Kameko map (QP_k)_(2m+k) -> (QP_k)_m")
    s.add_argument("k", type=int)
    s.add_argument("m", type=int)
    s.set_defaults(fn=cmd_kameko)

    s = sub.add_parser("certify", help="upper and lower bounds for QP_5^+(omega)")
    s.add_argument("--omega", required=True, help='weight vector, e.g. "(2)|^d"')
    s.add_argument("-d", type=int)
    s.add_argument("--catalog", help="catalog JSON file (default: bundled)")
    s.add_argument("--maps", help="file with one (i;I) per line")
    s.add_argument("--no-lower", action="store_true", help="skip the P_4 lower bound")
    s.add_argument("--survivors", action="store_true", help="also list the surviving monomials")
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("verify-cert", help="replay a decomposition certificate")
    s.add_argument("file")
    s.set_defaults(fn=cmd_verify_cert)

    s = sub.add_parser("corpus", help="bundled datasets")
    csub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = csub.add_parser("check", parents=[common],
                        help="instantiate datasets and check counts, weights, degrees")
    c.add_argument("-d", type=int, required=True)
    c.add_argument("--dataset")
    c.add_argument("--strict", action="store_true", help="exit 3 on any mismatch")
    c.set_defaults(fn=cmd_corpus_check)
    return p


def _configure(a):
    cfg = config.from_env()
    if a.no_cache:
        cfg.use_cache = False
    if a.mem_limit:
        cfg.mem_limit = parse_size(a.mem_limit)
    if a.threads is not None:
        cfg.threads = a.threads
    cfg.output, cfg.verbose = a.format, a.verbose
    cfg.__post_init__()
    config.configure(cfg)


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    for key, v in SHARED_DEFAULTS.items():
        if not hasattr(a, key):
            setattr(a, key, v)
    try:
        _configure(a)
        return a.fn(a, out) or 0
    except MemoryGuardError as exc:
        print(f"hitprob: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError, OSError) as exc:
        print(f"hitprob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

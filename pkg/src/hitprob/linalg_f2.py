"""Row spaces over F2 with rows packed into Python ints.

Bit p of a row is the coefficient of the p-th basis monomial.  The pivot of
a row is its highest set bit, i.e. its largest monomial in the order.
"""

import hashlib
import os
import struct
import tempfile
from pathlib import Path

from .config import check_size
from .core_algebra import count_degree, enumerate_degree


class DegreeBasis:
    """All monomials of a fixed degree (optionally only positive ones), ascending."""

    def __init__(self, k, n, positive=False):
        self.k, self.n, self.positive = k, n, positive
        self.monomials = enumerate_degree(k, n, positive)
        self.index = {x: i for i, x in enumerate(self.monomials)}

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    @property
    def digest(self):
        h = hashlib.sha256(f"{self.k},{self.n},{int(self.positive)};".encode())
        for x in self.monomials:
            h.update((",".join(map(str, x)) + ";").encode())
        return h.digest()

    def vector(self, p):
        """Bit vector of a polynomial given as an iterable of monomials."""
        v = 0
        idx = self.index
        for x in p:
            v ^= 1 << idx[x]
        return v

    def terms(self, v):
        """Monomials of a bit vector, ascending."""
        out = []
        while v:
            low = v & -v
            out.append(self.monomials[low.bit_length() - 1])
            v ^= low
        return out


def _top(v):
    return v.bit_length() - 1


class F2RowSpace:
    """Reduced row echelon basis of a subspace of F2^N.

    `basis` may be a DegreeBasis or a plain width N.
    """

    def __init__(self, basis, rows=()):
        if isinstance(basis, int):
            self.basis, self.N = None, basis
        else:
            self.basis, self.N = basis, len(basis)
        check_size(self.N * self.N // 4, f"row space of width {self.N}")
        self.rows = {}
        self.pivmask = 0
        self._reduced = True
        self.extend(rows)

    def _check(self, v):
        if v < 0 or v.bit_length() > self.N:
            raise ValueError(f"vector does not fit width {self.N}")

    def _back_reduce(self):
        rows, pm = self.rows, self.pivmask
        for p in sorted(rows):
            row = rows[p]
            t = row & pm & ((1 << p) - 1)
            while t:
                b = _top(t)
                row ^= rows[b]
                t = row & pm & ((1 << b) - 1)
            rows[p] = row
        self._reduced = True

    def reduce(self, v):
        """Normal form of v: no pivot positions left set."""
        self._check(v)
        if not self._reduced:
            self._back_reduce()
        rows, pm = self.rows, self.pivmask
        t = v & pm
        while t:
            v ^= rows[_top(t)]
            t = v & pm
        return v

    def insert_row(self, v):
        """Add v, keeping full back-reduction; True when the rank grows."""
        v = self.reduce(v)
        if not v:
            return False
        p = _top(v)
        bit = 1 << p
        for q, row in self.rows.items():
            if row & bit:
                self.rows[q] = row ^ v
        self.rows[p] = v
        self.pivmask |= bit
        return True

    def extend(self, vectors):
        """Bulk insertion: echelon first, one back-reduction pass on demand.

        Ends in the same reduced basis as repeated insert_row.
        """
        rows = self.rows
        added = 0
        for v in vectors:
            self._check(v)
            while v:
                h = _top(v)
                r = rows.get(h)
                if r is None:
                    rows[h] = v
                    self.pivmask |= 1 << h
                    self._reduced = False
                    added += 1
                    break
                v ^= r
        return added

    def rank(self):
        return len(self.rows)

    def contains(self, v):
        return self.reduce(v) == 0

    def pivots(self):
        return sorted(self.rows)

    def leading_set(self):
        if self.basis is None:
            return set(self.rows)
        return {self.basis.monomials[p] for p in self.rows}

    def canonical(self):
        """Rows of the reduced echelon form, ordered by pivot."""
        if not self._reduced:
            self._back_reduce()
        return tuple(self.rows[p] for p in sorted(self.rows))

    def copy(self):
        other = F2RowSpace.__new__(F2RowSpace)
        other.basis, other.N = self.basis, self.N
        other.rows = dict(self.rows)
        other.pivmask = self.pivmask
        other._reduced = self._reduced
        return other

    def __len__(self):
        return len(self.rows)


def _same_width(S, T):
    if S.N != T.N or (S.basis is not None and T.basis is not None and S.basis is not T.basis
                      and S.basis.monomials != T.basis.monomials):
        raise ValueError("row spaces live over different bases")


def sum_rank(S, T):
    _same_width(S, T)
    U = S.copy()
    U.extend(T.rows.values())
    return U.rank()


def intersection_dim(S, T):
    return S.rank() + T.rank() - sum_rank(S, T)


def coordinate_space(basis, positions):
    """Span of the unit vectors at the given positions."""
    S = F2RowSpace(basis)
    for p in positions:
        S.rows[p] = 1 << p
        S.pivmask |= 1 << p
    return S


def map_kernel_dim(rows, domain_dim, modulus):
    """Kernel dimension of e_i -> image_i composed with the quotient by `modulus`.

    `rows` lists (domain index, image vector); unlisted indices map to zero.
    """
    seen = set()
    for i, _ in rows:
        if not 0 <= i < domain_dim or i in seen:
            raise ValueError(f"bad or repeated domain index {i}")
        seen.add(i)
    U = modulus.copy()
    image_rank = U.extend(v for _, v in rows)
    return domain_dim - image_rank


# -- binary cache -----------------------------------------------------------

MAGIC = b"HPRS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHIIIQ32s16s")


def _stamp():
    from . import __version__
    return __version__.encode()[:16].ljust(16, b"\0")


def save_rowspace(S, path):
    """Write the reduced rows atomically (temp file, then rename)."""
    b = S.basis
    if b is None:
        raise ValueError("only row spaces over a DegreeBasis can be cached")
    words = (S.N + 63) // 64
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, int(b.positive), b.k, b.n,
                                  S.rank(), S.N, b.digest, _stamp()))
            for row in S.canonical():
                fh.write(row.to_bytes(words * 8, "little"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_rowspace(path, basis):
    """Read a cached space; None when stale (format, code version or basis order)."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) != _HEADER.size:
                return None
            magic, ver, flags, k, n, rank, N, digest, stamp = _HEADER.unpack(head)
            if (magic != MAGIC or ver != FORMAT_VERSION or stamp != _stamp()
                    or (k, n, bool(flags)) != (basis.k, basis.n, basis.positive)
                    or N != len(basis) or digest != basis.digest):
                return None
            words = (N + 63) // 64
            data = fh.read()
    except OSError:
        return None
    if len(data) != rank * words * 8:
        return None
    S = F2RowSpace(basis)
    step = words * 8
    for r in range(rank):
        row = int.from_bytes(data[r * step:(r + 1) * step], "little")
        p = _top(row)
        S.rows[p] = row
        S.pivmask |= 1 << p
    return S


def basis_size(k, n, positive=False):
    return count_degree(k, n, positive)

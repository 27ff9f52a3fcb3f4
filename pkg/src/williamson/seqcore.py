"""Core sequence algebra: symmetric ±1 sequences, periodic autocorrelation,
power spectra, compression, rowsums, and the exact Williamson check.

All correctness-critical quantities (PAF values, match keys, the Williamson
condition) are exact integers.  Floating point appears only in power spectral
densities, which are used for filtering against the 4n bound, never for
equality decisions.
"""
from __future__ import annotations

import numpy as np

EPSILON_DEFAULT = 1e-2


def _fold(i: int, n: int) -> int:
    i %= n
    return i if i <= n // 2 else n - i


class SymmetricSequence:
    """A ±1 sequence of order n with x[i] == x[n-i] for 1 <= i < n.

    Only the floor(n/2)+1 free entries x[0..n//2] are stored; the full
    sequence is expanded on demand.
    """

    __slots__ = ("order", "free", "_full")

    def __init__(self, entries):
        entries = tuple(int(v) for v in entries)
        n = len(entries)
        if n == 0:
            raise ValueError("empty sequence")
        for v in entries:
            if v not in (-1, 1):
                raise ValueError(f"entry {v} is not +1 or -1")
        for i in range(1, n):
            if entries[i] != entries[n - i]:
                raise ValueError(f"not symmetric at index {i}")
        self.order = n
        self.free = entries[: n // 2 + 1]
        self._full = entries

    @classmethod
    def from_free(cls, order: int, free) -> "SymmetricSequence":
        """Build from the free entries x[0..order//2]."""
        free = tuple(int(v) for v in free)
        if len(free) != order // 2 + 1:
            raise ValueError(f"expected {order // 2 + 1} free entries, got {len(free)}")
        self = object.__new__(cls)
        for v in free:
            if v not in (-1, 1):
                raise ValueError(f"entry {v} is not +1 or -1")
        self.order = order
        self.free = free
        self._full = None
        return self

    @property
    def entries(self) -> tuple:
        if self._full is None:
            n, free = self.order, self.free
            self._full = tuple(free[i if i <= n // 2 else n - i] for i in range(n))
        return self._full

    def expand(self) -> tuple:
        return self.entries

    def negate(self) -> "SymmetricSequence":
        return SymmetricSequence.from_free(self.order, tuple(-v for v in self.free))

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        if not isinstance(other, SymmetricSequence):
            return NotImplemented
        return self.order == other.order and self.free == other.free

    def __hash__(self):
        return hash((self.order, self.free))

    def __repr__(self):
        return f"SymmetricSequence({format_sequence(self)!r})"


class Quadruple:
    """Four symmetric sequences of equal order; a Williamson candidate."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        members = []
        for x in (a, b, c, d):
            if not isinstance(x, SymmetricSequence):
                x = SymmetricSequence(x)
            members.append(x)
        a, b, c, d = members
        if not (a.order == b.order == c.order == d.order):
            raise ValueError("members must have equal order")
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def order(self) -> int:
        return self.a.order

    @property
    def members(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        if not isinstance(other, Quadruple):
            return NotImplemented
        return self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return "Quadruple(%s)" % ", ".join(format_sequence(x) for x in self.members)


class CompressedSequence:
    """Integer sequence obtained by m-compression of a ±1 sequence.

    Entries lie in {-m, -m+2, ..., m} and are congruent to m mod 2.
    """

    __slots__ = ("entries", "factor")

    def __init__(self, entries, factor: int):
        entries = tuple(int(v) for v in entries)
        if not entries:
            raise ValueError("empty compressed sequence")
        if factor < 1:
            raise ValueError("compression factor must be positive")
        for v in entries:
            if abs(v) > factor or (v - factor) % 2 != 0:
                raise ValueError(f"entry {v} illegal for compression factor {factor}")
        self.entries = entries
        self.factor = factor

    @property
    def length(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        if not isinstance(other, CompressedSequence):
            return NotImplemented
        return self.entries == other.entries and self.factor == other.factor

    def __hash__(self):
        return hash((self.entries, self.factor))

    def __repr__(self):
        return f"CompressedSequence({list(self.entries)}, factor={self.factor})"


def _entries_of(seq) -> tuple:
    if isinstance(seq, SymmetricSequence):
        return seq.entries
    if isinstance(seq, CompressedSequence):
        return seq.entries
    return tuple(int(v) for v in seq)


def paf(seq) -> tuple:
    """Periodic autocorrelation: paf(A)[s] = sum_k a[k] * a[(k+s) mod n].

    Exact integer arithmetic; returns a length-n tuple.
    """
    a = _entries_of(seq)
    n = len(a)
    if n == 0:
        raise ValueError("empty sequence")
    return tuple(sum(a[k] * a[(k + s) % n] for k in range(n)) for s in range(n))


def psd(seq) -> np.ndarray:
    """Power spectral density: |DFT(A)(s)|^2 for s = 0..n-1."""
    a = np.asarray(_entries_of(seq), dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty sequence")
    spec = np.fft.fft(a)
    return (spec.real * spec.real + spec.imag * spec.imag)


def psd_halfspectrum(values: np.ndarray) -> np.ndarray:
    """PSD at s = 0..n//2 for each row of a float matrix of sequences."""
    spec = np.fft.rfft(values, axis=-1)
    return spec.real * spec.real + spec.imag * spec.imag


def compress(seq, d: int) -> CompressedSequence:
    """m-compression: entry j is sum_t a[j + t*d] for t = 0..m-1, m = n/d."""
    a = _entries_of(seq)
    n = len(a)
    if d < 1 or n % d != 0:
        raise ValueError(f"d={d} does not divide order {n}")
    m = n // d
    return CompressedSequence(
        (sum(a[j + t * d] for t in range(m)) for j in range(d)), m
    )


def rowsum(seq) -> int:
    """Sum of the entries."""
    return int(sum(_entries_of(seq)))


def verify_williamson(q: Quadruple) -> bool:
    """Exact check that the four PAF values sum to zero at shifts 1..n//2.

    Never uses floating point.
    """
    members = q.members if isinstance(q, Quadruple) else tuple(q)
    pafs = [paf(x) for x in members]
    n = len(pafs[0])
    return all(sum(p[s] for p in pafs) == 0 for s in range(1, n // 2 + 1))


def psd_filter(spectra, n: int, epsilon: float = EPSILON_DEFAULT) -> bool:
    """True (reject) iff the given PSD vectors sum beyond 4n + epsilon somewhere.

    Sequences whose combined PSD exceeds 4n at any frequency cannot occur
    together in a Williamson sequence.
    """
    spectra = [np.asarray(v, dtype=np.float64) for v in spectra]
    if not 1 <= len(spectra) <= 4:
        raise ValueError("psd_filter takes between 1 and 4 spectra")
    total = spectra[0].copy()
    for v in spectra[1:]:
        total += v
    return bool(np.any(total > 4 * n + epsilon))


# --- text format -----------------------------------------------------------
#
# One sequence per line, '+' for +1 and '-' for -1.  A block is a group of
# consecutive non-blank lines (4 for a quadruple, 8 for an octuple); blocks
# are separated by one blank line.  A line may contain several
# whitespace-separated sequences, each parsed separately.


def format_sequence(seq) -> str:
    return "".join("+" if v == 1 else "-" for v in _entries_of(seq))


def parse_sequence(text: str) -> SymmetricSequence:
    entries = []
    for ch in text.strip():
        if ch == "+":
            entries.append(1)
        elif ch == "-":
            entries.append(-1)
        else:
            raise ValueError(f"invalid character {ch!r} in sequence")
    return SymmetricSequence(entries)


def parse_blocks(lines) -> list:
    """Parse '+'/'-' lines into blocks of SymmetricSequence.

    Raises ValueError with a 1-based line number on malformed input.
    """
    blocks, current = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        for field in line.split():
            try:
                current.append(parse_sequence(field))
            except ValueError as e:
                raise ValueError(f"line {lineno}: {e}") from None
    if current:
        blocks.append(current)
    return blocks


def read_quadruples(lines) -> list:
    """Parse blocks of 4 sequences into Quadruples (line-numbered errors)."""
    out = []
    for i, block in enumerate(parse_blocks(lines), start=1):
        if len(block) != 4:
            raise ValueError(f"block {i}: expected 4 sequences, got {len(block)}")
        out.append(Quadruple(*block))
    return out


def format_block(seqs) -> str:
    return "\n".join(format_sequence(x) for x in seqs)


def write_blocks(f, blocks) -> None:
    first = True
    for block in blocks:
        if not first:
            f.write("\n")
        f.write(format_block(block))
        f.write("\n")
        first = False

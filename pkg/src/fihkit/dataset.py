"""Transaction databases: parsing, serialization, statistics and vertical indexes.

Files hold one transaction per line as unsigned integer item ids. A ``.csv``
extension selects the comma delimiter; any other extension means space.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels

Itemset = tuple  # strictly ascending tuple of int item ids


class DatasetError(ValueError):
    """Raised for malformed or empty input files."""


class Transaction(NamedTuple):
    tid: int
    items: tuple


@dataclass(frozen=True)
class DatasetStats:
    n_transactions: int
    n_items: int
    avg_len: Fraction

    @property
    def avg_len_rounded(self) -> str:
        # truncated, not rounded: 908576/88162 = 10.3058 is listed as 10.30
        hundredths = math.floor(self.avg_len * 100)
        return f"{hundredths // 100}.{hundredths % 100:02d}"

    def as_row(self) -> tuple:
        return (self.n_transactions, self.n_items, self.avg_len_rounded)


def delimiter_for(path) -> str:
    return "," if Path(path).suffix.lower() == ".csv" else " "


class TransactionDatabase:
    """Immutable, tid-indexed transactions stored as CSR (tid ``k`` is row ``k-1``).

    ``indptr``/``items`` hold the raw item ids per transaction, ascending and
    duplicate-free. The inverted index and vertical covers are derived lazily
    and cached; none of them is ever mutated after construction.
    """

    def __init__(self, indptr: np.ndarray, items: np.ndarray, duplicates_collapsed: int = 0, source=None):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.items = np.asarray(items, dtype=np.int64)
        self.indptr.flags.writeable = False
        self.items.flags.writeable = False
        self.duplicates_collapsed = duplicates_collapsed
        self.source = Path(source) if source is not None else None

    @classmethod
    def from_transactions(cls, transactions: Iterable[Iterable[int]], source=None) -> "TransactionDatabase":
        indptr = [0]
        flat: list[int] = []
        dups = 0
        for t in transactions:
            raw = list(t)
            row = sorted(set(raw))
            if any(i < 0 for i in row):
                raise DatasetError("items must be non-negative integers")
            dups += len(raw) - len(row)
            flat.extend(row)
            indptr.append(len(flat))
        return cls(np.array(indptr), np.array(flat, dtype=np.int64), dups, source)

    # ----------------------------------------------------------------- rows
    @property
    def n_transactions(self) -> int:
        return self.indptr.shape[0] - 1

    def __len__(self) -> int:
        return self.n_transactions

    def row(self, tid: int) -> np.ndarray:
        if not 1 <= tid <= self.n_transactions:
            raise KeyError(f"tid {tid} out of range 1..{self.n_transactions}")
        return self.items[self.indptr[tid - 1] : self.indptr[tid]]

    def transaction(self, tid: int) -> Transaction:
        return Transaction(tid, tuple(int(i) for i in self.row(tid)))

    @property
    def transactions(self) -> list[Transaction]:
        return [self.transaction(t) for t in range(1, self.n_transactions + 1)]

    def __iter__(self):
        return iter(self.transactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransactionDatabase):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(self.items, other.items)

    def __hash__(self):
        return hash((self.indptr.tobytes(), self.items.tobytes()))

    def __repr__(self) -> str:
        return f"TransactionDatabase(n_transactions={self.n_transactions}, n_items={self.item_universe.shape[0]})"

    # ------------------------------------------------------------ item maps
    @cached_property
    def item_universe(self) -> np.ndarray:
        u = np.unique(self.items)
        u.flags.writeable = False
        return u

    @cached_property
    def codes(self) -> np.ndarray:
        """Dense item codes (positions in ``item_universe``) aligned with ``items``."""
        c = np.searchsorted(self.item_universe, self.items).astype(np.int32)
        c.flags.writeable = False
        return c

    def encode(self, itemset: Sequence[int]) -> np.ndarray | None:
        """Item codes for ``itemset``; ``None`` if some item is not in the universe."""
        arr = np.asarray(itemset, dtype=np.int64)
        pos = np.searchsorted(self.item_universe, arr)
        if np.any(pos >= self.item_universe.shape[0]) or np.any(self.item_universe[np.minimum(pos, self.item_universe.shape[0] - 1)] != arr):
            return None
        return pos.astype(np.int32)

    @cached_property
    def _item_major(self):
        # (ptr over codes, 0-based rows) sorted by code then row
        rows = np.repeat(np.arange(self.n_transactions, dtype=np.int32), np.diff(self.indptr))
        order = np.argsort(self.codes, kind="stable")
        counts = np.bincount(self.codes, minlength=self.item_universe.shape[0])
        ptr = np.zeros(self.item_universe.shape[0] + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ptr, rows[order]

    @property
    def item_supports(self) -> np.ndarray:
        return np.diff(self._item_major[0])

    @cached_property
    def inverted_index(self) -> dict:
        ptr, rows = self._item_major
        return {
            int(item): rows[ptr[c] : ptr[c + 1]] + 1
            for c, item in enumerate(self.item_universe)
        }

    def tidlist(self, item: int) -> np.ndarray:
        """Ascending 1-based tids of transactions containing ``item``."""
        code = self.encode((item,))
        if code is None:
            return np.empty(0, dtype=np.int64)
        ptr, rows = self._item_major
        c = int(code[0])
        return rows[ptr[c] : ptr[c + 1]].astype(np.int64) + 1

    @cached_property
    def vertical(self) -> "VerticalIndex":
        return VerticalIndex.build(self)

    def stats(self) -> DatasetStats:
        return db_stats(self)


class VerticalIndex:
    """Per-item covers in whichever encoding is cheaper for this database.

    Bitsets win on dense data (mushroom), tid-lists on sparse data (retail):
    a bitset row costs ``n_rows`` bits, a tid-list 32 bits per occurrence.
    """

    def __init__(self, mode, n_rows, bits=None, ptr=None, rows=None):
        self.mode = mode
        self.n_rows = n_rows
        self.bits = bits
        self.ptr = ptr
        self.rows = rows

    @staticmethod
    def choose_mode(n_rows: int, supports: np.ndarray) -> str:
        if supports.size == 0 or n_rows == 0:
            return "tidlist"
        density = float(supports.sum()) / (supports.size * n_rows)
        return "bitset" if density * 32 >= 1.0 else "tidlist"

    @classmethod
    def from_tidlists(cls, ptr, rows, n_rows, mode=None):
        supports = np.diff(ptr)
        mode = mode or cls.choose_mode(n_rows, supports)
        if mode == "tidlist":
            return cls("tidlist", n_rows, ptr=ptr, rows=rows)
        return cls("bitset", n_rows, bits=pack_bitsets(ptr, rows, n_rows))

    @classmethod
    def build(cls, db: TransactionDatabase, mode=None):
        ptr, rows = db._item_major
        return cls.from_tidlists(ptr, rows, db.n_transactions, mode)

    def supports(self, iptr, icodes) -> np.ndarray:
        if self.mode == "bitset":
            return kernels.bitset_supports(self.bits, iptr, icodes)
        if self.rows.shape[0] == 0:
            return np.zeros(iptr.shape[0] - 1, dtype=np.int64)
        return kernels.tidlist_supports(self.ptr, self.rows, iptr, icodes)

    def covers(self, iptr, icodes):
        if self.mode == "bitset":
            return kernels.bitset_covers(self.bits, iptr, icodes)
        if self.rows.shape[0] == 0:
            return np.zeros(iptr.shape[0], dtype=np.int64), np.empty(0, dtype=np.int32)
        return kernels.tidlist_covers(self.ptr, self.rows, iptr, icodes)

    def cover_hist(self, iptr, icodes) -> np.ndarray:
        if self.mode == "bitset":
            return kernels.bitset_cover_hist(self.bits, iptr, icodes, self.n_rows)
        if self.rows.shape[0] == 0:
            return np.zeros(self.n_rows, dtype=np.int64)
        return kernels.tidlist_cover_hist(self.ptr, self.rows, iptr, icodes, self.n_rows)


def pack_bitsets(ptr: np.ndarray, rows: np.ndarray, n_rows: int) -> np.ndarray:
    n = ptr.shape[0] - 1
    words = max(1, (n_rows + 63) // 64)
    bits = np.zeros((n, words), dtype=np.uint64)
    owner = np.repeat(np.arange(n), np.diff(ptr))
    word = rows.astype(np.int64) >> 6
    mask = np.left_shift(np.uint64(1), (rows.astype(np.uint64) & np.uint64(63)))
    np.bitwise_or.at(bits, (owner, word), mask)
    return bits


def encode_itemsets(db: TransactionDatabase, itemsets: Sequence[Sequence[int]]):
    """CSR encoding of ``itemsets`` in ``db``'s item codes.

    Itemsets with an item outside the universe are encoded as empty rows,
    which every kernel reports as support 0 and an empty cover.
    """
    iptr = np.zeros(len(itemsets) + 1, dtype=np.int64)
    parts = []
    pos = 0
    universe = db.item_universe
    lookup = {int(v): k for k, v in enumerate(universe)} if universe.shape[0] < 4096 else None
    for j, x in enumerate(itemsets):
        if lookup is not None:
            codes = [lookup.get(int(i)) for i in x]
            enc = None if any(c is None for c in codes) else codes
        else:
            e = db.encode(x)
            enc = None if e is None else e.tolist()
        if enc:
            parts.extend(enc)
            pos += len(enc)
        iptr[j + 1] = pos
    return iptr, np.asarray(parts, dtype=np.int32)


# --------------------------------------------------------------------- I/O
def _read_lines(path: Path) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8", newline=None) as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln.rstrip("\r") for ln in lines]


_SPACE_TOKEN = re.compile(r"[^ \t]+")
_COMMA_TOKEN = re.compile(r"[^,]+")


def _parse_line(line: str, delim: str, lineno: int, path) -> list[int]:
    pattern = _COMMA_TOKEN if delim == "," else _SPACE_TOKEN
    out = []
    for m in pattern.finditer(line):
        tok = m.group().strip()
        if not tok:
            continue
        if not (tok.isascii() and tok.isdigit()):
            col = m.start() + len(m.group()) - len(m.group().lstrip()) + 1
            raise DatasetError(f"{path}:{lineno}:{col}: expected unsigned integer item, got {tok!r}")
        out.append(int(tok))
    return out


def _parse_rows(path) -> tuple[list[list[int]], list[bool]]:
    path = Path(path)
    delim = delimiter_for(path)
    rows, blank = [], []
    for lineno, line in enumerate(_read_lines(path), start=1):
        items = _parse_line(line, delim, lineno, path)
        rows.append(items)
        blank.append(not items)
    return rows, blank


def parse_database(path) -> TransactionDatabase:
    """Read a transaction file; tid ``k`` is line ``k``.

    Blank lines are kept as empty transactions so tids written by
    ``write_database`` stay stable. A file without any line is rejected.
    """
    rows, _ = _parse_rows(path)
    if not rows:
        raise DatasetError(f"{path}: no transactions")
    return TransactionDatabase.from_transactions(rows, source=path)


def parse_itemset_file(path) -> list[tuple]:
    rows, _ = _parse_rows(path)
    seen = set()
    out = []
    for r in rows:
        if not r:
            continue
        key = tuple(sorted(set(r)))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_rows(rows: Iterable[Iterable[int]], delim: str) -> str:
    return "".join(delim.join(str(int(i)) for i in r) + "\n" for r in rows)


def write_database(db: TransactionDatabase, path) -> None:
    delim = delimiter_for(path)
    rows = (db.items[db.indptr[k] : db.indptr[k + 1]] for k in range(db.n_transactions))
    _atomic_write(Path(path), format_rows(rows, delim))


def write_itemsets(itemsets: Iterable[Sequence[int]], path) -> None:
    _atomic_write(Path(path), format_rows(itemsets, delimiter_for(path)))


def db_stats(db: TransactionDatabase) -> DatasetStats:
    n = db.n_transactions
    total = int(db.items.shape[0])
    return DatasetStats(n, int(db.item_universe.shape[0]), Fraction(total, n) if n else Fraction(0))

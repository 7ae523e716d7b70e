"""Binary on-disk cache of Fourier tables.

Layout (little-endian): b"EXPSUM01", p (u64), family id (u32), three
family parameters (i64: param, member, sign), method (u8), then p pairs of
f64 (re, im).
"""

from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path

import numpy as np

from .errors import NumericalIntegrityError
from .families import KIND_IDS, FamilySpec, SumTable, batch_complete_sums, check_table

MAGIC = b"EXPSUM01"
HEADER = struct.Struct("<8sQIqqqB")
METHOD_IDS = {"chirp_dft": 1, "direct": 2}
METHOD_NAMES = {v: k for k, v in METHOD_IDS.items()}
AUDIT_ENTRIES = 64
ENV_VAR = "EXPSUM_CACHE_DIR"


def cache_dir() -> Path:
    return Path(os.environ.get(ENV_VAR) or Path.home() / ".cache" / "kloostermax")


def _params(family: FamilySpec, member: int) -> tuple[int, int, int]:
    return family.param, int(member), family.sign


def table_filename(family: FamilySpec, p: int, member: int) -> str:
    """Family id and parameters are spelled out, so distinct families never share a file."""
    param, a, s = _params(family, member)
    name = f"k{KIND_IDS[family.kind]}-{family.kind}_p{p}_m{param}_a{a}_s{'p' if s > 0 else 'm'}"
    if family.coefficients:
        h = hashlib.sha1(repr(family.coefficients).encode()).hexdigest()[:12]
        name += f"_c{h}"
    return name + ".bin"


def table_path(family: FamilySpec, p: int, member: int, directory=None) -> Path:
    return Path(directory or cache_dir()) / table_filename(family, p, member)


def encode_table(table: SumTable) -> bytes:
    param, a, s = _params(table.family, table.member)
    head = HEADER.pack(MAGIC, table.p, KIND_IDS[table.family.kind], param, a, s,
                       METHOD_IDS[table.method])
    body = np.ascontiguousarray(table.values, dtype="<c16").tobytes()
    return head + body


def decode_table(data: bytes, family: FamilySpec, audit_seed: int = 0) -> SumTable:
    if len(data) < HEADER.size:
        raise NumericalIntegrityError("table file shorter than its header")
    magic, p, kind_id, param, member, sign, method = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise NumericalIntegrityError("bad magic in table file")
    if len(data) != HEADER.size + 16 * p:
        raise NumericalIntegrityError(f"table file has {len(data)} bytes, expected {HEADER.size + 16 * p}")
    if (kind_id, param, sign) != (KIND_IDS[family.kind], family.param, family.sign):
        raise NumericalIntegrityError("table file belongs to a different family")
    if method not in METHOD_NAMES:
        raise NumericalIntegrityError(f"unknown method id {method}")
    vals = np.frombuffer(data, dtype="<c16", offset=HEADER.size, count=p).astype(np.complex128)
    table = SumTable(int(p), family, int(member), vals, METHOD_NAMES[method])
    check_table(table, sample=AUDIT_ENTRIES, rng_seed=audit_seed)
    return table


def cache_table(table: SumTable, directory=None) -> Path:
    path = table_path(table.family, table.p, table.member, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(encode_table(table))
    os.replace(tmp, path)
    return path


def load_table(family: FamilySpec, p: int, member: int | None = None, directory=None) -> SumTable:
    member = family.default_member if member is None else int(member) % p
    path = table_path(family, p, member, directory)
    table = decode_table(path.read_bytes(), family, audit_seed=p)
    if table.p != p or table.member != member:
        raise NumericalIntegrityError("table file header does not match its name")
    return table


class TableStore:
    """Fetch tables through the cache, counting hits."""

    def __init__(self, directory=None, enabled: bool = True):
        self.directory = directory
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def get(self, family: FamilySpec, p: int, member: int | None = None) -> SumTable:
        member = family.default_member if member is None else int(member) % p
        if self.enabled and table_path(family, p, member, self.directory).exists():
            self.hits += 1
            return load_table(family, p, member, self.directory)
        self.misses += 1
        table = batch_complete_sums(family, p, member)
        if self.enabled:
            cache_table(table, self.directory)
        return table

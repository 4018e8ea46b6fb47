"""Shard files: one node's column of every stripe of an encoded file.

Layout (little endian)::

    magic        4s   b"MA22"
    version      u8   1
    field_desc   4s   00 p p p (prime, 24-bit p) | 01 m 00 00 (GF(2^m), default modulus)
    construction u8   1 = C1, 2 = C2, 0 = custom
    k            u16
    node_index   u16  1-based
    stripe_count u64
    payload_len  u64  original file length in bytes
    body         stripe_count * 2 bytes, top symbol then bottom symbol

One byte is one GF(2^8) symbol.  Stripe ``s`` covers bytes
``[2k*s, 2k*(s+1))`` of the zero-padded input and node ``i <= k`` holds
bytes ``2(i-1), 2(i-1)+1`` of it.
"""

from __future__ import annotations

import functools
import json
import struct
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .code import CodeSpec, decode_batch, encode_batch
from .constructions import build
from .errors import (
    BadHelperIndex,
    FieldMismatch,
    HeaderMismatch,
    MissingHelper,
    TooFewShards,
)
from .gf import DEFAULT_MODULI, GF256, FieldSpec, binary_field, prime_field
from .linalg import Mat
from .repair import execute_repair_batch, helper_payload_batch, plan_repair

MAGIC = b"MA22"
VERSION = 1
HEADER = struct.Struct("<4sB4sBHHQQ")
HEADER_SIZE = HEADER.size

CONSTRUCTION_CODES = {"custom": 0, "c1": 1, "c2": 2}
CONSTRUCTION_NAMES = {v: k for k, v in CONSTRUCTION_CODES.items()}


def shard_name(index: int) -> str:
    return f"shard_{index}.mds"


def encode_field(field: FieldSpec) -> bytes:
    if field.kind == "prime":
        return bytes([0, field.p & 0xFF, (field.p >> 8) & 0xFF, (field.p >> 16) & 0xFF])
    if field.modulus != DEFAULT_MODULI[field.m]:
        raise FieldMismatch("only default binary moduli can be recorded in a shard header")
    return bytes([1, field.m, 0, 0])


def decode_field(desc: bytes) -> FieldSpec:
    if desc[0] == 0:
        return prime_field(desc[1] | desc[2] << 8 | desc[3] << 16)
    if desc[0] == 1:
        return binary_field(desc[1])
    raise HeaderMismatch(f"unknown field descriptor {desc.hex()}")


@dataclass(frozen=True)
class ShardHeader:
    field: FieldSpec
    construction: str
    k: int
    node_index: int
    stripe_count: int
    payload_length: int
    version: int = VERSION

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, encode_field(self.field),
                           CONSTRUCTION_CODES[self.construction], self.k,
                           self.node_index, self.stripe_count, self.payload_length)

    @classmethod
    def unpack(cls, raw: bytes) -> "ShardHeader":
        if len(raw) < HEADER_SIZE:
            raise HeaderMismatch("truncated shard header")
        magic, version, fdesc, cons, k, idx, stripes, length = HEADER.unpack(raw[:HEADER_SIZE])
        if magic != MAGIC:
            raise HeaderMismatch(f"bad magic {magic!r}")
        if version != VERSION:
            raise HeaderMismatch(f"unsupported shard version {version}")
        if cons not in CONSTRUCTION_NAMES:
            raise HeaderMismatch(f"unknown construction code {cons}")
        hdr = cls(decode_field(fdesc), CONSTRUCTION_NAMES[cons], k, idx, stripes, length, version)
        if not 1 <= idx <= k + 2:
            raise HeaderMismatch(f"node index {idx} outside 1..{k + 2}")
        if length > stripes * 2 * k:
            raise HeaderMismatch("payload length exceeds stripe capacity")
        return hdr

    def shared(self) -> tuple:
        """Fields every shard of one file must agree on."""
        return (self.version, self.field, self.construction, self.k,
                self.stripe_count, self.payload_length)


@dataclass
class TransferReport:
    failed: int
    stripes: int
    helpers: list = dc_field(default_factory=list)

    @property
    def total_sent(self) -> int:
        return sum(h["symbols_sent"] for h in self.helpers)

    @property
    def total_read(self) -> int:
        return sum(h["symbols_read"] for h in self.helpers)

    def to_json(self) -> dict:
        return {
            "failed": self.failed,
            "helpers": list(self.helpers),
            "total_sent": self.total_sent,
            "total_read": self.total_read,
            "stripes": self.stripes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _write_shard(path: Path, header: ShardHeader, body: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(np.ascontiguousarray(body, dtype=np.uint8).tobytes())


def read_header(path) -> ShardHeader:
    with open(path, "rb") as fh:
        return ShardHeader.unpack(fh.read(HEADER_SIZE))


def read_body(path, header: ShardHeader) -> np.ndarray:
    """Whole body as an (S, 2) array."""
    with open(path, "rb") as fh:
        fh.seek(HEADER_SIZE)
        raw = fh.read(2 * header.stripe_count)
    if len(raw) != 2 * header.stripe_count:
        raise HeaderMismatch(f"{path}: body shorter than header claims")
    return np.frombuffer(raw, dtype=np.uint8).reshape(-1, 2).astype(np.int64)


def read_symbols(path, header: ShardHeader, columns) -> tuple[np.ndarray, int]:
    """Read only the given symbol positions of every stripe.

    Returns an (S, 2) array with unread positions zeroed and the number of
    symbols read.  Both positions means one contiguous read of the body;
    a single position is a strided read.
    """
    columns = tuple(columns)
    S = header.stripe_count
    out = np.zeros((S, 2), dtype=np.int64)
    if not columns or S == 0:
        return out, 0
    if len(columns) == 2:
        return read_body(path, header), 2 * S
    mm = np.memmap(path, dtype=np.uint8, mode="r", offset=HEADER_SIZE, shape=(S, 2))
    c = columns[0]
    out[:, c] = mm[:, c]
    del mm
    return out, S


def encode_file(path, code: CodeSpec, out_dir) -> list[Path]:
    """Split ``path`` into ``code.n`` shard files under ``out_dir``."""
    if code.field != GF256:
        raise FieldMismatch("the file store works over GF(2^8)")
    raw = Path(path).read_bytes()
    width = 2 * code.k
    stripes = -(-len(raw) // width)
    padded = np.zeros(stripes * width, dtype=np.int64)
    padded[:len(raw)] = np.frombuffer(raw, dtype=np.uint8)
    columns = encode_batch(code, padded.reshape(stripes, width))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in code.nodes():
        hdr = ShardHeader(code.field, code.construction_id if code.construction_id in CONSTRUCTION_CODES
                          else "custom", code.k, i, stripes, len(raw))
        p = out_dir / shard_name(i)
        _write_shard(p, hdr, columns[:, i - 1, :])
        paths.append(p)
    return paths


def scan_shards(shard_dir) -> dict[int, tuple[Path, ShardHeader]]:
    """Present shards keyed by node index, after checking headers agree."""
    found: dict[int, tuple[Path, ShardHeader]] = {}
    ref = None
    for p in sorted(Path(shard_dir).glob("shard_*.mds")):
        hdr = read_header(p)
        if ref is None:
            ref = hdr.shared()
        elif hdr.shared() != ref:
            raise HeaderMismatch(f"{p.name} disagrees with the other shard headers")
        if hdr.node_index in found:
            raise HeaderMismatch(f"two shards claim node {hdr.node_index}")
        if p.name != shard_name(hdr.node_index):
            raise HeaderMismatch(f"{p.name} holds node {hdr.node_index}")
        found[hdr.node_index] = (p, hdr)
    return found


def code_for(header: ShardHeader, code: Optional[CodeSpec] = None) -> CodeSpec:
    if code is not None:
        if code.k != header.k or code.field != header.field:
            raise HeaderMismatch("supplied code does not match the shard headers")
        return code
    if header.construction == "custom":
        raise HeaderMismatch("custom-code shards need the code supplied explicitly")
    return _cached_build(header.construction, header.k, header.field)


@functools.lru_cache(maxsize=32)
def _cached_build(construction: str, k: int, field: FieldSpec) -> CodeSpec:
    return build(construction, k, field)


def decode_file(shard_dir, out_path=None, code: Optional[CodeSpec] = None) -> bytes:
    shards = scan_shards(shard_dir)
    if not shards:
        raise TooFewShards("no shards found")
    header = next(iter(shards.values()))[1]
    code = code_for(header, code)
    missing = [i for i in code.nodes() if i not in shards]
    if len(missing) > 2:
        raise TooFewShards(f"{len(shards)} shards present, need at least {code.k}")
    S = header.stripe_count
    columns = np.zeros((S, code.n, 2), dtype=np.int64)
    for i, (p, hdr) in shards.items():
        columns[:, i - 1, :] = read_body(p, hdr)
    if missing:
        columns = decode_batch(code, columns, missing)
    data = columns[:, :code.k, :].reshape(-1).astype(np.uint8).tobytes()[:header.payload_length]
    if out_path is not None:
        Path(out_path).write_bytes(data)
    return data


def repair_shard(shard_dir, failed_index: int, use_designed: bool = True,
                 m: Optional[Mat] = None, code: Optional[CodeSpec] = None,
                 out_path=None) -> tuple[Path, TransferReport]:
    """Rebuild shard ``failed_index`` from its helpers with one repair matrix."""
    shards = scan_shards(shard_dir)
    others = {i: v for i, v in shards.items() if i != failed_index}
    if not others:
        raise MissingHelper("no surviving shards")
    header = next(iter(others.values()))[1]
    code = code_for(header, code)
    if failed_index not in code.nodes():
        raise BadHelperIndex(f"node {failed_index} outside 1..{code.n}")
    if m is None:
        if not use_designed:
            raise ValueError("supply a repair matrix or use the designed one")
        m = code.designed(failed_index)
    plan = plan_repair(code, m, failed_index)
    absent = [j for j in plan.helpers if j not in others]
    if absent:
        raise MissingHelper(f"helper shards missing: {absent}")
    report = TransferReport(failed_index, header.stripe_count)
    payloads = {}
    for j, helper in plan.helpers.items():
        path, hdr = others[j]
        cols, read = read_symbols(path, hdr, helper.read_columns)
        payloads[j] = helper_payload_batch(plan, j, cols)
        report.helpers.append({"node": j, "symbols_sent": int(payloads[j].size),
                               "symbols_read": int(read)})
    rebuilt = (execute_repair_batch(plan, payloads) if payloads
               else np.zeros((header.stripe_count, 2), dtype=np.int64))
    out = Path(out_path) if out_path is not None else Path(shard_dir) / shard_name(failed_index)
    _write_shard(out, replace(header, node_index=failed_index), rebuilt)
    return out, report

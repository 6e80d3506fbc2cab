"""Reader/writer for a strict NRRD subset.

Supported headers: magic ``NRRD0001``..``NRRD0005``; fields ``dimension``
(must be 3), ``sizes``, ``type`` (uchar/short/ushort/float), ``encoding``
(raw only), ``endian`` (little only), ``spacings`` or diagonal
``space directions``, and ``space origin``.  Anything else is rejected with
the offending line verbatim rather than guessed at; the only silent
defaults are endian (little) and space origin (0,0,0).  The raw payload is
little-endian in x-fastest order.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import IoFailure, MalformedHeader, TruncatedPayload, UnsupportedField
from .grid import SCALAR_KINDS, LabelVolume, ScalarVolume, grid_array

_MAGIC = re.compile(rb"^NRRD000[1-5]$")

_TYPE_TOKENS = {
    "uchar": "u8",
    "unsigned char": "u8",
    "uint8": "u8",
    "uint8_t": "u8",
    "short": "i16",
    "short int": "i16",
    "signed short": "i16",
    "signed short int": "i16",
    "int16": "i16",
    "int16_t": "i16",
    "ushort": "u16",
    "unsigned short": "u16",
    "unsigned short int": "u16",
    "uint16": "u16",
    "uint16_t": "u16",
    "float": "f32",
}

_CANONICAL_TYPE = {"u8": "uchar", "i16": "short", "u16": "ushort", "f32": "float"}

_KNOWN_FIELDS = {"dimension", "sizes", "type", "encoding", "endian", "spacings",
                 "space directions", "space origin"}


def _fmt_real(v: float) -> str:
    """Shortest exact decimal form; integral values drop the trailing .0."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def _parse_reals(text: str, line: str, n: int) -> tuple[float, ...]:
    parts = text.split()
    if len(parts) != n:
        raise MalformedHeader(f"expected {n} values: {line}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise MalformedHeader(f"bad numeric value: {line}") from None


def _parse_vector(token: str, line: str) -> tuple[float, ...]:
    token = token.strip()
    if not (token.startswith("(") and token.endswith(")")):
        raise MalformedHeader(f"bad vector syntax: {line}")
    try:
        return tuple(float(p) for p in token[1:-1].split(","))
    except ValueError:
        raise MalformedHeader(f"bad vector value: {line}") from None


def _split_header(blob: bytes, path) -> tuple[list[str], int]:
    """Header lines (without magic) and the payload byte offset."""
    offset = 0
    lines: list[str] = []
    first = True
    while True:
        nl = blob.find(b"\n", offset)
        if nl < 0:
            raise MalformedHeader(f"{path}: header never terminated by a blank line")
        raw = blob[offset:nl]
        offset = nl + 1
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        if first:
            if not _MAGIC.match(raw):
                raise MalformedHeader(f"{path}: not a NRRD file (magic {raw[:16]!r})")
            first = False
            continue
        if raw == b"":
            return lines, offset
        try:
            lines.append(raw.decode("ascii"))
        except UnicodeDecodeError:
            raise MalformedHeader(f"{path}: non-ASCII header line") from None


def read_nrrd(path, as_labels: bool = False) -> ScalarVolume | LabelVolume:
    """Read a volume; with ``as_labels`` the payload must be unsigned 8-bit."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return volume_from_nrrd_bytes(blob, as_labels=as_labels, source=str(path))


def volume_from_nrrd_bytes(
    blob: bytes, as_labels: bool = False, source: str = "<bytes>"
) -> ScalarVolume | LabelVolume:
    """Parse an in-memory NRRD blob (same subset as ``read_nrrd``)."""
    path = source
    lines, payload_at = _split_header(blob, path)

    fields: dict[str, tuple[str, str]] = {}
    for line in lines:
        if line.startswith("#"):
            continue
        if ":=" in line:
            raise UnsupportedField(line)
        if ": " not in line:
            raise MalformedHeader(f"not a field line: {line}")
        name, value = line.split(": ", 1)
        name = name.strip().lower()
        if name not in _KNOWN_FIELDS:
            raise UnsupportedField(line)
        if name in fields:
            raise MalformedHeader(f"duplicate field: {line}")
        fields[name] = (value.strip(), line)

    for required in ("dimension", "sizes", "type", "encoding"):
        if required not in fields:
            raise MalformedHeader(f"{path}: missing required field '{required}'")

    value, line = fields["dimension"]
    if value != "3":
        raise UnsupportedField(line)

    value, line = fields["sizes"]
    parts = value.split()
    if len(parts) != 3:
        raise MalformedHeader(f"sizes must have 3 entries: {line}")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise MalformedHeader(f"bad sizes value: {line}") from None
    if any(n <= 0 for n in dims):
        raise MalformedHeader(f"sizes must be positive: {line}")

    value, line = fields["type"]
    kind = _TYPE_TOKENS.get(value.lower())
    if kind is None:
        raise UnsupportedField(line)

    value, line = fields["encoding"]
    if value.lower() != "raw":
        raise UnsupportedField(line)

    if "endian" in fields:
        value, line = fields["endian"]
        if value.lower() != "little":
            raise UnsupportedField(line)

    if "spacings" in fields and "space directions" in fields:
        raise MalformedHeader("both 'spacings' and 'space directions' present")
    if "spacings" in fields:
        value, line = fields["spacings"]
        spacing = _parse_reals(value, line, 3)
    elif "space directions" in fields:
        value, line = fields["space directions"]
        vecs = value.split(") (")
        if len(vecs) != 3:
            raise MalformedHeader(f"space directions must have 3 vectors: {line}")
        vecs = [v if v.startswith("(") else "(" + v for v in vecs]
        vecs = [v if v.endswith(")") else v + ")" for v in vecs]
        rows = [_parse_vector(v, line) for v in vecs]
        if any(len(r) != 3 for r in rows):
            raise MalformedHeader(f"space directions vectors must be 3D: {line}")
        for i, row in enumerate(rows):
            if any(row[j] != 0.0 for j in range(3) if j != i):
                raise UnsupportedField(line)
        spacing = tuple(rows[i][i] for i in range(3))
    else:
        raise MalformedHeader(f"{path}: missing 'spacings' or 'space directions'")
    if any(s <= 0 for s in spacing):
        raise UnsupportedField(line)

    origin = (0.0, 0.0, 0.0)
    if "space origin" in fields:
        value, line = fields["space origin"]
        origin = _parse_vector(value, line)
        if len(origin) != 3:
            raise MalformedHeader(f"space origin must be 3D: {line}")

    dtype = SCALAR_KINDS[kind].newbyteorder("<")
    needed = dims[0] * dims[1] * dims[2] * dtype.itemsize
    payload = blob[payload_at:]
    if len(payload) < needed:
        raise TruncatedPayload(
            f"{path}: payload holds {len(payload)} bytes, header requires {needed}"
        )
    flat = np.frombuffer(payload[:needed], dtype=dtype)
    data = flat.reshape(dims[2], dims[1], dims[0])  # x-fastest flat order

    if as_labels:
        if kind != "u8":
            raise UnsupportedField(fields["type"][1])
        return LabelVolume(labels=data.copy(), spacing=spacing, origin=origin)
    return ScalarVolume(data=data.copy(), spacing=spacing, origin=origin, scalar_kind=kind)


def write_nrrd(vol: ScalarVolume | LabelVolume, path) -> None:
    """Write a volume such that ``read_nrrd`` reproduces it exactly."""
    arr = grid_array(vol)
    kind = "u8" if isinstance(vol, LabelVolume) else vol.scalar_kind
    nx, ny, nz = vol.dims
    header = [
        "NRRD0004",
        "dimension: 3",
        f"sizes: {nx} {ny} {nz}",
        f"type: {_CANONICAL_TYPE[kind]}",
        "encoding: raw",
        "endian: little",
        "spacings: " + " ".join(_fmt_real(s) for s in vol.spacing),
        "space origin: (" + ",".join(_fmt_real(o) for o in vol.origin) + ")",
    ]
    payload = np.ascontiguousarray(arr, dtype=SCALAR_KINDS[kind].newbyteorder("<"))
    try:
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n\n").encode("ascii"))
            fh.write(payload.tobytes(order="C"))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def volume_to_nrrd_bytes(vol: ScalarVolume | LabelVolume) -> bytes:
    """Serialize to NRRD in memory (used by the HTTP service)."""
    arr = grid_array(vol)
    kind = "u8" if isinstance(vol, LabelVolume) else vol.scalar_kind
    nx, ny, nz = vol.dims
    header = (
        "NRRD0004\n"
        "dimension: 3\n"
        f"sizes: {nx} {ny} {nz}\n"
        f"type: {_CANONICAL_TYPE[kind]}\n"
        "encoding: raw\n"
        "endian: little\n"
        "spacings: " + " ".join(_fmt_real(s) for s in vol.spacing) + "\n"
        "space origin: (" + ",".join(_fmt_real(o) for o in vol.origin) + ")\n"
        "\n"
    )
    payload = np.ascontiguousarray(arr, dtype=SCALAR_KINDS[kind].newbyteorder("<"))
    return header.encode("ascii") + payload.tobytes(order="C")

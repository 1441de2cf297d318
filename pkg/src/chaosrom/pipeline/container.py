"""Binary snapshot container: a small self-describing file for dense
float64 matrices.

Layout: magic "OPNF", u32 format version, u32 metadata length, metadata
(UTF-8 JSON, sorted keys), then the payload as row-major little-endian
IEEE-754 doubles. The metadata always carries shape, dt, t0, system tag,
and the SHA-256 of the payload; extra keys ride along untouched, which
is how bases and operators store their side arrays.

Reads are strict: wrong magic, unknown version, payload length not
exactly n*k*8, or a hash mismatch all fail loudly instead of returning
partial data.
"""

import hashlib
import json
import struct

import numpy as np

from ..errors import ConfigurationError
from ..snapshots import SnapshotMatrix

MAGIC = b"OPNF"
FORMAT_VERSION = 1

# Keys the writer owns; extras may not collide with them.
_RESERVED = {"shape", "dt", "t0", "system", "sha256", "format_version"}


def write_container(path, data, dt: float, t0: float = 0.0,
                    system: str | None = None, extras: dict | None = None):
    """Write a 2-D float64 matrix with its metadata; returns the path."""
    data = np.ascontiguousarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ConfigurationError(f"container payload must be 2-D, got {data.ndim}-D")
    if extras:
        clash = _RESERVED & set(extras)
        if clash:
            raise ConfigurationError(f"extras collide with reserved keys: {clash}")
    payload = data.astype("<f8", copy=False).tobytes()
    meta = {
        "shape": [int(data.shape[0]), int(data.shape[1])],
        "dt": float(dt),
        "t0": float(t0),
        "system": system,
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    if extras:
        meta.update(extras)
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":"),
                      allow_nan=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(payload)
    return path


def read_container(path):
    """Read and verify a container.

    Returns (SnapshotMatrix, metadata dict); the metadata keeps any
    extra keys the writer stored.
    """
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    with fh:
        head = fh.read(12)
        if len(head) < 12 or head[:4] != MAGIC:
            raise ConfigurationError(f"{path}: not a snapshot container")
        version, meta_len = struct.unpack("<II", head[4:])
        if version > FORMAT_VERSION:
            raise ConfigurationError(
                f"{path}: format version {version} is newer than "
                f"{FORMAT_VERSION}")
        blob = fh.read(meta_len)
        if len(blob) != meta_len:
            raise ConfigurationError(f"{path}: truncated metadata block")
        try:
            meta = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"{path}: bad metadata ({exc})") from exc
        for key in ("shape", "dt", "t0", "sha256"):
            if key not in meta:
                raise ConfigurationError(f"{path}: metadata missing '{key}'")
        n, k = (int(v) for v in meta["shape"])
        payload = fh.read()
    if len(payload) != n * k * 8:
        raise ConfigurationError(
            f"{path}: payload is {len(payload)} bytes, expected exactly "
            f"{n * k * 8} for shape {n}x{k}")
    if hashlib.sha256(payload).hexdigest() != meta["sha256"]:
        raise ConfigurationError(f"{path}: content hash mismatch, file corrupt")
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(n, k)
    snap = SnapshotMatrix(data=data, dt=float(meta["dt"]),
                          t0=float(meta["t0"]), system=meta.get("system"))
    return snap, meta


def write_basis(path, basis, center: bool = True):
    """Persist a reduced basis: V as payload, mean and singular values
    in the metadata."""
    return write_container(
        path, basis.basis, dt=1.0, system="basis",
        extras={
            "kind": "basis",
            "mean": [float(v) for v in basis.mean],
            "singular_values": [float(v) for v in basis.singular_values],
            "center": bool(center),
        })


def read_basis(path):
    from ..reduction import ReducedBasis
    snap, meta = read_container(path)
    if meta.get("kind") != "basis":
        raise ConfigurationError(f"{path}: not a basis container")
    return ReducedBasis(
        basis=snap.data,
        mean=np.asarray(meta["mean"], dtype=np.float64),
        singular_values=np.asarray(meta["singular_values"], dtype=np.float64),
    ), meta


def write_operators(path, model):
    """Persist learned operators as the stacked block matrix
    [c | A | H | B] with provenance in the metadata."""
    blocks = [model.c_hat[:, np.newaxis], model.A_hat, model.H_hat]
    if model.B_hat is not None:
        blocks.append(model.B_hat)
    stacked = np.concatenate(blocks, axis=1)
    reg = getattr(model, "regularizer", None)
    extras = {
        "kind": "operators",
        "r": int(model.r),
        "m": int(model.m),
        "solver": getattr(model, "solver", "unknown"),
        "residual": float(getattr(model, "residual", 0.0)),
        "lambdas": None if reg is None else [reg.lambda1, reg.lambda2,
                                             reg.lambda3, reg.lambda4],
    }
    return write_container(path, stacked, dt=1.0, system="operators",
                           extras=extras)


def read_operators(path):
    from ..opinf import RegularizerSpec, RomOperators, quadratic_feature_count
    snap, meta = read_container(path)
    if meta.get("kind") != "operators":
        raise ConfigurationError(f"{path}: not an operators container")
    r, m = int(meta["r"]), int(meta["m"])
    w = quadratic_feature_count(r)
    O = snap.data
    if O.shape != (r, 1 + r + w + m):
        raise ConfigurationError(
            f"{path}: operator block shape {O.shape} does not match "
            f"r={r}, m={m}")
    lambdas = meta.get("lambdas")
    reg = None if lambdas is None else RegularizerSpec(*lambdas)
    model = RomOperators(
        c_hat=O[:, 0].copy(), A_hat=O[:, 1:1 + r].copy(),
        H_hat=O[:, 1 + r:1 + r + w].copy(),
        B_hat=O[:, 1 + r + w:].copy() if m > 0 else None,
        regularizer=reg, solver=meta.get("solver", "unknown"),
        residual=float(meta.get("residual", 0.0)))
    return model, meta

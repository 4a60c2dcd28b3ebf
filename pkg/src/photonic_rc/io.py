"""Readers and writers for every file the harness emits.

Each writer has a matching reader so outputs can be round-tripped.
"""
import csv
import json
import struct

import numpy as np

from .encoder import BooleanImage
from .optics import TransferMatrix
from .tasks import LabeledBatch
from .trainer import TrainingTrace

# --- transfer matrices: two little-endian uint64 dims, then (re, im) float64 pairs row-major


def save_matrix(path, matrix: TransferMatrix):
    rows, cols = matrix.shape
    body = np.empty((rows, cols, 2), dtype="<f8")
    body[..., 0] = matrix.entries.real
    body[..., 1] = matrix.entries.imag
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", rows, cols))
        fh.write(body.tobytes(order="C"))


def load_matrix(path, seed=None) -> TransferMatrix:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError(f"{path}: truncated header")
        rows, cols = struct.unpack("<QQ", header)
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != rows * cols * 2:
        raise ValueError(f"{path}: expected {rows}x{cols} complex entries, found {data.size // 2}")
    pairs = data.reshape(rows, cols, 2)
    return TransferMatrix(pairs[..., 0] + 1j * pairs[..., 1], seed)


# --- Boolean images: row-major 0/1 CSV


def write_image_csv(path, image: BooleanImage):
    np.savetxt(path, image.active.astype(int), fmt="%d", delimiter=",")


def read_image_csv(path) -> BooleanImage:
    return BooleanImage(np.loadtxt(path, delimiter=",", dtype=int, ndmin=2) == 1)


# --- readout weights: a single 0/1 line


def format_weights(w) -> str:
    return "".join("1" if b else "0" for b in np.asarray(w).ravel()) + "\n"


def write_weights(path, w):
    with open(path, "w") as fh:
        fh.write(format_weights(w))


def read_weights(path) -> np.ndarray:
    with open(path) as fh:
        line = fh.read().strip()
    if not line or set(line) - {"0", "1"}:
        raise ValueError(f"{path}: not a 0/1 weight line")
    return np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")


# --- training trace


def write_trace(path, trace: TrainingTrace):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["epoch", "epsilon", "flipped_index", "accepted"])
        for k, (e, l, a) in enumerate(zip(trace.eps, trace.flipped, trace.accepted)):
            out.writerow([k, repr(float(e)), l, int(a)])


def read_trace(path) -> TrainingTrace:
    trace = TrainingTrace()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            trace.eps.append(float(row["epsilon"]))
            trace.flipped.append(int(row["flipped_index"]))
            trace.accepted.append(row["accepted"] == "1")
    return trace


# --- labeled batches


def write_batch(path, batch: LabeledBatch):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["index", "digit", "target"])
        for i, (d, t) in enumerate(zip(batch.digits, batch.targets)):
            out.writerow([i, int(d), repr(float(t))])


def read_batch(path) -> LabeledBatch:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return LabeledBatch(np.array([int(r["digit"]) for r in rows], dtype=int),
                        np.array([float(r["target"]) for r in rows]))


# --- near field


def write_nearfield_csv(path, layout, powers):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["node_index", "ring", "angle", "power"])
        for i in range(layout.n_nodes):
            out.writerow([i, int(layout.ring[i]), repr(float(layout.angle[i])), repr(float(powers[i]))])


def read_nearfield_csv(path):
    """Returns ``(ring, angle, power)`` arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return (np.array([int(r["ring"]) for r in rows]),
            np.array([float(r["angle"]) for r in rows]),
            np.array([float(r["power"]) for r in rows]))


def write_pgm(path, raster):
    raster = np.asarray(raster, dtype=np.uint8)
    h, w = raster.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(raster.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    if tokens[0] != b"P5" or int(tokens[3]) != 255:
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    w, h = int(tokens[1]), int(tokens[2])
    pos += 1
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)


# --- summaries


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)

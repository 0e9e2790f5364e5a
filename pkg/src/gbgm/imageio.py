"""Image files and dataset directories.

Binary PGM/PPM (P5/P6, 8- or 16-bit) are read and written natively; PNG goes
through Pillow.  Loaded images are float64 ``(H, W, C)`` arrays in [0, 1]
with ``C`` in {1, 3}.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMATS = ("png", "pgm", "ppm")


class ImageFormatError(ValueError):
    """The file is not in a supported format."""


class CorruptImageError(ValueError):
    """The file claims a supported format but its header or payload is damaged."""


def _format_of(path: Path) -> str:
    ext = path.suffix.lower().lstrip(".")
    if ext not in FORMATS:
        raise ImageFormatError(f"unsupported image extension {path.suffix!r} (expected one of {FORMATS})")
    return ext


def _read_pnm(data: bytes, path) -> tuple[np.ndarray, int]:
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        if magic in (b"P1", b"P2", b"P3", b"P4"):
            raise ImageFormatError(f"{path}: ASCII/bitmap netpbm variant {magic.decode()} is not supported")
        raise CorruptImageError(f"{path}: bad netpbm magic {magic!r}")
    channels = 1 if magic == b"P5" else 3
    fields = []
    pos = 2
    n = len(data)
    while len(fields) < 3:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and data[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise CorruptImageError(f"{path}: truncated or malformed header")
        fields.append(int(data[start:pos]))
    if pos >= n or not data[pos:pos + 1].isspace():
        raise CorruptImageError(f"{path}: truncated or malformed header")
    pos += 1
    width, height, maxval = fields
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise CorruptImageError(f"{path}: invalid header values {width}x{height} maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    payload = data[pos:pos + count * dtype.itemsize]
    if len(payload) < count * dtype.itemsize:
        raise CorruptImageError(f"{path}: pixel data truncated")
    pixels = np.frombuffer(payload, dtype=dtype, count=count).reshape(height, width, channels)
    return pixels, maxval


def load_image(path) -> np.ndarray:
    """Load a PNG, PGM or PPM file as float64 ``(H, W, C)`` in [0, 1].

    Pixels are divided by the format's maxval; an alpha channel is dropped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image: {path}")
    fmt = _format_of(path)
    if fmt in ("pgm", "ppm"):
        pixels, maxval = _read_pnm(path.read_bytes(), path)
        return pixels.astype(np.float64) / maxval
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            if im.mode.startswith("I"):
                # 16-bit grayscale
                arr = np.asarray(im, dtype=np.float64) / 65535.0
                return np.clip(arr, 0.0, 1.0)[:, :, None]
            im = im.convert("L" if im.mode in ("1", "L", "LA") else "RGB")
            arr = np.asarray(im, dtype=np.float64) / 255.0
    except UnidentifiedImageError as exc:
        raise CorruptImageError(f"{path}: not a readable PNG") from exc
    except (OSError, SyntaxError) as exc:
        raise CorruptImageError(f"{path}: {exc}") from exc
    return arr[:, :, None] if arr.ndim == 2 else arr


def resize_image(image, h: int, w: int) -> np.ndarray:
    """Bilinear resize of a float ``(H, W, C)`` image (per channel, via Pillow)."""
    from PIL import Image

    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    if h < 1 or w < 1:
        raise ValueError(f"target size must be positive, got {h}x{w}")
    planes = [
        np.asarray(Image.fromarray(img[:, :, k].astype(np.float32)).resize((w, h), Image.BILINEAR))
        for k in range(img.shape[2])
    ]
    return np.clip(np.stack(planes, axis=2).astype(np.float64), 0.0, 1.0)

def _to_samples(array, maxval: int) -> np.ndarray:
    arr = np.asarray(array)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.dtype == bool or np.issubdtype(arr.dtype, np.integer):
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise ValueError("integer arrays are treated as binary masks and must hold only 0 and 1")
        return arr.astype(np.int64) * maxval
    arr = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot save non-finite values")
    return np.rint(np.clip(arr, 0.0, 1.0) * maxval).astype(np.int64)


def save_image(array, path, format: str | None = None, maxval: int = 255) -> None:
    """Write an image or a mask.

    Float arrays are images in [0, 1] and are scaled by ``maxval``.  Boolean
    and integer arrays are binary masks and are written as 0 / ``maxval``.
    ``maxval`` above 255 produces 16-bit PGM/PPM (PNG supports 8-bit only
    for RGB, 16-bit for grayscale).
    """
    path = Path(path)
    fmt = (format or _format_of(path)).lower()
    if fmt not in FORMATS:
        raise ImageFormatError(f"unsupported format {fmt!r} (expected one of {FORMATS})")
    if not 0 < maxval < 65536:
        raise ValueError(f"maxval must lie in 1..65535, got {maxval}")
    samples = _to_samples(array, maxval)
    if samples.ndim == 3 and samples.shape[2] != 3:
        raise ValueError(f"cannot save an image with {samples.shape[2]} channels")
    if samples.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D array, got shape {samples.shape}")
    rgb = samples.ndim == 3
    if fmt in ("pgm", "ppm"):
        if fmt == "pgm" and rgb:
            raise ValueError("PGM holds a single channel; use PPM for RGB")
        if fmt == "ppm" and not rgb:
            samples = np.repeat(samples[:, :, None], 3, axis=2)
        dtype = ">u2" if maxval > 255 else "u1"
        h, w = samples.shape[:2]
        header = f"{'P6' if fmt == 'ppm' else 'P5'}\n{w} {h}\n{maxval}\n".encode("ascii")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(samples.astype(dtype).tobytes())
        return
    from PIL import Image

    if maxval > 255:
        if rgb:
            raise ValueError("16-bit PNG output is only supported for single-channel arrays")
        Image.fromarray(samples.astype(np.uint16)).save(path, format="PNG")
    else:
        Image.fromarray(samples.astype(np.uint8)).save(path, format="PNG")


@dataclass(frozen=True)
class DatasetEntry:
    path: Path
    index: int


def ingest_dir(path, glob: str = "*") -> list[DatasetEntry]:
    """Files under ``path`` matching ``glob``, indexed in byte-wise path order.

    Order is by the UTF-8 bytes of the POSIX-style path relative to ``path``,
    so indices (and the RNG streams derived from them) do not depend on the
    platform or on directory listing order.  ``**`` in the pattern recurses.
    """
    root = Path(path)
    if not root.is_dir():
        raise NotADirectoryError(f"not a directory: {root}")
    if not os.access(root, os.R_OK | os.X_OK):
        raise PermissionError(f"directory is not readable: {root}")
    files = [p for p in root.glob(glob) if p.is_file()]
    files.sort(key=lambda p: os.fsencode(p.relative_to(root).as_posix()))
    return [DatasetEntry(p, i) for i, p in enumerate(files)]

"""Binary Netpbm (PGM/PPM) I/O, intensity remapping, and difference overlays.

Images are 2-D float64 arrays indexed ``[row, col]`` (y down, x right).
Masks are boolean arrays of the same shape. RGB overlays are
``(H, W, 3)`` uint8 arrays.
"""

from __future__ import annotations

import numpy as np


class PnmError(Exception):
    """Malformed or unsupported Netpbm file."""


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next whitespace-delimited header token, skipping comments."""
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PnmError("truncated header")
    return data[start:pos], pos


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int, int, int]:
    if data[:2] != magic:
        raise PnmError(
            f"unsupported magic {data[:2]!r} (expected {magic.decode()})"
        )
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _next_token(data, pos)
        try:
            value = int(tok)
        except ValueError:
            raise PnmError(f"invalid {name} field {tok!r}") from None
        fields.append(value)
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmError(f"invalid dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise PnmError(f"invalid maxval {maxval}")
    # exactly one whitespace byte separates the header from the samples
    return width, height, maxval, pos + 1


def load_pgm(path) -> np.ndarray:
    """Read a binary PGM (P5). 16-bit samples are big-endian."""
    with open(path, "rb") as fh:
        data = fh.read()
    width, height, maxval, offset = _parse_header(data, b"P5")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    payload = data[offset:offset + count * dtype.itemsize]
    if len(payload) < count * dtype.itemsize:
        raise PnmError(
            f"truncated payload: expected {count * dtype.itemsize} bytes, "
            f"got {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=dtype, count=count)
    return pixels.reshape(height, width).astype(np.float64)


def _quantize(image: np.ndarray, maxval: int) -> np.ndarray:
    # round half-up, then clamp into [0, maxval]
    rounded = np.floor(np.asarray(image, dtype=np.float64) + 0.5)
    return np.clip(rounded, 0, maxval)


def save_pgm(image: np.ndarray, path, maxval: int = 255) -> None:
    """Write a binary PGM (P5); intensities are clamped and rounded."""
    if maxval not in (255, 65535):
        raise ValueError(f"maxval must be 255 or 65535, got {maxval}")
    image = np.atleast_2d(np.asarray(image, dtype=np.float64))
    height, width = image.shape
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    samples = _quantize(image, maxval).astype(dtype)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n{maxval}\n".encode())
        fh.write(samples.tobytes())


def save_ppm(rgb: np.ndarray, path) -> None:
    """Write a binary PPM (P6) from an (H, W, 3) uint8 array."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got shape {rgb.shape}")
    height, width = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode())
        fh.write(rgb.astype(np.uint8).tobytes())


def remap_intensity(image: np.ndarray, mode: str, gamma: float = 2.0) -> np.ndarray:
    """Synthesize a second 'modality' by remapping intensities pixelwise.

    Modes: ``invert`` (reflect about the image's min/max midpoint),
    ``gamma`` (power law on the normalized range), ``neglog``
    (negated log1p, rescaled back to the input range).
    """
    image = np.asarray(image, dtype=np.float64)
    if image.size == 0:
        raise ValueError("empty image")
    lo, hi = image.min(), image.max()
    if mode == "invert":
        return (lo + hi) - image
    if mode == "gamma":
        if gamma <= 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        span = hi - lo
        if span == 0:
            return image.copy()
        return lo + span * ((image - lo) / span) ** gamma
    if mode == "neglog":
        if lo < 0:
            raise ValueError("neglog requires nonnegative intensities")
        mapped = -np.log1p(image)
        mlo, mhi = mapped.min(), mapped.max()
        if mhi == mlo:
            return image.copy()
        return lo + (hi - lo) * (mapped - mlo) / (mhi - mlo)
    raise ValueError(f"unknown remap mode {mode!r}")


def overlay_diff(
    fixed: np.ndarray,
    registered: np.ndarray,
    mask: np.ndarray,
    tol: float = 0.1,
) -> np.ndarray:
    """Grey/fuchsia difference overlay.

    Both images are normalized to their joint masked intensity range.
    Agreeing pixels (within ``tol`` of that range) render grey, disagreeing
    pixels fuchsia, masked-out pixels black.
    """
    fixed = np.asarray(fixed, dtype=np.float64)
    registered = np.asarray(registered, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if fixed.shape != registered.shape or fixed.shape != mask.shape:
        raise ValueError(
            f"dimension mismatch: {fixed.shape} vs {registered.shape} "
            f"vs {mask.shape}"
        )
    out = np.zeros(fixed.shape + (3,), dtype=np.uint8)
    if not mask.any():
        return out
    values = np.concatenate([fixed[mask], registered[mask]])
    lo, hi = values.min(), values.max()
    span = hi - lo if hi > lo else 1.0
    nf = (fixed - lo) / span
    nr = (registered - lo) / span
    grey = np.clip(np.round(255.0 * nf), 0, 255).astype(np.uint8)
    agree = np.abs(nf - nr) <= tol
    out[..., 0] = np.where(agree, grey, 255)
    out[..., 1] = np.where(agree, grey, (grey * 0.3).astype(np.uint8))
    out[..., 2] = np.where(agree, grey, 255)
    out[~mask] = 0
    return out

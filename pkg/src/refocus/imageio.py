"""Image and matrix file IO.

Binary netpbm rasters (PGM type P5 for grayscale, PPM type P6 for
color) carry quantized pixel data; plain text files carry exact float
matrices. Pixels map to [0, 1] on read by dividing by the maxval and
are quantized on write by round half up, so a read/write cycle at the
same maxval reproduces the file byte for byte.
"""

from __future__ import annotations

import numpy as np

from .errors import FormatError, InvalidParameterError

_WHITESPACE = b" \t\n\r\x0b\x0c"
_MAXVALS = (255, 65535)


class _HeaderScanner:
    """Tokenizer for netpbm headers that tracks byte offsets."""

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data = self.data
        while self.pos < len(data):
            byte = data[self.pos : self.pos + 1]
            if byte in (b"#",):
                end = data.find(b"\n", self.pos)
                if end < 0:
                    raise FormatError("unterminated comment", offset=self.pos)
                self.pos = end + 1
            elif byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def token(self, what):
        self._skip_separators()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in _WHITESPACE:
            if data[self.pos : self.pos + 1] == b"#":
                break
            self.pos += 1
        if self.pos == start:
            raise FormatError(f"missing {what}", offset=start)
        return data[start : self.pos], start

    def integer(self, what):
        raw, start = self.token(what)
        if not raw.isdigit():
            raise FormatError(f"invalid {what} {raw!r}", offset=start)
        return int(raw)

    def raster_start(self):
        if self.pos >= len(self.data):
            raise FormatError("missing raster", offset=self.pos)
        byte = self.data[self.pos : self.pos + 1]
        if byte not in _WHITESPACE:
            raise FormatError("expected whitespace before raster", offset=self.pos)
        self.pos += 1
        return self.pos


def _parse_netpbm(data):
    scanner = _HeaderScanner(data)
    magic, start = scanner.token("magic number")
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported magic number {magic!r}", offset=start)
    width = scanner.integer("width")
    height = scanner.integer("height")
    maxval = scanner.integer("maxval")
    if width <= 0 or height <= 0:
        raise FormatError(f"invalid dimensions {width}x{height}", offset=start)
    if maxval not in _MAXVALS:
        raise FormatError(f"unsupported maxval {maxval}", offset=start)
    offset = scanner.raster_start()
    channels = 3 if magic == b"P6" else 1
    itemsize = 2 if maxval > 255 else 1
    expected = width * height * channels * itemsize
    raster = data[offset : offset + expected]
    if len(raster) < expected:
        raise FormatError(
            f"raster truncated, expected {expected} bytes", offset=len(data)
        )
    dtype = ">u2" if itemsize == 2 else np.uint8
    samples = np.frombuffer(raster, dtype=dtype).astype(float) / maxval
    if channels == 1:
        return samples.reshape(height, width)
    return np.moveaxis(samples.reshape(height, width, 3), 2, 0)


def read_image(path):
    """Read a binary PGM or PPM file as floats in [0, 1].

    Parameters
    ----------
    path : str or Path
        File to read.

    Returns
    -------
    ndarray
        Shape (n1, n2) for PGM, (3, n1, n2) for PPM.
    """
    with open(path, "rb") as fh:
        return _parse_netpbm(fh.read())


def _quantize(image, maxval):
    clipped = np.clip(np.asarray(image, dtype=float), 0.0, 1.0)
    return np.floor(clipped * maxval + 0.5)


def write_image(path, image, maxval=255):
    """Write an image as binary PGM (2-D input) or PPM (3, n1, n2 input).

    Values are clipped to [0, 1] and quantized by round half up. A
    maxval of 65535 writes big-endian 16-bit samples.
    """
    if maxval not in _MAXVALS:
        raise InvalidParameterError(f"maxval must be one of {_MAXVALS}, got {maxval}")
    image = np.asarray(image, dtype=float)
    if image.ndim == 2:
        magic, height, width = b"P5", image.shape[0], image.shape[1]
        samples = _quantize(image, maxval)
    elif image.ndim == 3 and image.shape[0] == 3:
        magic, height, width = b"P6", image.shape[1], image.shape[2]
        samples = np.moveaxis(_quantize(image, maxval), 0, 2)
    else:
        raise InvalidParameterError(
            f"image must be (n1, n2) or (3, n1, n2), got {image.shape}"
        )
    if height == 0 or width == 0:
        raise InvalidParameterError("image must be non-empty")
    dtype = ">u2" if maxval > 255 else np.uint8
    header = magic + b"\n%d %d\n%d\n" % (width, height, maxval)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(samples.astype(dtype).tobytes())


def read_matrix(path):
    """Read a whitespace separated text matrix of floats."""
    try:
        values = np.loadtxt(path, dtype=float, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"invalid matrix file {path}: {exc}") from exc
    if values.size == 0:
        raise FormatError(f"empty matrix file {path}")
    return values


def write_matrix(path, values):
    """Write a 2-D float array as text, one row per line, full precision."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise InvalidParameterError(f"matrix must be 2-D, got shape {values.shape}")
    np.savetxt(path, values, fmt="%.17g")

"""Exception types raised across the engine."""

from __future__ import annotations


class DepthMatteError(Exception):
    """Base class for all engine errors."""


class IoFailure(DepthMatteError):
    """A file could not be read or written."""


class SizeMismatch(DepthMatteError):
    """A depth file's byte length does not match the declared raster dimensions."""


class DecodeFailure(DepthMatteError):
    """An image file exists but could not be decoded."""


class BadKernel(DepthMatteError):
    """A kernel size or filter parameter outside the supported set."""


class BadTarget(DepthMatteError):
    """Upscale target smaller than the source raster."""


class DimensionMismatch(DepthMatteError):
    """Two rasters that must share dimensions do not."""


class ValidationError(DepthMatteError):
    """A parameter update contains out-of-range or unknown fields.

    `fields` lists the offending field names; the message spells out the
    allowed ranges so clients can surface it directly.
    """

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


class SourceExhausted(DepthMatteError):
    """A frame source ran out before the requested frame count."""


class BindFailure(DepthMatteError):
    """The tuning service could not bind its listen address."""

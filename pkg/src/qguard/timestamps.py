"""UTC timestamp helpers shared by calibration data, adapters, and reports.

All timestamps in this package are timezone-aware UTC datetimes; the wire
form is RFC3339 with a trailing "Z".
"""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import DocumentError


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def parse_timestamp(value: object, path: str) -> datetime:
    """Parse an RFC3339 string into an aware UTC datetime.

    Accepts a "Z" suffix as well as explicit offsets; naive timestamps are
    rejected because the freshness logic compares across sources.
    """
    if not isinstance(value, str):
        raise DocumentError(path, f"expected an RFC3339 timestamp string, got {value!r}")
    try:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise DocumentError(path, f"not an RFC3339 timestamp: {value!r}") from None
    if parsed.tzinfo is None:
        raise DocumentError(path, f"timestamp lacks a UTC offset: {value!r}")
    return parsed.astimezone(timezone.utc)


def format_timestamp(moment: datetime) -> str:
    """Render an aware datetime as RFC3339 UTC with a "Z" suffix."""
    if moment.tzinfo is None:
        raise ValueError("naive datetime cannot be formatted as a UTC timestamp")
    return moment.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")

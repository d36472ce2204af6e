"""Delivery-channel catalog and interval matching."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .errors import ConfigurationError, ParseError
from .interval import Interval


@dataclass(frozen=True)
class Channel:
    name: str
    target_interval: Interval


class ChannelCatalog:
    def __init__(self, channels: Iterable[Channel]):
        self.channels: tuple[Channel, ...] = tuple(channels)
        if not self.channels:
            raise ConfigurationError("channel catalog is empty")
        names = [c.name for c in self.channels]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ConfigurationError(f"duplicate channel names: {dupes}")

    def __iter__(self):
        return iter(self.channels)

    def __len__(self):
        return len(self.channels)

    def __getitem__(self, name: str) -> Channel:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[float]]]) -> "ChannelCatalog":
        return cls(Channel(name, Interval(*bounds)) for name, bounds in pairs)


def match_degree(a: Interval, b: Interval) -> float:
    """Overlap length over union length of two closed intervals.

    Identical points score 1. A point lying inside a non-degenerate interval
    of width ``w`` scores ``1 / (w + 1)``; pure overlap/union would give 0.
    """
    a_point, b_point = a.is_degenerate(), b.is_degenerate()
    if a_point and b_point:
        return 1.0 if a.lo == b.lo else 0.0
    if a_point or b_point:
        point, span = (a, b) if a_point else (b, a)
        return 1.0 / (span.width + 1.0) if span.lo <= point.lo <= span.hi else 0.0
    overlap = min(a.hi, b.hi) - max(a.lo, b.lo)
    if overlap <= 0.0:
        return 0.0
    return overlap / (max(a.hi, b.hi) - min(a.lo, b.lo))


def recommend(news: Interval, catalog: ChannelCatalog, top_k: int = 1) -> list[tuple[Channel, float]]:
    """Channels ranked by match degree with ``news``.

    Ties go to the narrower channel interval, then to the smaller name.
    """
    if top_k < 1:
        raise ConfigurationError("top_k must be at least 1")
    if len(catalog) == 0:
        raise ConfigurationError("channel catalog is empty")
    scored = [(c, match_degree(news, c.target_interval)) for c in catalog]
    scored.sort(key=lambda cd: (-cd[1], cd[0].target_interval.width, cd[0].name))
    return scored[:top_k]


def load_catalog(path: str | os.PathLike) -> ChannelCatalog:
    """Read ``name,lo,hi`` records (header row required)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_catalog(fh, str(path))


def default_catalog() -> ChannelCatalog:
    """The bundled ten-channel catalog of preset attention ranges."""
    ref = resources.files("grannet") / "data" / "channels.csv"
    with ref.open("r", encoding="utf-8", newline="") as fh:
        return _parse_catalog(fh, "channels.csv")


def _parse_catalog(fh, source: str) -> ChannelCatalog:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["name", "lo", "hi"]:
        raise ParseError(f"{source}: expected header name,lo,hi", row=1)
    channels = []
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise ParseError(f"{source}: expected 3 fields, got {len(row)}", row=rowno)
        name = row[0].strip()
        bounds = []
        for col, cell in zip(("lo", "hi"), row[1:]):
            try:
                bounds.append(float(cell))
            except ValueError:
                raise ParseError(f"{source}: not a number: {cell!r}", row=rowno, column=col) from None
        try:
            channels.append(Channel(name, Interval(*bounds)))
        except ValueError as exc:
            raise ParseError(f"{source}: {exc}", row=rowno) from None
    return ChannelCatalog(channels)


def save_catalog(catalog: ChannelCatalog, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "lo", "hi"])
        for c in catalog:
            w.writerow([c.name, repr(c.target_interval.lo), repr(c.target_interval.hi)])

"""Config parsing and result emission (CSV, JSON, SVG)."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in raw:
            raise ConfigError(key, "duplicate key")
        raw[key] = value
    return raw


def read_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    return parse_config_text(text)


def _convert(key, kind, value):
    try:
        if kind is float:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError
            return out
        if kind is int:
            return int(value)
        if kind == "floats":
            return [float(v) for v in str(value).split(",") if v.strip()]
        if isinstance(kind, tuple):
            if value not in kind:
                raise ValueError
            return value
        return str(value)
    except (TypeError, ValueError):
        expected = "one of " + ", ".join(kind) if isinstance(kind, tuple) else getattr(kind, "__name__", kind)
        raise ConfigError(key, f"invalid value {value!r} (expected {expected})") from None


def resolve_config(raw: dict, schema: dict) -> dict:
    """Reject unknown keys, type-check the rest and fill defaults from ``schema``.

    ``schema`` maps key -> (type, default), where type is ``float``, ``int``,
    ``str``, ``"floats"`` (comma list) or a tuple of allowed strings.
    """
    for key in raw:
        if key not in schema:
            raise ConfigError(key, "unknown key")
    resolved = {}
    for key, (kind, default) in schema.items():
        resolved[key] = _convert(key, kind, raw[key]) if key in raw else default
    return resolved


def format_real(v) -> str:
    return format(float(v), ".16e")


def write_csv(path, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_real(row[c]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def check_finite(columns, rows, may_diverge=()):
    for row in rows:
        for c in columns:
            if c not in may_diverge and not math.isfinite(float(row[c])):
                raise FloatingPointError(f"column {c} produced a non-finite value")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _fmt_tick(v):
    return format(v, ".3g")


def write_svg_line_plot(path, x, y, xlabel, ylabel, title="", width=640, height=420) -> None:
    """Single polyline with labelled axes and min/max ticks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    left, right, top, bottom = 80, 20, 40, 60
    pw, ph = width - left - right, height - top - bottom
    xmin, xmax = float(x.min()), float(x.max())
    ymin, ymax = float(y.min()), float(y.max())
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    px = left + (x - xmin) / (xmax - xmin) * pw
    py = top + ph - (y - ymin) / (ymax - ymin) * ph
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    x0, y0 = left, top + ph
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{left + pw}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{top}" x2="{x0}" y2="{y0}" stroke="black"/>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{pts}"/>',
        f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle" font-size="14">{xlabel}</text>',
        f'<text x="20" y="{top + ph / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 20 {top + ph / 2})">{ylabel}</text>',
        f'<text x="{x0}" y="{y0 + 18}" text-anchor="middle" font-size="11">{_fmt_tick(xmin)}</text>',
        f'<text x="{left + pw}" y="{y0 + 18}" text-anchor="middle" font-size="11">{_fmt_tick(xmax)}</text>',
        f'<text x="{x0 - 6}" y="{y0}" text-anchor="end" font-size="11">{_fmt_tick(ymin)}</text>',
        f'<text x="{x0 - 6}" y="{top + 4}" text-anchor="end" font-size="11">{_fmt_tick(ymax)}</text>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="15">{title}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")

"""Flat ``key = value`` experiment files.

Example::

    # EB against MP on three reference streams
    streams = uniform; beta(2,6); beta(5,5)
    methods = EB-CI, MP
    alpha = 0.05
    replications = 100
    checkpoints = log 10 10000 13
    scale = std
    seed = 7
    csv = fig1.csv

Blank lines and ``#`` comments are ignored. ``checkpoints`` is either a
list of integers or ``log LO HI K`` (K log-spaced integers, rounded and
de-duplicated). ``seed`` defaults to the ``VARCS_SEED`` environment
variable and then to 0. Relative output paths are taken as given, i.e.
relative to the working directory.
"""

import dataclasses
import os
import re

import numpy as np

from .harness import ExperimentSpec

SEED_ENV = "VARCS_SEED"
_STREAM_TOKEN = re.compile(r"[A-Za-z]+\s*(?:\([^)]*\))?")
_LIST_SPLIT = re.compile(r"[,;\s]+")
_INT_KEYS = ("replications", "seed", "n_jobs", "chunk")
_FLOAT_KEYS = ("alpha",)
_STR_KEYS = ("split", "scale", "csv", "svg")
KEYS = ("streams", "methods", "checkpoints") + _INT_KEYS + _FLOAT_KEYS + _STR_KEYS


def default_seed():
    """Seed from ``VARCS_SEED``; 0 if unset."""
    raw = os.environ.get(SEED_ENV, "").strip()
    if not raw:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def log_grid(lo, hi, k):
    """``k`` log-spaced integers from ``lo`` to ``hi`` (duplicates dropped)."""
    if not (1 <= lo <= hi) or k < 1:
        raise ValueError("need 1 <= lo <= hi and k >= 1")
    return tuple(int(v) for v in np.unique(np.rint(np.geomspace(lo, hi, k)).astype(int)))


def _checkpoints(value):
    parts = value.split()
    if parts and parts[0].lower() == "log":
        if len(parts) != 4:
            raise ValueError("checkpoints 'log' form is: log LO HI K")
        return log_grid(int(float(parts[1])), int(float(parts[2])), int(parts[3]))
    return tuple(int(float(p)) for p in _LIST_SPLIT.split(value.strip()) if p)


def parse_config_text(text, source="<config>"):
    """Parse config text into a dict of :class:`ExperimentSpec` keyword arguments."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in KEYS:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key == "streams":
                out[key] = tuple(re.sub(r"\s+", "", s) for s in _STREAM_TOKEN.findall(value))
            elif key == "methods":
                out[key] = tuple(p for p in _LIST_SPLIT.split(value) if p)
            elif key == "checkpoints":
                out[key] = _checkpoints(value)
            elif key in _INT_KEYS:
                out[key] = int(value, 0)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return out


def load_experiment(path):
    """Read an experiment file into an :class:`ExperimentSpec`."""
    with open(path, encoding="utf-8") as fh:
        kw = parse_config_text(fh.read(), source=str(path))
    kw.setdefault("seed", default_seed())
    return ExperimentSpec(**kw)


def dump_experiment(spec):
    """Inverse of :func:`parse_config_text` for an :class:`ExperimentSpec`."""
    lines = []
    for f in dataclasses.fields(spec):
        v = getattr(spec, f.name)
        if v is None:
            continue
        if f.name == "streams":
            v = "; ".join(v)
        elif f.name in ("methods", "checkpoints"):
            v = ", ".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"

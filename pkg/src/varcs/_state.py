"""Snapshot/restore of tracker state as plain JSON-compatible records."""

import numpy as np

from .config import TrackerConfig
from .estimators import EstimatorState

_REGISTRY = {}


class Snapshot:
    """Mixin giving trackers ``state_dict`` / ``from_state``."""

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        _REGISTRY[cls.__name__] = cls

    def state_dict(self):
        out = {"__class__": type(self).__name__}
        for k, v in vars(self).items():
            out[k] = _to_plain(v)
        return out

    @classmethod
    def from_state(cls, state):
        obj = cls.__new__(_REGISTRY.get(state.get("__class__"), cls))
        for k, v in state.items():
            if k != "__class__":
                setattr(obj, k, _from_plain(v))
        return obj


def _to_plain(v):
    if isinstance(v, TrackerConfig):
        return {"__config__": v.as_dict()}
    if isinstance(v, EstimatorState):
        return {"__est__": {k: _to_plain(x) for k, x in vars(v).items()}}
    if isinstance(v, Snapshot):
        return {"__tracker__": v.state_dict()}
    if isinstance(v, np.ndarray):
        return {"__array__": v.tolist()}
    if isinstance(v, np.generic):
        return v.item()
    return v


def _from_plain(v):
    if isinstance(v, dict):
        if "__config__" in v:
            return TrackerConfig.from_dict(v["__config__"])
        if "__est__" in v:
            return EstimatorState(**{k: _from_plain(x) for k, x in v["__est__"].items()})
        if "__array__" in v:
            return np.asarray(v["__array__"], dtype=float)
        if "__tracker__" in v:
            return Snapshot.from_state(v["__tracker__"])
    return v

"""Tracker configuration shared by every confidence-sequence object."""

import dataclasses
from dataclasses import asdict, dataclass
import math

MODES = ("cs", "ci")
SPLITS = ("halves", "log-horizon")


@dataclass(frozen=True)
class TrackerConfig:
    """Tuning knobs for the variance/mean trackers.

    Parameters
    ----------
    alpha : float
        Total error budget of the object the config is handed to.
    mode : {"cs", "ci"}
        ``"cs"`` tunes the plug-ins to be tight uniformly over time,
        ``"ci"`` tunes them for the fixed sample size ``horizon``.
    horizon : int, optional
        Planned sample size. Required in CI mode; also used by the
        ``"log-horizon"`` split.
    split : {"halves", "log-horizon"} or (float, float)
        How the lower bound's budget is divided between the mean radius
        (first entry) and the main variance radius (second entry). A
        tuple is taken as explicit values and must sum to that budget.
    c1, c2, c3, c4, c5 : float
        Plug-in constants (lambda cap, fourth-moment prior, variance
        prior, mean prior, Bennett lambda cap).
    cap : float
        Upper clamp applied to variance bounds; 1 by default, 1/4 is
        always valid for [0, 1]-valued data.
    allow_zero_constants : bool
        Permit ``c2 == 0`` or ``c3 == 0``.
    running_intersection : bool
        Report the running intersection of the intervals over time.
    """

    alpha: float = 0.05
    mode: str = "cs"
    horizon: int | None = None
    split: str | tuple = "halves"
    c1: float = 0.5
    c2: float = 1.0 / 16
    c3: float = 0.25
    c4: float = 0.5
    c5: float = 2.0
    cap: float = 1.0
    allow_zero_constants: bool = False
    running_intersection: bool = False

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "ci" and (self.horizon is None or self.horizon < 1):
            raise ValueError("CI mode needs a positive horizon")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be positive")
        if isinstance(self.split, str):
            if self.split not in SPLITS:
                raise ValueError(f"split must be one of {SPLITS} or a pair")
        else:
            a1, a2 = self.split
            if a1 <= 0 or a2 <= 0:
                raise ValueError("custom split entries must be positive")
        if not 0 < self.c1 < 1:
            raise ValueError("c1 must lie in (0, 1)")
        for name in ("c2", "c3", "c4"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.allow_zero_constants and (self.c2 == 0 or self.c3 == 0):
            raise ValueError("c2 and c3 must be positive unless "
                             "allow_zero_constants=True")
        if not 0 < self.c5 < math.inf:
            raise ValueError("c5 must lie in (0, inf)")
        if not 0 < self.cap <= 1:
            raise ValueError("cap must lie in (0, 1]")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        d = asdict(self)
        if not isinstance(d["split"], str):
            d["split"] = list(d["split"])
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if isinstance(d.get("split"), list):
            d["split"] = tuple(d["split"])
        return cls(**d)

"""Seeded data streams with known moments.

Every generator draws from ``numpy.random.Generator(PCG64)`` and maps
uniforms through a fixed transform, so a (kind, params, seed, length)
tuple always yields the same floats. Beta variates use the inverse CDF.
"""

from dataclasses import dataclass
import math
import re

import numpy as np
from scipy.special import betaincinv

KINDS = ("uniform", "beta", "constant", "bernoulli", "martingale", "cube")
_ARITY = {"uniform": (0,), "beta": (2,), "constant": (1,), "bernoulli": (1,),
          "martingale": (0, 2), "cube": (1,)}
_SPEC_RE = re.compile(r"^\s*([a-z]+)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class StreamSpec:
    """A reproducible data stream.

    Parameters
    ----------
    kind : str
        ``uniform``; ``beta`` with ``params=(a, b)``; ``constant`` with
        ``(c,)``; ``bernoulli`` with ``(p,)``; ``martingale`` with
        optional ``(mu, sigma)`` (defaults 0.5, 0.3); ``cube`` with
        ``(d,)`` for uniform vectors on the centred cube inscribed in the
        ball of radius 1/2.
    params : tuple of float
    seed : int
    length : int
    """

    kind: str
    params: tuple = ()
    seed: int = 0
    length: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown stream kind {self.kind!r}; expected one of {KINDS}")
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) not in _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} parameters, got {params}")
        if self.length < 0:
            raise ValueError("length must be nonnegative")
        if self.kind == "beta" and not (params[0] > 0 and params[1] > 0
                                        and all(map(math.isfinite, params))):
            raise ValueError(f"invalid Beta parameters {params}")
        if self.kind in ("constant", "bernoulli") and not 0 <= params[0] <= 1:
            raise ValueError(f"{self.kind} parameter must lie in [0, 1]")
        if self.kind == "martingale":
            mu, sigma = self.mu_sigma
            if sigma < 0 or mu - math.sqrt(2) * sigma < 0 or mu + math.sqrt(2) * sigma > 1:
                raise ValueError("martingale stream needs mu +- sqrt(2) sigma inside [0, 1]")
        if self.kind == "cube" and (params[0] < 1 or params[0] != int(params[0])):
            raise ValueError("cube dimension must be a positive integer")

    @property
    def mu_sigma(self):
        return self.params if self.params else (0.5, 0.3)

    @property
    def dim(self):
        return int(self.params[0]) if self.kind == "cube" else 0

    @property
    def label(self):
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(f'{p:g}' for p in self.params)})"

    def with_(self, **kw):
        d = {"kind": self.kind, "params": self.params, "seed": self.seed,
             "length": self.length}
        d.update(kw)
        return StreamSpec(**d)


def parse_stream(text, seed=0, length=0):
    """Parse ``"beta(2,6)"``, ``"uniform"`` and friends into a :class:`StreamSpec`."""
    m = _SPEC_RE.match(text.lower())
    if not m:
        raise ValueError(f"cannot parse stream {text!r}")
    kind, args = m.group(1), m.group(2)
    params = tuple(float(a) for a in args.split(",")) if args and args.strip() else ()
    return StreamSpec(kind, params, seed, length)


def _martingale(u, mu, sigma):
    # Rademacher steps after an observation above mu; otherwise
    # {-sqrt2, 0, sqrt2} with probabilities (1/4, 1/2, 1/4). Both
    # noises have mean 0 and variance 1, so E_{t-1} X_t = mu and
    # V_{t-1} X_t = sigma^2 while the law of X_t depends on the past.
    # "above" after step t is 1 if u < 1/4, 0 if u >= 1/2 and otherwise
    # repeats the previous state, which we forward-fill.
    n = u.shape[-1]
    idx = np.arange(n)
    known = (u < 0.25) | (u >= 0.5)
    last = np.maximum.accumulate(np.where(known, idx, -1), axis=-1)
    state = np.where(last >= 0, np.take_along_axis(u, np.maximum(last, 0), axis=-1) < 0.25,
                     False)
    prev = np.concatenate([np.zeros(u.shape[:-1] + (1,), bool), state[..., :-1]], axis=-1)
    rad = np.where(u < 0.5, 1.0, -1.0)
    three = np.where(u < 0.25, math.sqrt(2), np.where(u < 0.75, 0.0, -math.sqrt(2)))
    return mu + sigma * np.where(prev, rad, three)


def _from_uniforms(spec, u):
    kind, p = spec.kind, spec.params
    if kind == "uniform":
        return u
    if kind == "beta":
        return betaincinv(p[0], p[1], u)
    if kind == "constant":
        return np.full(u.shape, p[0])
    if kind == "bernoulli":
        return (u < p[0]).astype(float)
    if kind == "martingale":
        return _martingale(u, *spec.mu_sigma)
    half = 0.5 / math.sqrt(spec.dim)
    return (2 * u - 1) * half


def _shape(spec, lead=()):
    if spec.kind == "cube":
        return lead + (spec.length, spec.dim)
    return lead + (spec.length,)


def generate_stream(spec):
    """Draw ``spec.length`` observations (shape ``(length,)`` or ``(length, d)``)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return _from_uniforms(spec, rng.random(_shape(spec)))


def replication_seed(master, rep):
    """Seed of replication ``rep``; independent of how replications are scheduled."""
    return int(np.random.SeedSequence([int(master), int(rep)]).generate_state(1, np.uint64)[0])


def generate_batch(spec, reps, start=0):
    """Stack replications ``start .. start+reps-1`` of ``spec`` along axis 0.

    Replication ``r`` uses seed :func:`replication_seed` ``(spec.seed, r)``.
    """
    if spec.length == 0 or reps == 0:
        return np.zeros(_shape(spec, (reps,)))
    return np.stack([generate_stream(spec.with_(seed=replication_seed(spec.seed, r)))
                     for r in range(start, start + reps)])


def beta_moments(a, b):
    """``(mean, variance, fourth central moment)`` of Beta(a, b)."""
    s = a + b
    mean = a / s
    var = a * b / (s * s * (s + 1))
    exkurt = 6 * ((a - b) ** 2 * (s + 1) - a * b * (s + 2)) / (a * b * (s + 2) * (s + 3))
    return mean, var, (exkurt + 3) * var * var


def true_moments(spec):
    """``(mu, sigma^2, V[(X - mu)^2])`` of the stream.

    For vector streams ``sigma^2 = E||X - mu||^2`` and the last entry is
    ``V[||X - mu||^2]``. For the martingale stream the last entry is its
    stationary value.
    """
    kind, p = spec.kind, spec.params
    if kind == "uniform":
        return 0.5, 1 / 12, 1 / 80 - 1 / 144
    if kind == "beta":
        m, v, m4 = beta_moments(*p)
        return m, v, m4 - v * v
    if kind == "constant":
        return p[0], 0.0, 0.0
    if kind == "bernoulli":
        q = p[0]
        v = q * (1 - q)
        return q, v, v * (1 - 3 * v) - v * v
    if kind == "martingale":
        mu, sigma = spec.mu_sigma
        # squared deviation is sigma^2 under Rademacher noise and
        # {0, 2 sigma^2} otherwise; the three-point state has mass 2/3
        return mu, sigma ** 2, (2 / 3) * sigma ** 4
    d = spec.dim
    h = 0.5 / math.sqrt(d)
    # coordinates uniform on [-h, h]: variance h^2/3, fourth moment h^4/5
    v1 = h * h / 3
    return 0.0, d * v1, d * (h ** 4 / 5 - v1 * v1)

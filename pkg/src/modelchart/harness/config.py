"""Experiment configuration: a flat YAML mapping with two built-in profiles.

Schema (every key optional, unknown keys rejected)::

    profile: desk            # desk | full, supplies the defaults below
    n_ue: 512                # UEs per scene
    bounds: [1000, 500]      # scene width, depth in metres
    bs_height: 8.5
    bs_xy: null              # null -> centred, set back behind the scene
    n_rx: 32
    carrier_freq: 2.0e9
    subcarrier_spacing: 312500
    snr_db: 0
    path_loss_exponent: 2
    n_ave: 4                 # runs per cell, also noise realizations for 1-subcarrier MUSIC
    channels: [vanilla-los]
    n_paths: 20              # multipath stand-in
    k_factor_db: 6
    scatter_radius: 50       # null -> scatterers anywhere in bounds
    algorithms: [MM, RS, JM, ISQ, LR, PCA, SM]
    subcarriers: [2, 8, 20, 32]
    k_list: null             # null -> [round(0.05 * n_ue)]
    seed: 0                  # run r uses seed + r unless seeds is given
    seeds: null
    threshold_ratio: 0.5
    subarray: [4, 4]
    sammon_iters: 200
    lr_fraction: 0.125       # supervised LR subset, first indices of the scene
    workers: 1
    render: true
    out_dir: out
"""
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from ..channel import CHANNELS
from ..errors import InvalidConfig
from ..estimators import ALGORITHMS as MODEL_ALGORITHMS
from ..estimators import DEFAULT_THRESHOLD
from ..metrics import check_k, default_k
from ..scenario import SystemConfig

BASELINES = ("PCA", "SM")
ALGORITHMS = MODEL_ALGORITHMS + BASELINES
# algorithms that search over subcarriers; the rest use one subcarrier
SWEPT = ("MM", "RS", "JM")


@dataclass(frozen=True)
class ExperimentConfig:
    n_ue: int = 512
    bounds: tuple = (1000.0, 500.0)
    bs_height: float = 8.5
    bs_xy: tuple = None
    n_rx: int = 32
    carrier_freq: float = 2.0e9
    subcarrier_spacing: float = 312.5e3
    snr_db: float = 0.0
    path_loss_exponent: float = 2.0
    n_ave: int = 4
    channels: tuple = ("vanilla-los",)
    n_paths: int = 20
    k_factor_db: float = 6.0
    scatter_radius: float = 50.0
    algorithms: tuple = ALGORITHMS
    subcarriers: tuple = (2, 8, 20, 32)
    k_list: tuple = None
    seed: int = 0
    seeds: tuple = None
    threshold_ratio: float = DEFAULT_THRESHOLD
    subarray: tuple = (4, 4)
    sammon_iters: int = 200
    lr_fraction: float = 0.125
    workers: int = 1
    render: bool = True
    out_dir: str = "out"
    profile: str = field(default="desk")

    def __post_init__(self):
        tup = lambda v: None if v is None else tuple(v)
        for name in ("bounds", "bs_xy", "channels", "algorithms", "subcarriers",
                     "k_list", "seeds", "subarray"):
            object.__setattr__(self, name, tup(getattr(self, name)))
        if self.k_list is None:
            object.__setattr__(self, "k_list", (default_k(self.n_ue),))
        if self.seeds is None:
            object.__setattr__(self, "seeds", tuple(self.seed + r for r in range(self.n_ave)))
        self.validate()

    def validate(self):
        if self.n_ue < 4:
            raise InvalidConfig("n_ue must be at least 4")
        if len(self.bounds) != 2 or min(self.bounds) <= 0:
            raise InvalidConfig("bounds must be two positive lengths")
        if self.n_ave < 1:
            raise InvalidConfig("n_ave must be >= 1")
        if len(self.seeds) != self.n_ave:
            raise InvalidConfig(f"got {len(self.seeds)} seeds for n_ave={self.n_ave} runs")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidConfig("seeds must be distinct")
        for ch in self.channels:
            if ch not in CHANNELS:
                raise InvalidConfig(f"unknown channel {ch!r}; expected one of {CHANNELS}")
        if not self.algorithms:
            raise InvalidConfig("no algorithms requested")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise InvalidConfig(f"unknown algorithm {alg!r}; expected one of {ALGORITHMS}")
        if not self.subcarriers or min(self.subcarriers) < 1:
            raise InvalidConfig("subcarrier sweep must be non-empty positive counts")
        if len(self.subarray) != 2 or min(self.subarray) < 1:
            raise InvalidConfig("subarray must be two positive sizes")
        if "JM" in self.algorithms:
            n_sa, m_sa = self.subarray
            if m_sa > self.n_rx or max(self.subcarriers) < n_sa:
                raise InvalidConfig(
                    f"JM subarray {n_sa}x{m_sa} fits no subcarrier count in {self.subcarriers}")
        if self.workers < 1:
            raise InvalidConfig("workers must be >= 1")
        if not 0 < self.threshold_ratio <= 1:
            raise InvalidConfig("threshold_ratio must be in (0, 1]")
        if not 0 < self.lr_fraction <= 1:
            raise InvalidConfig("lr_fraction must be in (0, 1]")
        for k in self.k_list:
            check_k(k, self.n_ue)
        self.system()

    @property
    def lr_train_count(self):
        return max(2, int(round(self.n_ue * self.lr_fraction)))

    def system(self, n_sc=None):
        return SystemConfig(
            n_rx=self.n_rx,
            n_sc=max(self.subcarriers) if n_sc is None else n_sc,
            carrier_freq=self.carrier_freq,
            subcarrier_spacing=self.subcarrier_spacing,
            snr_db=self.snr_db,
            path_loss_exponent=self.path_loss_exponent,
            n_ave=self.n_ave,
        )

    def to_dict(self):
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


PROFILES = {
    "desk": {},
    # the reference simulation scale
    "full": {"n_ue": 2048, "n_ave": 10},
}

_FIELDS = {f.name for f in fields(ExperimentConfig)}


def make_config(profile="desk", **overrides):
    """Config from a profile plus field overrides."""
    if profile not in PROFILES:
        raise InvalidConfig(f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}")
    values = dict(PROFILES[profile])
    for key, val in overrides.items():
        if key not in _FIELDS:
            raise InvalidConfig(f"unknown config key {key!r}")
        values[key] = val
    # derived defaults must follow the overridden sizes
    if "k_list" not in values:
        values["k_list"] = None
    if "seeds" not in values:
        values["seeds"] = None
    return ExperimentConfig(profile=profile, **values)


def load_config(path=None, **overrides):
    """Read a YAML config file (or none) and apply ``overrides`` on top."""
    data = {}
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise InvalidConfig(f"{path}: expected a mapping at top level")
    profile = overrides.pop("profile", None) or data.pop("profile", "desk")
    data.pop("profile", None)
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    return make_config(profile, **merged)


def dump_config(config):
    return yaml.safe_dump(config.to_dict(), sort_keys=True)


def with_overrides(config, **changes):
    """Copy of ``config`` with fields replaced; derived defaults are recomputed."""
    changes = {k: v for k, v in changes.items() if v is not None}
    if "n_ue" in changes and "k_list" not in changes:
        changes["k_list"] = None
    if ("n_ave" in changes or "seed" in changes) and "seeds" not in changes:
        changes["seeds"] = None
    return replace(config, **changes)

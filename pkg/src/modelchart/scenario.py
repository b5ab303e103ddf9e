"""Base-station / UE geometry and radio system parameters.

The UEs lie on the ground plane inside a ``width x depth`` rectangle. A
fraction of them (234 out of 2048 in the reference layout) is placed on
the strokes of the word "VIP" so that chart distortion is visible.

Coordinate convention: the BS sits at ``bs_xy`` at height ``bs_height``
and its uniform linear array lies along the x axis. The default places it
on the centre line, set back ``BS_STANDOFF * depth`` behind the edge
``y = 0``. The set-back keeps every UE away from array endfire, where the
angle is ill-conditioned, and closer than the range at which the
subcarrier phase wraps.
"""
from dataclasses import dataclass, field

import numpy as np

from ._io import read_csv, write_csv
from .errors import GlyphTooSparse, InvalidConfig

SPEED_OF_LIGHT = 299_792_458.0
VIP_FRACTION = 234 / 2048
BS_STANDOFF = 0.6


@dataclass(frozen=True)
class SystemConfig:
    """Radio parameters. Defaults follow the reference simulation setup."""

    n_rx: int = 32
    n_sc: int = 32
    carrier_freq: float = 2.0e9
    antenna_spacing: float = None
    subcarrier_spacing: float = 312.5e3
    snr_db: float = 0.0
    path_loss_exponent: float = 2.0
    n_ave: int = 10
    c: float = field(default=SPEED_OF_LIGHT, init=False)

    def __post_init__(self):
        if self.antenna_spacing is None:
            object.__setattr__(self, "antenna_spacing", self.c / (2.0 * self.carrier_freq))
        if self.n_rx < 2:
            raise InvalidConfig("n_rx must be >= 2")
        if self.n_sc < 1:
            raise InvalidConfig("n_sc must be >= 1")
        if self.n_ave < 1:
            raise InvalidConfig("n_ave must be >= 1")
        if self.carrier_freq <= 0 or self.subcarrier_spacing <= 0 or self.antenna_spacing <= 0:
            raise InvalidConfig("frequencies and spacings must be positive")

    @property
    def wavelength(self):
        return self.c / self.carrier_freq

    @property
    def alias_range(self):
        """Distance at which the per-subcarrier phase wraps by 2 pi."""
        return self.c / self.subcarrier_spacing

    def with_subcarriers(self, n_sc):
        return SystemConfig(
            n_rx=self.n_rx,
            n_sc=n_sc,
            carrier_freq=self.carrier_freq,
            antenna_spacing=self.antenna_spacing,
            subcarrier_spacing=self.subcarrier_spacing,
            snr_db=self.snr_db,
            path_loss_exponent=self.path_loss_exponent,
            n_ave=self.n_ave,
        )


@dataclass(frozen=True)
class Scenario:
    bs_position: np.ndarray
    ue_positions: np.ndarray
    vip_indices: np.ndarray
    bounds: tuple
    seed: int = None

    @property
    def n_ue(self):
        return len(self.ue_positions)

    @property
    def ground_xy(self):
        return self.ue_positions[:, :2]

    @property
    def is_vip(self):
        mask = np.zeros(self.n_ue, dtype=bool)
        mask[self.vip_indices] = True
        return mask

    def offsets(self):
        """UE positions relative to the BS, shape (n_ue, 3)."""
        return self.ue_positions - self.bs_position

    def distances(self):
        """True 3D BS-UE distances."""
        return np.linalg.norm(self.offsets(), axis=1)

    def angles_deg(self):
        """Angle between the array axis (x) and the direction to each UE."""
        d = self.offsets()
        cos = np.clip(d[:, 0] / np.linalg.norm(d, axis=1), -1.0, 1.0)
        return np.degrees(np.arccos(cos))

    def polar_frame_xy(self):
        """True positions mapped into the chart frame ``(rho cos theta, rho sin theta)``.

        This is where an exact (theta, rho) estimate lands; it differs from the
        ground-plane offset only through the BS height.
        """
        rho = self.distances()
        theta = np.radians(self.angles_deg())
        return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


# Letter strokes as (x0, y0, x1, y1) rectangles on a 5-unit-tall grid.
_GLYPHS = {
    "V": (5, [(0, 3, 1, 5), (1, 1, 2, 3), (2, 0, 3, 1), (3, 1, 4, 3), (4, 3, 5, 5)]),
    "I": (3, [(0, 4, 3, 5), (1, 1, 2, 4), (0, 0, 3, 1)]),
    "P": (4, [(0, 0, 1, 5), (1, 4, 3, 5), (3, 3, 4, 4), (1, 2, 3, 3)]),
}


def glyph_strokes(text="VIP", letter_gap=1):
    """Stroke rectangles for ``text`` in glyph units, plus total (width, height)."""
    strokes = []
    x = 0
    for ch in text:
        width, rects = _GLYPHS[ch]
        strokes.extend((x + x0, y0, x + x1, y1) for x0, y0, x1, y1 in rects)
        x += width + letter_gap
    return np.array(strokes, dtype=float), (x - letter_gap, 5)


def _allocate(total, weights):
    """Split ``total`` points over strokes: one each, the rest by area."""
    n = len(weights)
    extra = total - n
    share = extra * weights / weights.sum()
    counts = np.floor(share).astype(int)
    left = extra - counts.sum()
    # largest remainder, ties broken by stroke order
    order = np.lexsort((np.arange(n), -(share - counts)))
    counts[order[:left]] += 1
    return counts + 1


def vip_count(n_ue):
    return int(round(n_ue * VIP_FRACTION))


def generate_scenario(n_ue=512, bounds=(1000.0, 500.0), bs_height=8.5, seed=0,
                      bs_xy=None, glyph_height=1 / 6):
    """Random UE layout with a "VIP" subset, deterministic under ``seed``.

    ``glyph_height`` is the letter height as a fraction of the depth.
    Raises GlyphTooSparse when there are fewer VIP UEs than glyph strokes.
    """
    width, depth = map(float, bounds)
    if n_ue < 1 or width <= 0 or depth <= 0:
        raise InvalidConfig("need n_ue >= 1 and positive bounds")
    if bs_height <= 0:
        raise InvalidConfig("bs_height must be positive")
    strokes, (gw, gh) = glyph_strokes()
    n_vip = vip_count(n_ue)
    if n_vip < len(strokes):
        raise GlyphTooSparse(
            f"{n_ue} UEs give {n_vip} VIP points, need at least {len(strokes)}")

    rng = np.random.default_rng(seed)
    unit = glyph_height * depth / gh
    origin = np.array([(width - gw * unit) / 2, (depth - gh * unit) / 2])
    rects = strokes * unit + np.tile(origin, 2)
    areas = (rects[:, 2] - rects[:, 0]) * (rects[:, 3] - rects[:, 1])
    counts = _allocate(n_vip, areas)
    vip_xy = np.concatenate([
        rng.uniform(r[:2], r[2:], size=(k, 2)) for r, k in zip(rects, counts)
    ])
    other_xy = rng.uniform((0.0, 0.0), (width, depth), size=(n_ue - n_vip, 2))

    perm = rng.permutation(n_ue)
    vip_indices = np.sort(perm[:n_vip])
    other_indices = np.sort(perm[n_vip:])
    xy = np.empty((n_ue, 2))
    xy[vip_indices] = vip_xy
    xy[other_indices] = other_xy

    # exact duplicates are essentially impossible, but resample if they occur
    vip_set = set(vip_indices.tolist())
    while True:
        _, first = np.unique(xy, axis=0, return_index=True)
        dup = np.setdiff1d(np.arange(n_ue), first)
        if dup.size == 0:
            break
        for i in dup:
            if i in vip_set:
                r = rects[rng.integers(len(rects))]
                xy[i] = rng.uniform(r[:2], r[2:])
            else:
                xy[i] = rng.uniform((0.0, 0.0), (width, depth))

    if bs_xy is None:
        bs_xy = (width / 2, -BS_STANDOFF * depth)
    bs = np.array([bs_xy[0], bs_xy[1], float(bs_height)])
    ue = np.column_stack([xy, np.zeros(n_ue)])
    return Scenario(bs_position=bs, ue_positions=ue, vip_indices=vip_indices,
                    bounds=(width, depth), seed=seed)


def write_scenario_csv(scenario, path):
    rows = [
        (i, repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), int(v))
        for i, (p, v) in enumerate(zip(scenario.ue_positions, scenario.is_vip))
    ]
    write_csv(path, ["index", "x", "y", "z", "is_vip"], rows)


def read_scenario_csv(path, bs_position, bounds, seed=None):
    """Load UE positions written by :func:`write_scenario_csv`.

    The CSV carries only the UEs, so the BS position and bounds are supplied
    by the caller (normally from the experiment config).
    """
    rows = sorted(read_csv(path), key=lambda r: int(r["index"]))
    ue = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    vip = np.array([int(r["index"]) for r in rows if int(r["is_vip"])], dtype=int)
    return Scenario(bs_position=np.asarray(bs_position, dtype=float), ue_positions=ue,
                    vip_indices=vip, bounds=tuple(bounds), seed=seed)

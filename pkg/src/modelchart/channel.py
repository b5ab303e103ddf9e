"""CSI synthesis for the three channel families.

A UE's CSI is an ``n_sc x n_rx`` complex matrix (rows are subcarriers,
columns are BS antennas). A batch is stacked as ``(n_ue, n_sc, n_rx)``.

Every ray contributes

    a * exp(-j(2 pi rho / lambda + phi)) * exp(j 2 pi (d / lambda) n cos theta)
      * exp(-j 2 pi rho s df / c)

with ``a = weight * fading * rho**-r``. The vanilla LOS channel is a single
such ray per UE. The multipath families add single-bounce scattered rays; they
stand in for the measurement-based generator used in the literature and only
aim to preserve its LOS / Rician / Rayleigh difficulty ordering.

Randomness is drawn from per-UE generators seeded by ``(seed, stream, ue)``,
so results do not depend on batch order or worker count.
"""
from dataclasses import dataclass

import numpy as np

from ._io import read_csv, write_csv
from .errors import DegenerateGeometry, InvalidConfig

_GEOMETRY_STREAM = 0
_NOISE_STREAM = 1

CHANNELS = ("vanilla-los", "multipath-los", "multipath-nlos")


@dataclass(frozen=True)
class RayParams:
    """One propagation path as seen at the BS.

    ``fading`` is a nonnegative amplitude factor with unit mean power
    (1 for the deterministic LOS ray, Rayleigh for scattered rays).
    """

    rho: float
    theta_deg: float
    phi: float
    fading: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        if not self.rho > 0:
            raise DegenerateGeometry(f"ray length must be positive, got {self.rho}")
        if not 0.0 <= self.theta_deg <= 180.0:
            raise DegenerateGeometry(f"theta {self.theta_deg} outside [0, 180]")


def ue_rng(seed, stream, ue_index):
    return np.random.default_rng([int(seed), stream, int(ue_index)])


def _angle_deg(offset):
    norm = np.linalg.norm(offset, axis=-1)
    return np.degrees(np.arccos(np.clip(offset[..., 0] / norm, -1.0, 1.0)))


def synthesize(rays, cfg, n_sc=None):
    """Noiseless CSI matrix of one UE from its list of rays."""
    n_sc = cfg.n_sc if n_sc is None else n_sc
    rho = np.array([r.rho for r in rays])
    theta = np.radians([r.theta_deg for r in rays])
    phi = np.array([r.phi for r in rays])
    amp = np.array([r.weight * r.fading for r in rays]) * rho ** (-cfg.path_loss_exponent)
    s = np.arange(n_sc)
    n = np.arange(cfg.n_rx)
    base = amp * np.exp(-1j * (2 * np.pi * rho / cfg.wavelength + phi))
    spatial = np.exp(1j * 2 * np.pi * cfg.antenna_spacing / cfg.wavelength
                     * np.outer(np.cos(theta), n))
    freq = np.exp(-1j * 2 * np.pi * np.outer(rho, s) * cfg.subcarrier_spacing / cfg.c)
    # sum over rays of base_p * freq_p[s] * spatial_p[n]
    return np.einsum("p,ps,pn->sn", base, freq, spatial)


def los_rays(scenario, seed):
    """The direct ray of every UE; the phase offset is the first draw of its stream."""
    rho = scenario.distances()
    if np.any(rho <= 0):
        raise DegenerateGeometry("a UE coincides with the BS")
    theta = scenario.angles_deg()
    rays = []
    for k in range(scenario.n_ue):
        phi = ue_rng(seed, _GEOMETRY_STREAM, k).uniform(0.0, 2 * np.pi)
        rays.append([RayParams(rho=rho[k], theta_deg=theta[k], phi=phi)])
    return rays


def multipath_rays(scenario, cfg, los, n_paths, k_factor_db=6.0, seed=0, scatter_radius=50.0):
    """Per-UE ray lists for the multipath stand-in.

    Scatterers are drawn uniformly in a disc of ``scatter_radius`` metres
    around the UE, clipped to the scene bounds (``None`` spreads them over the
    whole scene). With ``los`` the scattered rays are rescaled so that the
    direct-to-scattered mean power ratio equals ``k_factor_db``.
    """
    if n_paths < 0:
        raise InvalidConfig("n_paths must be >= 0")
    if not los and n_paths < 1:
        raise InvalidConfig("an NLOS channel needs at least one scattered path")
    if los and np.isnan(k_factor_db):
        raise InvalidConfig("k_factor_db must be a number for a LOS channel")
    r = cfg.path_loss_exponent
    width, depth = scenario.bounds
    bs = scenario.bs_position
    rho_los = scenario.distances()
    if np.any(rho_los <= 0):
        raise DegenerateGeometry("a UE coincides with the BS")
    theta_los = scenario.angles_deg()
    k_lin = np.inf if np.isposinf(k_factor_db) else 10.0 ** (k_factor_db / 10.0)
    out = []
    for k in range(scenario.n_ue):
        rng = ue_rng(seed, _GEOMETRY_STREAM, k)
        phi_los = rng.uniform(0.0, 2 * np.pi)
        rays = []
        if los:
            rays.append(RayParams(rho=rho_los[k], theta_deg=theta_los[k], phi=phi_los))
        if n_paths == 0:
            out.append(rays)
            continue
        ue = scenario.ue_positions[k]
        if scatter_radius is None:
            sxy = rng.uniform((0.0, 0.0), (width, depth), size=(n_paths, 2))
        else:
            rad = scatter_radius * np.sqrt(rng.uniform(size=n_paths))
            ang = rng.uniform(0.0, 2 * np.pi, size=n_paths)
            sxy = ue[:2] + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
            sxy = np.clip(sxy, (0.0, 0.0), (width, depth))
        scat = np.column_stack([sxy, np.zeros(n_paths)])
        length = np.linalg.norm(scat - bs, axis=1) + np.linalg.norm(scat - ue, axis=1)
        theta = _angle_deg(scat - bs)
        phi = rng.uniform(0.0, 2 * np.pi, size=n_paths)
        # Rayleigh amplitude with unit mean power
        fading = np.abs(rng.normal(size=n_paths) + 1j * rng.normal(size=n_paths)) / np.sqrt(2)
        if los:
            if np.isinf(k_lin):
                weight = 0.0
            else:
                scattered = np.sum(length ** (-2 * r))
                weight = np.sqrt(rho_los[k] ** (-2 * r) / (k_lin * scattered))
        else:
            weight = 1.0
        rays.extend(
            RayParams(rho=length[p], theta_deg=theta[p], phi=phi[p],
                      fading=fading[p], weight=weight)
            for p in range(n_paths)
        )
        out.append(rays)
    return out


def expected_power(rays, cfg):
    """Mean per-entry power of the noiseless CSI over the fading distribution."""
    r = cfg.path_loss_exponent
    return sum((ray.weight * ray.rho ** (-r)) ** 2 for ray in rays)


def add_noise(csi, snr_db, seed, ue_index=0):
    """Add circular complex Gaussian noise to one UE's CSI matrix.

    The per-entry noise variance is the mean per-entry signal power of
    ``csi`` divided by ``10**(snr_db/10)``. ``snr_db = inf`` returns a copy.
    """
    csi = np.asarray(csi, dtype=np.complex128)
    if not np.all(np.isfinite(csi)):
        raise InvalidConfig("CSI has non-finite entries")
    if np.isposinf(snr_db):
        return csi.copy()
    power = np.mean(np.abs(csi) ** 2)
    sigma2 = power / 10.0 ** (snr_db / 10.0)
    rng = ue_rng(seed, _NOISE_STREAM, ue_index)
    noise = rng.normal(size=csi.shape) + 1j * rng.normal(size=csi.shape)
    return csi + np.sqrt(sigma2 / 2.0) * noise


def add_noise_batch(batch, snr_db, seed):
    return np.stack([add_noise(c, snr_db, seed, k) for k, c in enumerate(batch)])


def rays_to_csi(ray_lists, cfg, n_sc=None):
    return np.stack([synthesize(rays, cfg, n_sc) for rays in ray_lists])


def vanilla_los_csi(scenario, cfg, seed, snr_db=None):
    """Single-ray LOS CSI for every UE, shape ``(n_ue, n_sc, n_rx)``.

    ``snr_db`` defaults to ``cfg.snr_db``; pass ``inf`` for noiseless CSI.
    """
    snr_db = cfg.snr_db if snr_db is None else snr_db
    clean = rays_to_csi(los_rays(scenario, seed), cfg)
    return add_noise_batch(clean, snr_db, seed)


def multipath_csi(scenario, cfg, los, n_paths, k_factor_db=6.0, seed=0, snr_db=None,
                  scatter_radius=50.0):
    snr_db = cfg.snr_db if snr_db is None else snr_db
    rays = multipath_rays(scenario, cfg, los, n_paths, k_factor_db, seed, scatter_radius)
    return add_noise_batch(rays_to_csi(rays, cfg), snr_db, seed)


def channel_rays(channel, scenario, cfg, seed, n_paths=20, k_factor_db=6.0, scatter_radius=50.0):
    """Ray lists for a named channel family (one of :data:`CHANNELS`)."""
    if channel == "vanilla-los":
        return los_rays(scenario, seed)
    if channel == "multipath-los":
        return multipath_rays(scenario, cfg, True, n_paths, k_factor_db, seed, scatter_radius)
    if channel == "multipath-nlos":
        return multipath_rays(scenario, cfg, False, n_paths, k_factor_db, seed, scatter_radius)
    raise InvalidConfig(f"unknown channel {channel!r}; expected one of {CHANNELS}")


def snapshot_csi(ray_lists, cfg, seed, n_sc=None, snr_db=None):
    """Noisy multi-subcarrier CSI batch from precomputed rays."""
    snr_db = cfg.snr_db if snr_db is None else snr_db
    return add_noise_batch(rays_to_csi(ray_lists, cfg, n_sc), snr_db, seed)


def repeated_snapshots(ray_lists, cfg, seed, n_ave=None, snr_db=None):
    """Single-subcarrier CSI observed ``n_ave`` times with independent noise.

    Returns ``(n_ue, n_ave, n_rx)``: each row is the same first-subcarrier
    channel plus a fresh noise draw.
    """
    n_ave = cfg.n_ave if n_ave is None else n_ave
    snr_db = cfg.snr_db if snr_db is None else snr_db
    clean = rays_to_csi(ray_lists, cfg, n_sc=1)
    return add_noise_batch(np.repeat(clean, n_ave, axis=1), snr_db, seed)


def write_csi_csv(batch, path):
    batch = np.asarray(batch)
    n_ue, n_sc, n_rx = batch.shape
    rows = (
        (k, s, n, repr(float(batch[k, s, n].real)), repr(float(batch[k, s, n].imag)))
        for k in range(n_ue) for s in range(n_sc) for n in range(n_rx)
    )
    write_csv(path, ["ue_index", "subcarrier", "antenna", "re", "im"], rows)


def read_csi_csv(path):
    rows = read_csv(path)
    if not rows:
        raise InvalidConfig(f"{path} holds no CSI entries")
    k = np.array([int(r["ue_index"]) for r in rows])
    s = np.array([int(r["subcarrier"]) for r in rows])
    n = np.array([int(r["antenna"]) for r in rows])
    out = np.zeros((k.max() + 1, s.max() + 1, n.max() + 1), dtype=np.complex128)
    out[k, s, n] = [complex(float(r["re"]), float(r["im"])) for r in rows]
    return out

"""Named parameter presets and analytic initial-data recipes."""

import numpy as np

from .bulk import BulkParams, ElasticParams
from .coefficients import ViscosityParams
from .errors import ConfigError
from .grid import PeriodicGrid, SpectralContext
from .params import MaterialParams


def material_preset(name: str, eps: float = 0.1) -> MaterialParams:
    """Built-in admissible parameter sets.

    paper-demo        one-constant elasticity (L2 = L3 = 0)
    paper-demo-aniso  same viscosities with L2 = 0.3, L3 = 0.2
    """
    visc = ViscosityParams(beta1=1.0, beta4=2.0, beta5=0.5, beta6=2.5,
                           beta7=1.0, mu1=2.0, mu2=2.0, J=0.1)
    bulk = BulkParams(1.0, 1.0, 1.0)
    if name == "paper-demo":
        elastic = ElasticParams(1.0, 0.0, 0.0)
    elif name == "paper-demo-aniso":
        elastic = ElasticParams(1.0, 0.3, 0.2)
    else:
        raise ConfigError(f"unknown preset {name!r}")
    return MaterialParams(bulk=bulk, elastic=elastic, visc=visc, eps=eps)


PRESET_NAMES = ("paper-demo", "paper-demo-aniso")


def initial_fields(recipe, grid: PeriodicGrid, ctx: SpectralContext):
    """Analytic (n0, ndot0, v0) from a recipe dict.

    recipe keys: name ("equilibrium" | "smooth"), and for "smooth":
    tilt_amplitude (default 0.2), v_amplitude (default 0.05),
    ndot_amplitude (default 0.0), wavenumber (integer, default 1).
    """
    known = {"name", "tilt_amplitude", "v_amplitude", "ndot_amplitude",
             "wavenumber"}
    unknown = set(recipe) - known
    if unknown:
        raise ConfigError(f"unknown recipe keys: {sorted(unknown)}")
    name = recipe.get("name", "smooth")
    x, y = grid.meshgrid()
    ones = np.ones_like(x)
    zeros = np.zeros_like(x)

    if name == "equilibrium":
        n0 = np.stack([ones, zeros, zeros])
        return n0, np.zeros_like(n0), np.zeros_like(n0)

    if name == "smooth":
        amp = float(recipe.get("tilt_amplitude", 0.2))
        vamp = float(recipe.get("v_amplitude", 0.05))
        mamp = float(recipe.get("ndot_amplitude", 0.0))
        k = int(recipe.get("wavenumber", 1))
        if k < 1 or k > min(grid.nx, grid.ny) // 4:
            raise ConfigError(f"wavenumber {k} outside the resolved band")
        kx, ky = k * x, k * y
        n0 = np.stack([ones, amp * np.sin(kx), amp * np.cos(ky)])
        n0 = n0 / np.sqrt(np.einsum('i...,i...->...', n0, n0))
        v0 = vamp * np.stack([np.sin(kx) * np.cos(ky),
                              -np.cos(kx) * np.sin(ky),
                              0.3 * np.sin(kx + ky)])
        v0 = ctx.leray_project(v0)
        ndot0 = mamp * np.stack([zeros, np.cos(ky), -np.sin(kx)])
        # keep ndot tangential to n0
        ndot0 = ndot0 - np.einsum('i...,i...->...', ndot0, n0) * n0
        return n0, ndot0, v0

    raise ConfigError(f"unknown recipe name {name!r}")

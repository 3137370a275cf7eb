"""Preset experiment grids for the standard-deviation ratio tables, the
goodness-of-fit table, and the Edgeworth comparison figure data.

Every preset expands to a list of (cell_name, ExperimentConfig) pairs; all
cells of a preset share the master seed, so the underlying Gaussian paths
use common random numbers across cells of equal length.
"""

from __future__ import annotations

from .acvf import ArfimaSpec
from .bootstrap import BootstrapMethod
from .errors import ConfigError
from .harness import ExperimentConfig

PRESET_NAMES = ("table1", "table2", "table3", "fig5", "fig6")

_D_GRID = (0.0, 0.2, 0.3, 0.4)
_PHI_GRID = (0.3, 0.6)
_T_GRID = (100, 500)


def _cell_name(phi: float, t: int, d: float) -> str:
    return f"phi{phi}_T{t}_d{d}"


def preset_configs(name: str, seed: int = 20260809, r: int = 1000,
                   b: int = 1000) -> list:
    """Expand a preset name into its experiment cells."""
    if name == "table1":
        return [
            (
                _cell_name(phi, t, d),
                ExperimentConfig(
                    process=ArfimaSpec(d=d, phi=phi), t=t, r=r, b=b,
                    statistic="mean", methods=(BootstrapMethod("sbs"),), seed=seed,
                ),
            )
            for phi in _PHI_GRID for t in _T_GRID for d in _D_GRID
        ]
    if name == "table2":
        return [
            (
                _cell_name(phi, t, d),
                ExperimentConfig(
                    process=ArfimaSpec(d=d, phi=phi), t=t, r=r, b=b,
                    statistic="mean",
                    methods=(BootstrapMethod("pfsbs"), BootstrapMethod("fpfbs")),
                    seed=seed,
                ),
            )
            for phi in _PHI_GRID for t in _T_GRID for d in _D_GRID
        ]
    if name == "table3":
        return [
            (
                _cell_name(phi, 500, d),
                ExperimentConfig(
                    process=ArfimaSpec(d=d, phi=phi), t=500, r=r, b=b,
                    statistic="acf", lags=(1, 3, 6, 9),
                    methods=(
                        BootstrapMethod("sbs"),
                        BootstrapMethod("pfsbs"),
                        BootstrapMethod("fpfbs"),
                    ),
                    seed=seed,
                ),
            )
            for phi in _PHI_GRID for d in (0.2, 0.4)
        ]
    if name in ("fig5", "fig6"):
        phi = 0.3 if name == "fig5" else 0.6
        return [
            (
                _cell_name(phi, 500, 0.08),
                ExperimentConfig(
                    process=ArfimaSpec(d=0.08, phi=phi), t=500, r=r, b=b,
                    statistic="acf0", lags=(1, 3, 6, 9),
                    methods=(BootstrapMethod("sbs"),), seed=seed,
                ),
            )
        ]
    raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")

"""On-disk formats: CSV for grid signals and click streams, JSON for reports.

Floats are written with 17 significant digits so every file re-parses to
the exact same binary values; identical runs produce byte-identical
files.  Readers validate structure (headers, uniform spacing) but stay
permissive about values -- a recovered density with negative lobes must
survive a round trip unchanged.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .spectral import Density, Spectrum, TimeGrid
from .thinning import ClassicalityVerdict, ClassicalRegion

__all__ = [
    "write_density_csv",
    "read_density_csv",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_clicks_csv",
    "read_clicks_csv",
    "write_json",
    "read_json",
    "verdict_to_dict",
    "write_region_csv",
]

# Relative tolerance for the uniform-spacing check on read.
_SPACING_RTOL = 1e-9


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_density_csv(path, density: Density) -> None:
    """Write header ``t,value`` and one row per grid sample."""
    dt = density.grid.dt
    lines = ["t,value"]
    lines += [f"{_fmt(k * dt)},{_fmt(v)}" for k, v in enumerate(density.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def _read_rows(path, header: str, n_cols: int) -> np.ndarray:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != header:
        raise ValidationError(
            f"{path}: expected header {header!r}, got {lines[0].strip()!r}"
            if lines else f"{path}: empty file")
    try:
        rows = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]],
                        dtype=np.float64)
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric cell: {exc}") from None
    if rows.ndim != 2 or rows.shape[1] != n_cols:
        raise ValidationError(
            f"{path}: expected {n_cols} columns under {header!r}")
    return rows


def _grid_from_times(path, t: np.ndarray) -> TimeGrid:
    n = t.size
    if n < 2:
        raise ValidationError(f"{path}: need at least 2 rows")
    dt = (t[-1] - t[0]) / (n - 1)
    if not (np.isfinite(dt) and dt > 0):
        raise ValidationError(f"{path}: time column is not increasing")
    expected = t[0] + dt * np.arange(n)
    if abs(t[0]) > _SPACING_RTOL * dt:
        raise ValidationError(f"{path}: time axis must start at 0, got {t[0]!r}")
    if np.abs(t - expected).max() > _SPACING_RTOL * max(dt, abs(t[-1])):
        raise ValidationError(f"{path}: time column is not uniformly spaced")
    return TimeGrid(n=n, dt=float(dt))


def read_density_csv(path) -> Density:
    rows = _read_rows(path, "t,value", 2)
    grid = _grid_from_times(path, rows[:, 0])
    return Density(grid, rows[:, 1])


def write_spectrum_csv(path, spectrum: Spectrum) -> None:
    """Write header ``omega,re,im`` in FFT sample order (folded frequencies)."""
    omegas = spectrum.grid.omegas()
    lines = ["omega,re,im"]
    lines += [
        f"{_fmt(w)},{_fmt(v.real)},{_fmt(v.imag)}"
        for w, v in zip(omegas, spectrum.values)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrum_csv(path) -> Spectrum:
    rows = _read_rows(path, "omega,re,im", 3)
    omega = rows[:, 0]
    n = omega.size
    if n < 2:
        raise ValidationError(f"{path}: need at least 2 rows")
    step = omega[1] - omega[0]
    if not (np.isfinite(step) and step > 0):
        raise ValidationError(f"{path}: frequency column is malformed")
    dt = 2.0 * np.pi / (n * step)
    grid = TimeGrid(n=n, dt=float(dt))
    expected = grid.omegas()
    scale = max(abs(expected[0]), float(np.abs(expected).max()))
    if np.abs(omega - expected).max() > _SPACING_RTOL * scale:
        raise ValidationError(
            f"{path}: frequency column does not match a folded FFT grid")
    return Spectrum(grid, rows[:, 1] + 1j * rows[:, 2])


def write_clicks_csv(path, timestamps: np.ndarray) -> None:
    lines = ["timestamp"] + [_fmt(t) for t in timestamps]
    Path(path).write_text("\n".join(lines) + "\n")


def read_clicks_csv(path) -> np.ndarray:
    rows = _read_rows(path, "timestamp", 1)
    return rows[:, 0]


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def verdict_to_dict(verdict: ClassicalityVerdict, p: float, grid: TimeGrid) -> dict:
    """Flatten a verdict into the JSON report layout."""
    return {
        "kind": verdict.kind.value,
        "negativity_mass": verdict.negativity_mass,
        "pole_proximity": verdict.pole_proximity,
        "region_violations": [
            {
                "omega": v.omega,
                "phi_re": v.phi.real,
                "phi_im": v.phi.imag,
                "excess": v.excess,
            }
            for v in verdict.region_violations
        ],
        "p": p,
        "grid": {"n": grid.n, "dt": grid.dt},
    }


def write_region_csv(path, boundary: np.ndarray) -> None:
    """Write boundary samples as ``re,im`` rows."""
    lines = ["re,im"] + [f"{_fmt(z.real)},{_fmt(z.imag)}" for z in boundary]
    Path(path).write_text("\n".join(lines) + "\n")


def region_meta_dict(region: ClassicalRegion) -> dict:
    return {"p": region.p.p, "center": region.center, "radius": region.radius}

"""The five scalar functionals and scaling/rearrangement utilities.

Conventions (used identically everywhere in the package):

    M(u)   = (1/2) int |u|^2
    H(u)   = (1/2) int (|grad u|^2 + a |u|^2/|x|^2)  =  (1/2) <u, L_a u>
    L_V(u) = (1/4) iint |u(x)|^2 |u(y)|^2 / |x-y|^2
    E(u)   = H(u) - L_V(u)
    J(u)   = M(u) H(u) / L_V(u)        (undefined, reported as None, if L_V = 0)

All radial integrals carry the surface factor omega_{d-1} = 2 pi^{d/2}/Gamma(d/2).
Under u -> mu * u(nu_s .): M -> mu^2 nu_s^{-d} M, H -> mu^2 nu_s^{2-d} H,
L_V -> mu^4 nu_s^{2-2d} L_V, and J is invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import RadialGrid
from .hartree import KernelMatrix, lv_value
from .transform import TransformPlan, apply_la, radial_derivative


@dataclass(frozen=True)
class Quantities:
    M: float
    H: float
    E: float
    L_V: float
    J: float | None


def _check_finite(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    if not np.all(np.isfinite(u)):
        raise ValueError("field contains non-finite samples")
    return u


def functionals(u: np.ndarray, plan: TransformPlan, km: KernelMatrix) -> Quantities:
    u = _check_finite(u)
    w, om = plan.grid.w, km.omega
    M = 0.5 * om * float(np.sum(w * np.abs(u)**2))
    H = 0.5 * om * float(np.real(np.sum(w * np.conj(u) * apply_la(plan, u))))
    LV = lv_value(km, u)
    E = H - LV
    J = (M * H / LV) if LV > 0 else None
    return Quantities(M=M, H=H, E=E, L_V=LV, J=J)


def rescale(u: np.ndarray, grid: RadialGrid, mu: float, nu_s: float,
            tail_tol: float = 1e-10) -> np.ndarray:
    """mu * u(nu_s * r), resampled by cubic interpolation with endpoint clamping.

    The field is treated as zero beyond r_max (Dirichlet truncation).  If the
    rescaled field carries more than `tail_tol` of its mass in the outermost
    cells, the content is escaping the grid and an error is raised.
    """
    u = _check_finite(u)
    if mu <= 0 or nu_s <= 0:
        raise ValueError("mu and nu_s must be positive")
    if mu == 1.0 and nu_s == 1.0:
        return np.array(u, copy=True)
    r = grid.r
    spl_re = CubicSpline(r, np.real(u), extrapolate=False)
    out = spl_re(nu_s * r)
    if np.iscomplexobj(u):
        out = out + 1j * CubicSpline(r, np.imag(u), extrapolate=False)(nu_s * r)
    # clamp: inside the first node use the first sample, beyond r_max use zero
    inner = nu_s * r < r[0]
    out[inner] = u[0]
    out = np.where(np.isnan(out), 0.0, out)
    out = mu * out
    f = np.abs(out)**2
    total = np.sum(grid.w * f)
    tail = np.sum(grid.w[-3:] * f[-3:])
    if total > 0 and tail / total > tail_tol:
        raise ValueError(
            f"rescaled field escapes the grid: tail mass fraction {tail/total:.2e} "
            f"exceeds tolerance {tail_tol:.1e}")
    return out


def hardy_ratio(u: np.ndarray, plan: TransformPlan) -> float:
    """(int |u|^2/|x|^2) / (int |grad u|^2); Hardy bounds this by (2/(d-2))^2."""
    u = _check_finite(u)
    du = radial_derivative(plan, u)
    grad2 = float(np.sum(plan.grid.w * np.abs(du)**2))
    if grad2 == 0.0 or not np.any(u):
        raise ValueError("hardy_ratio requires a nonzero field with finite gradient")
    # int |u|^2 r^{d-3} dr needs its own weights: |u|^2/r^2 is far outside the
    # polynomial class of the r^{d-1} rule near the origin
    inv2 = float(np.sum(plan.grid.w_inv2 * np.abs(u)**2))
    return inv2 / grad2


def rearrange_decreasing(u: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Radially non-increasing rearrangement of |u|, equimeasurable in volume.

    Cells are treated as volume atoms (volume omega * w_j).  The sorted
    (descending) profile of |u|^2 is poured into cells in increasing-radius
    order, splitting source atoms across target cells proportionally to
    volume; each target sample is the volume average of |u|^2 poured into it.
    This conserves the discrete mass exactly and yields a non-increasing
    profile.
    """
    u = _check_finite(u)
    vals = np.abs(u)**2
    vols = grid.w
    # the one-sided boundary stencils can produce a (single, outermost)
    # non-positive weight; such cells carry no volume for rearrangement
    pos = vols > 0
    order = np.argsort(-vals, kind="stable")
    order = order[pos[order]]
    sv, svol = vals[order], vols[order]
    out = np.zeros(grid.n)
    k = 0                        # current source atom
    rem = svol[0] if len(sv) else 0.0  # remaining volume of the source atom
    for j in range(grid.n):
        if not pos[j]:
            out[j] = out[j - 1] if j > 0 else 0.0
            continue
        need = vols[j]
        acc = 0.0
        while need > 0 and k < len(sv):
            take = min(need, rem)
            acc += take * sv[k]
            need -= take
            rem -= take
            if rem <= 0:
                k += 1
                if k < len(sv):
                    rem = svol[k]
        out[j] = max(acc, 0.0) / vols[j]
    return np.sqrt(out)


def lp_norm(u: np.ndarray, grid: RadialGrid, p: float, omega: float) -> float:
    """(omega int |u|^p r^{d-1} dr)^{1/p}; used by the HLS-continuity property."""
    return float((omega * np.sum(grid.w * np.abs(u)**p))**(1.0 / p))

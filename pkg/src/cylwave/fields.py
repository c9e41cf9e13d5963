"""Field evaluation from solved systems, and boundary-continuity residuals.

A solved direct system radiates its boundary currents with the region's own
wavenumber and impedance (electric currents through H^(2)_0, magnetic ones
through the normal-derivative kernel); a solved source system radiates its
displaced line sources. The incident field joins on whichever side the
filament lives. Residuals of the two transmission conditions, sampled
between collocation angles, stand in for an exact reference on shapes where
no separable solution exists.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry, specfun
from .exact import incident_field, incident_prefactor
from .discrete import dipole_matrix, monopole_matrix

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FieldSample:
    """Total electric field at one polar observation point.

    region 1 is the exterior of the boundary, region 2 the interior;
    provenance names what produced the value ('nfm', 'mas', 'exact' or
    'continuous').
    """

    rho: float
    phi: float
    region: int
    e_z: complex
    provenance: str


def _source_stacks(solution, region):
    """Radiating points, their amplitudes and medium for one region."""
    system = solution.system
    medium = system.medium1 if region == 1 else system.medium2
    n = solution.n_points
    if system.method == "nfm":
        pts, nrm, _ = geometry.collocation_points(system.curve, n)
        return medium, pts, nrm
    aux = system.aux_inner if region == 1 else system.aux_outer
    pts, _, _ = geometry.collocation_points(aux.curve, n)
    return medium, pts, None


def _scattered_field(solution, xy, region):
    medium, pts, nrm = _source_stacks(solution, region)
    k, z = medium.k, medium.Z
    dist = geometry.pairwise_distances(np.asarray(xy, dtype=float)[None, :], pts)
    mono = monopole_matrix(k, dist, label="field kernel")[0]
    if solution.system.method == "mas":
        amps = solution.electric if region == 1 else solution.magnetic
        return -(k * z / 4.0) * (mono @ amps)
    dip = dipole_matrix(k, np.asarray(xy, dtype=float)[None, :], pts, nrm,
                        dist=dist, label="field kernel")[0]
    electric_part = mono @ solution.electric
    magnetic_part = dip @ solution.magnetic
    if region == 1:
        return -(k * z / 4.0) * electric_part + (k / 4j) * magnetic_part
    return +(k * z / 4.0) * electric_part - (k / 4j) * magnetic_part


def _scattered_gradient(solution, xy, region):
    medium, pts, nrm = _source_stacks(solution, region)
    k, z = medium.k, medium.Z
    xy = np.asarray(xy, dtype=float)
    grad_mono = _monopole_gradient(k, xy, pts)
    if solution.system.method == "mas":
        amps = solution.electric if region == 1 else solution.magnetic
        return -(k * z / 4.0) * (amps @ grad_mono)
    grad_dip = _dipole_gradient(k, xy, pts, nrm)
    electric_part = solution.electric @ grad_mono
    magnetic_part = solution.magnetic @ grad_dip
    if region == 1:
        return -(k * z / 4.0) * electric_part + (k / 4j) * magnetic_part
    return +(k * z / 4.0) * electric_part - (k / 4j) * magnetic_part


def _monopole_gradient(k, xy, pts):
    """Rows grad_x H^(2)_0(k |x - s_l|) for a single observation point."""
    u = xy[None, :] - np.asarray(pts, dtype=float)
    dist = np.hypot(u[:, 0], u[:, 1])
    _guard_distance(dist, pts)
    h1 = specfun.hankel2(1, k * dist)
    return (-k * h1 / dist)[:, None] * u


def _dipole_gradient(k, xy, pts, normals):
    """Rows grad_x of [n_s . (s - x)/d] H^(2)_1(k d), normal at the source.

    The cosine factor differentiates to -n/d + c u / d^2 with u = s - x and
    c the factor itself; H^(2)_1 differentiates through H2_1'(w) = H2_0(w)
    - H2_1(w)/w with d/dx (k d) = -k u / d.
    """
    u = np.asarray(pts, dtype=float) - xy[None, :]
    dist = np.hypot(u[:, 0], u[:, 1])
    _guard_distance(dist, pts)
    cos_factor = (u[:, 0] * normals[:, 0] + u[:, 1] * normals[:, 1]) / dist
    h1 = specfun.hankel2(1, k * dist)
    h1_deriv = specfun.hankel2(0, k * dist) - h1 / (k * dist)
    grad_cos = -normals / dist[:, None] + (cos_factor / dist**2)[:, None] * u
    return grad_cos * h1[:, None] + (cos_factor * (-k) * h1_deriv / dist)[:, None] * u


def _guard_distance(dist, pts):
    scale = max(float(np.max(np.abs(pts))), 1.0)
    if np.any(dist < 1e-12 * scale):
        raise ValueError("observation point coincides with a source point")


def _incident_here(excitation, region):
    return (excitation.region == "external") == (region == 1)


def field_from_discrete(solution, rho_obs, phi_obs, region=None):
    """Total field of a solved system at a polar observation point.

    The region is deduced from the curve when not given; passing one that
    contradicts the observation point raises instead of silently using the
    wrong representation. Points exactly on the boundary count as region 1.
    """
    system = solution.system
    rho_obs = float(rho_obs)
    phi_obs = float(phi_obs)
    if rho_obs < 0.0:
        raise ValueError("observation radius must be nonnegative")
    deduced = 2 if system.curve.contains(rho_obs, phi_obs) else 1
    if region is None:
        region = deduced
    elif int(region) != deduced:
        raise ValueError(
            "region %d does not match the observation point (it lies in region %d)"
            % (int(region), deduced)
        )
    xy = np.array([rho_obs * np.cos(phi_obs), rho_obs * np.sin(phi_obs)])
    value = _scattered_field(solution, xy, region)
    if _incident_here(system.excitation, region):
        medium = system.medium1 if region == 1 else system.medium2
        value = value + incident_field(system.excitation, medium, rho_obs, phi_obs)
    return FieldSample(rho_obs, phi_obs, region, complex(value), system.method)


def _total_field_and_normal_deriv(solution, xy, region, normal):
    """Field value and 1/(kZ)-scaled normal derivative on one side of C."""
    system = solution.system
    medium = system.medium1 if region == 1 else system.medium2
    value = _scattered_field(solution, xy, region)
    grad = _scattered_gradient(solution, xy, region)
    if _incident_here(system.excitation, region):
        exc = system.excitation
        rho = float(np.hypot(xy[0], xy[1]))
        phi = float(np.arctan2(xy[1], xy[0]))
        value = value + incident_field(exc, medium, rho, phi)
        fil = exc.position_xy()
        grad = grad + (
            incident_prefactor(exc, medium)
            * exc.amplitude
            * _monopole_gradient(medium.k, xy, fil[None, :])[0]
        )
    h_tan = (normal @ grad) / (medium.k * medium.Z)
    return value, h_tan


def boundary_residuals(solution, n_test=72, offset_scale=1e-4):
    """Continuity defects of tangential E and H across the boundary.

    Samples n_test angles staggered between the collocation angles, steps
    1e-4 of the local radius to either side along the normal, and returns
    (max |E jump|, max |H jump|), each normalized by the largest boundary
    magnitude of the corresponding field. Small residuals certify a
    solution on shapes with no separable reference.
    """
    system = solution.system
    n_test = int(n_test)
    if n_test < 4:
        raise ValueError("need at least 4 test angles")
    phis = _TWO_PI * (np.arange(n_test) + 0.5) / n_test
    radii = np.asarray(system.curve.radius(phis))
    pts = system.curve.point(phis)
    nrm = system.curve.normal(phis)
    delta = offset_scale * radii

    e_jump = np.empty(n_test, dtype=complex)
    h_jump = np.empty(n_test, dtype=complex)
    e_scale = 0.0
    h_scale = 0.0
    for t in range(n_test):
        outside = pts[t] + delta[t] * nrm[t]
        inside = pts[t] - delta[t] * nrm[t]
        e_1, h_1 = _total_field_and_normal_deriv(solution, outside, 1, nrm[t])
        e_2, h_2 = _total_field_and_normal_deriv(solution, inside, 2, nrm[t])
        e_jump[t] = e_1 - e_2
        h_jump[t] = h_1 - h_2
        e_scale = max(e_scale, abs(e_1), abs(e_2))
        h_scale = max(h_scale, abs(h_1), abs(h_2))
    e_resid = float(np.max(np.abs(e_jump))) / max(e_scale, 1e-300)
    h_resid = float(np.max(np.abs(h_jump))) / max(h_scale, 1e-300)
    return e_resid, h_resid

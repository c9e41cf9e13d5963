"""Collocation systems for the two discretizations and their solvers.

Both formulations share one 2N x 2N matrix up to row scalings and a
transpose. The direct formulation places fictitious electric and magnetic
line currents at N points of the boundary and cancels the total field at N
points of each displaced surface; the source formulation places radiating
line sources on the displaced surfaces and matches the transmission
conditions at N boundary points. On concentric circles every block is
circulant, which yields a per-mode 2x2 system through the DFT and, in the
large-N limit, closed coefficient formulas free of the displaced radii.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.linalg import get_lapack_funcs

from . import geometry, specfun
from .exact import Medium, mode_denominator

_TWO_PI = 2.0 * np.pi

# Per-mode 2x2 determinants below this magnitude make the circulant solve
# meaningless in float64; the dense path fails the same way via its pivots.
_MODE_DET_FLOOR = 1e-300


class AssemblyError(ArithmeticError):
    """A kernel entry left the floating range during matrix assembly."""


@dataclass(frozen=True)
class BlockSystem:
    """The 2N x 2N collocation system in its natural 2x2 block layout.

    For method 'nfm' the unknowns are electric and magnetic current
    amplitudes on the boundary and the rows cancel the field on the two
    displaced surfaces; for method 'mas' the unknowns are source amplitudes
    on the displaced surfaces and the rows enforce the two transmission
    conditions on the boundary. Instances are treated as immutable and can
    be shared between threads; the arrays are not defensively copied.
    """

    z11: np.ndarray
    z12: np.ndarray
    z21: np.ndarray
    z22: np.ndarray
    rhs: np.ndarray
    method: str
    curve: geometry.BoundaryCurve
    aux_inner: geometry.AuxiliarySurface
    aux_outer: geometry.AuxiliarySurface
    excitation: geometry.Excitation
    medium1: Medium
    medium2: Medium

    @property
    def n_points(self):
        return self.z11.shape[0]

    @property
    def matrix(self):
        return np.block([[self.z11, self.z12], [self.z21, self.z22]])

    def named_blocks(self):
        return (("z11", self.z11), ("z12", self.z12), ("z21", self.z21), ("z22", self.z22))

    def is_circulant(self, rtol=1e-13):
        return all(geometry.is_circulant(b, rtol) for _, b in self.named_blocks())


@dataclass(frozen=True)
class DiscreteSolution:
    """Solved amplitudes plus how the solve went.

    electric/magnetic hold the two N-vectors of unknowns in row order: for
    an 'nfm' system the electric and magnetic boundary currents, for a
    'mas' system the inner-surface and outer-surface source amplitudes.
    residual is ||A x - b||_inf relative to ||b||_inf; cond_estimate is an
    infinity-norm estimate on the dense path and the exact 2-norm condition
    number (assembled from the per-mode singular values) on the DFT path.
    """

    system: BlockSystem
    electric: np.ndarray
    magnetic: np.ndarray
    path: str
    residual: float
    cond_estimate: float

    @property
    def n_points(self):
        return self.electric.shape[0]

    @property
    def vector(self):
        return np.concatenate([self.electric, self.magnetic])


# -- kernels ----------------------------------------------------------------


def monopole_matrix(k, dist, label="kernel"):
    """H^(2)_0(k d) for a matrix of source/observation distances."""
    try:
        return specfun.hankel2(0, k * np.asarray(dist, dtype=float))
    except specfun.BesselOverflowError as err:
        loc = np.unravel_index(int(np.argmin(dist)), np.shape(dist))
        raise AssemblyError("%s overflowed near entry %s: %s" % (label, loc, err)) from err


def dipole_matrix(k, obs_points, src_points, src_normals, dist=None, label="kernel"):
    """Normal-derivative kernel [n_src . (src - obs) / d] H^(2)_1(k d).

    Entry (p, l) couples observation point p to source point l, with the
    normal taken at the source. The transpose moves the normal to the
    observation side, which is exactly the matching-row kernel of the
    source formulation.
    """
    obs = np.asarray(obs_points, dtype=float)
    src = np.asarray(src_points, dtype=float)
    nrm = np.asarray(src_normals, dtype=float)
    if dist is None:
        dist = geometry.pairwise_distances(obs, src)
    diff = src[None, :, :] - obs[:, None, :]
    cos_factor = (diff[..., 0] * nrm[None, :, 0] + diff[..., 1] * nrm[None, :, 1]) / dist
    try:
        h1 = specfun.hankel2(1, k * dist)
    except specfun.BesselOverflowError as err:
        loc = np.unravel_index(int(np.argmin(dist)), np.shape(dist))
        raise AssemblyError("%s overflowed near entry %s: %s" % (label, loc, err)) from err
    return cos_factor * h1


def _point_distances(points, xy):
    return geometry.pairwise_distances(points, np.asarray(xy, dtype=float)[None, :])[:, 0]


def _check_setup(curve, aux_inner, aux_outer, excitation, n_points):
    if excitation.polarization != "TM":
        raise ValueError(
            "systems are assembled for TM excitation only; map TE sources "
            "through geometry.duality_map first"
        )
    if aux_inner.side != "inner" or aux_outer.side != "outer":
        raise ValueError("pass the inner surface first and the outer surface second")
    aux_inner.validate_against(curve)
    aux_outer.validate_against(curve)
    excitation.validate_against(curve)
    if int(n_points) < 4:
        raise ValueError("need at least 4 collocation points")


# -- assembly ---------------------------------------------------------------


def assemble_nfm(
    curve,
    aux_inner,
    aux_outer,
    excitation,
    medium1=Medium(),
    medium2=Medium(),
    n_points=40,
):
    """Direct system: currents on the boundary, matching on displaced surfaces.

    Row block 1 cancels the region-1 representation on the inner surface,
    row block 2 cancels the region-2 representation on the outer surface;
    both rows are scaled so the electric-current kernel is Z_j H^(2)_0.
    The incident term lands on the inner rows for an external source and on
    the outer rows for an internal one.
    """
    _check_setup(curve, aux_inner, aux_outer, excitation, n_points)
    n_points = int(n_points)
    k1, z1 = medium1.k, medium1.Z
    k2, z2 = medium2.k, medium2.Z

    c_pts, c_nrm, _ = geometry.collocation_points(curve, n_points)
    a1_pts, _, _ = geometry.collocation_points(aux_inner.curve, n_points)
    a2_pts, _, _ = geometry.collocation_points(aux_outer.curve, n_points)

    d1 = geometry.pairwise_distances(a1_pts, c_pts)
    d2 = geometry.pairwise_distances(a2_pts, c_pts)
    z11 = z1 * monopole_matrix(k1, d1, label="block z11")
    z12 = 1j * dipole_matrix(k1, a1_pts, c_pts, c_nrm, dist=d1, label="block z12")
    z21 = z2 * monopole_matrix(k2, d2, label="block z21")
    z22 = 1j * dipole_matrix(k2, a2_pts, c_pts, c_nrm, dist=d2, label="block z22")

    amp = complex(excitation.amplitude)
    rhs = np.zeros(2 * n_points, dtype=complex)
    fil = excitation.position_xy()
    if excitation.region == "external":
        d_fil = _point_distances(a1_pts, fil)
        rhs[:n_points] = -amp * z1 * monopole_matrix(k1, d_fil, label="rhs")
    else:
        d_fil = _point_distances(a2_pts, fil)
        rhs[n_points:] = amp * z2 * monopole_matrix(k2, d_fil, label="rhs")

    return BlockSystem(
        z11, z12, z21, z22, rhs, "nfm",
        curve, aux_inner, aux_outer, excitation, medium1, medium2,
    )


def _mas_rhs(curve, excitation, medium1, medium2, n_points):
    """Transmission-condition data at the boundary collocation points.

    Top half: jump of the tangential electric field moved to the right side;
    bottom half: jump of the tangential magnetic field, scaled by -i to
    match the transformed direct system.
    """
    c_pts, c_nrm, _ = geometry.collocation_points(curve, n_points)
    amp = complex(excitation.amplitude)
    fil = excitation.position_xy()
    d_fil = _point_distances(c_pts, fil)
    rhs = np.zeros(2 * n_points, dtype=complex)
    if excitation.region == "external":
        k, z = medium1.k, medium1.Z
        sign = 1.0
    else:
        k, z = medium2.k, medium2.Z
        sign = -1.0
    slope = dipole_matrix(k, fil[None, :], c_pts, c_nrm, dist=d_fil[None, :], label="rhs")[0]
    rhs[:n_points] = sign * (k * z / 4.0) * amp * specfun.hankel2(0, k * d_fil)
    rhs[n_points:] = sign * (1j * k / 4.0) * amp * slope
    return rhs


def assemble_mas(
    curve,
    aux_inner,
    aux_outer,
    excitation,
    medium1=Medium(),
    medium2=Medium(),
    n_points=40,
):
    """Source system: line sources on the displaced surfaces, matching on C.

    Inner sources radiate the region-1 field with (k1, Z1), outer sources
    the region-2 field with (k2, Z2). Row block 1 is continuity of the
    electric field, row block 2 continuity of the tangential magnetic
    field scaled by -i, with the normal taken at the boundary point.
    """
    _check_setup(curve, aux_inner, aux_outer, excitation, n_points)
    n_points = int(n_points)
    k1, z1 = medium1.k, medium1.Z
    k2, z2 = medium2.k, medium2.Z

    c_pts, c_nrm, _ = geometry.collocation_points(curve, n_points)
    a1_pts, _, _ = geometry.collocation_points(aux_inner.curve, n_points)
    a2_pts, _, _ = geometry.collocation_points(aux_outer.curve, n_points)

    d1 = geometry.pairwise_distances(c_pts, a1_pts)
    d2 = geometry.pairwise_distances(c_pts, a2_pts)
    z11 = -(k1 * z1 / 4.0) * monopole_matrix(k1, d1, label="block z11")
    z12 = +(k2 * z2 / 4.0) * monopole_matrix(k2, d2, label="block z12")
    # dipole_matrix puts the normal at its source argument; transposing the
    # (aux obs, boundary src) kernel gives the boundary-normal derivative of
    # the aux-source fields that the magnetic matching row needs.
    z21 = -(1j * k1 / 4.0) * dipole_matrix(k1, a1_pts, c_pts, c_nrm, dist=d1.T, label="block z21").T
    z22 = +(1j * k2 / 4.0) * dipole_matrix(k2, a2_pts, c_pts, c_nrm, dist=d2.T, label="block z22").T

    rhs = _mas_rhs(curve, excitation, medium1, medium2, n_points)
    return BlockSystem(
        z11, z12, z21, z22, rhs, "mas",
        curve, aux_inner, aux_outer, excitation, medium1, medium2,
    )


def mas_from_nfm(system):
    """Turn a direct system into the equivalent source system.

    Scale the top block row by -k1/4 and the bottom one by +k2/4, transpose
    the full 2N x 2N matrix, and rebuild the right side for the
    transmission conditions. The result matches assemble_mas entrywise.
    """
    if system.method != "nfm":
        raise ValueError("expected a direct ('nfm') system")
    s_top = -system.medium1.k / 4.0
    s_bot = +system.medium2.k / 4.0
    z11 = (s_top * system.z11).T
    z12 = (s_bot * system.z21).T
    z21 = (s_top * system.z12).T
    z22 = (s_bot * system.z22).T
    rhs = _mas_rhs(
        system.curve, system.excitation, system.medium1, system.medium2, system.n_points
    )
    return BlockSystem(
        z11, z12, z21, z22, rhs, "mas",
        system.curve, system.aux_inner, system.aux_outer,
        system.excitation, system.medium1, system.medium2,
    )


# -- solvers ----------------------------------------------------------------


def _relative_residual(matrix, x, rhs):
    scale = float(np.max(np.abs(rhs)))
    err = float(np.max(np.abs(matrix @ x - rhs)))
    return err / scale if scale > 0.0 else err


def solve_dense(system):
    """LU solve with one iterative-refinement step and a condition estimate."""
    a = system.matrix
    b = system.rhs
    n = system.n_points
    lu, piv = linalg.lu_factor(a)
    if not np.all(np.isfinite(lu)) or np.any(np.diagonal(lu) == 0.0):
        raise ArithmeticError("system is singular to working precision")
    x = linalg.lu_solve((lu, piv), b)
    x += linalg.lu_solve((lu, piv), b - a @ x)
    if not np.all(np.isfinite(x)):
        raise ArithmeticError("system is singular to working precision")

    gecon = get_lapack_funcs(("gecon",), (a,))[0]
    rcond, info = gecon(lu, np.linalg.norm(a, np.inf), norm="I")
    cond = float(1.0 / rcond) if info == 0 and rcond > 0.0 else np.inf

    residual = _relative_residual(a, x, b)
    return DiscreteSolution(system, x[:n], x[n:], "dense", residual, cond)


def _mode_singular_values(l11, l12, l21, l22, det):
    fro2 = np.abs(l11) ** 2 + np.abs(l12) ** 2 + np.abs(l21) ** 2 + np.abs(l22) ** 2
    disc = np.sqrt(np.maximum(fro2**2 - 4.0 * np.abs(det) ** 2, 0.0))
    s_max = np.sqrt((fro2 + disc) / 2.0)
    return s_max, np.abs(det) / s_max


def solve_circulant_dft(system, rtol=1e-13):
    """Closed-form solve through per-mode 2x2 systems; circles only.

    Every block of a concentric-circle system is circulant, so the DFT of
    the first columns gives its eigenvalues and each Fourier mode of the
    unknowns satisfies an independent 2x2 system. Works for any N, odd or
    even, and for both methods; raises when a block is not circulant.
    """
    for name, block in system.named_blocks():
        if not geometry.is_circulant(block, rtol):
            raise ValueError("block %s is not circulant; use the dense path" % name)
    n = system.n_points
    l11 = np.fft.fft(system.z11[:, 0])
    l12 = np.fft.fft(system.z12[:, 0])
    l21 = np.fft.fft(system.z21[:, 0])
    l22 = np.fft.fft(system.z22[:, 0])
    b1 = np.fft.fft(system.rhs[:n])
    b2 = np.fft.fft(system.rhs[n:])

    det = l11 * l22 - l12 * l21
    small = np.abs(det) < _MODE_DET_FLOOR
    if np.any(small):
        raise ArithmeticError(
            "degenerate mode m=%d in the circulant solve" % int(np.argmax(small))
        )
    u = (b1 * l22 - l12 * b2) / det
    v = (l11 * b2 - l21 * b1) / det
    electric = np.fft.ifft(u)
    magnetic = np.fft.ifft(v)

    s_max, s_min = _mode_singular_values(l11, l12, l21, l22, det)
    cond = float(np.max(s_max) / np.min(s_min))
    x = np.concatenate([electric, magnetic])
    residual = _relative_residual(system.matrix, x, system.rhs)
    return DiscreteSolution(system, electric, magnetic, "dft", residual, cond)


def solve(system, path="auto"):
    """Dispatch to the DFT path for circulant systems, dense otherwise."""
    if path == "auto":
        path = "dft" if system.is_circulant() else "dense"
    if path == "dft":
        return solve_circulant_dft(system)
    if path == "dense":
        return solve_dense(system)
    raise ValueError("unknown path %r" % (path,))


def mode_amplitudes(solution):
    """Fourier coefficients (DFT / N) of the two solved amplitude vectors."""
    n = solution.n_points
    return np.fft.fft(solution.electric) / n, np.fft.fft(solution.magnetic) / n


def normalized_currents(solution):
    """Current densities sampled at the collocation angles.

    Multiplying the amplitudes by N / perimeter turns line-source strengths
    into surface densities; circles use 2 pi rho exactly. Meaningful for
    boundary-current ('nfm') solutions; for source solutions the same
    scaling is applied to whatever the amplitudes are.
    """
    curve = solution.system.curve
    if curve.kind == "circle":
        perimeter = _TWO_PI * curve.params["radius"]
    else:
        perimeter = curve.perimeter()
    scale = solution.n_points / perimeter
    return scale * solution.electric, scale * solution.magnetic


# -- coefficient oracles for the circulant path ------------------------------


@dataclass(frozen=True)
class QSumCoefficients:
    """Per-mode eigendata of a circular direct system, via bilateral sums."""

    m: int
    n_points: int
    d: complex
    b1: complex
    b2: complex
    b3: complex
    b4: complex


def _bilateral_sum(term, ratio, x_floor, n_points, m, q_max, phi_fil=0.0):
    """Sum term(order) over orders qN + m, q in Z, folded by Bessel parity.

    term(nu) must be even in nu (every product here is). A source rotation
    multiplies the order-nu term by exp(-i nu phi_fil) with nu signed. Rings
    are cut off once a (1/pi x) ratio^nu envelope falls below 1e-17 of the
    running scale; terms decay by ratio^N per ring so this settles fast.
    """
    total = term(m) * np.exp(-1j * m * phi_fil)
    peak = max(abs(total), 1e-300)
    q = 1
    while q_max is None or q <= q_max:
        nu_hi = q * n_points + m
        nu_lo = q * n_points - m
        if q_max is None:
            envelope = 10.0 * ratio**nu_lo / (np.pi * x_floor)
            if envelope < 1e-17 * max(abs(total), peak):
                break
        if q > 1000:
            raise ArithmeticError("bilateral sum failed to settle")
        try:
            ring = term(nu_hi) * np.exp(-1j * nu_hi * phi_fil)
            ring += term(nu_lo) * np.exp(+1j * nu_lo * phi_fil)
        except specfun.BesselOverflowError:
            break
        total += ring
        peak = max(peak, abs(ring))
        q += 1
    return total


def q_sum_coefficients(
    m,
    n_points,
    curve,
    aux_inner,
    aux_outer,
    excitation,
    medium1=Medium(),
    medium2=Medium(),
    q_max=None,
):
    """Eigenvalue ingredients of the circular system as explicit q-sums.

    The DFT of each first column equals N times one of these sums, e.g.
    fft(z11 column)[m] = N Z1 b1 with b1 = sum_q J_{qN+m}(k1 r_aux1)
    H2_{qN+m}(k1 r_cyl), so they cross-check the whole circulant path
    without ever assembling a matrix. d carries the excitation column
    (inner rows for an external source, outer rows for an internal one).
    q_max=None keeps rings until they stop mattering; q_max=0 isolates the
    central term, which dominates for small m.
    """
    if curve.kind != "circle":
        raise ValueError("q-sum coefficients are defined for circles only")
    n_points = int(n_points)
    m = int(m)
    if not 0 <= m < n_points:
        raise ValueError("mode index must satisfy 0 <= m < n_points")
    _check_setup(curve, aux_inner, aux_outer, excitation, n_points)

    r_cyl = curve.params["radius"]
    r_in = aux_inner.curve.params["radius"]
    r_out = aux_outer.curve.params["radius"]
    k1, k2 = medium1.k, medium2.k
    r_fil = excitation.rho

    def _sum(fa, fb, x1, x2, sign, phi_fil=0.0):
        return sign * _bilateral_sum(
            lambda nu: fa(nu, x1) * fb(nu, x2),
            x1 / x2,
            min(x1, x2),
            n_points,
            m,
            q_max,
            phi_fil,
        )

    jj, jp = specfun.bessel_j, specfun.bessel_j_prime
    hh, hp = specfun.hankel2, specfun.hankel2_prime
    b1 = _sum(jj, hh, k1 * r_in, k1 * r_cyl, +1.0)
    b2 = _sum(jj, hp, k1 * r_in, k1 * r_cyl, -1.0)
    b3 = _sum(jj, hh, k2 * r_cyl, k2 * r_out, +1.0)
    b4 = _sum(jp, hh, k2 * r_cyl, k2 * r_out, -1.0)
    if excitation.region == "external":
        d = _sum(jj, hh, k1 * r_in, k1 * r_fil, -1.0, excitation.phi)
    else:
        d = _sum(jj, hh, k2 * r_fil, k2 * r_out, +1.0, excitation.phi)
    return QSumCoefficients(m, n_points, d, b1, b2, b3, b4)


def large_n_limit_coefficients(m, excitation, rho_cyl, medium1=Medium(), medium2=Medium()):
    """Aux-free limits of the per-mode amplitudes, per unit source current.

    As N grows, mode m of the direct circular solution approaches these
    values: fft(electric)[m] -> amplitude * first entry, and likewise for
    the magnetic vector. Both displaced radii cancel identically, so the
    function never sees them; dividing by 2 pi rho_cyl recovers the
    continuous density coefficients.
    """
    if excitation.polarization != "TM":
        raise ValueError("limits are implemented for TM excitation only")
    m = int(m)
    k1, z1 = medium1.k, medium1.Z
    k2, z2 = medium2.k, medium2.Z
    delta = mode_denominator(m, rho_cyl, medium1, medium2)
    if excitation.region == "external":
        source_radial = specfun.hankel2(m, k1 * excitation.rho)
        electric = -z1 * source_radial * specfun.bessel_j_prime(m, k2 * rho_cyl) / delta
        magnetic = 1j * z1 * z2 * source_radial * specfun.bessel_j(m, k2 * rho_cyl) / delta
    else:
        source_radial = specfun.bessel_j(m, k2 * excitation.rho)
        electric = -z2 * source_radial * specfun.hankel2_prime(m, k1 * rho_cyl) / delta
        magnetic = 1j * z1 * z2 * source_radial * specfun.hankel2(m, k1 * rho_cyl) / delta
    rot = np.exp(-1j * m * excitation.phi)
    return electric * rot, magnetic * rot

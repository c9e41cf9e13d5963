"""Oscillation metrics, divergence prediction, and error-vs-N sweeps.

The two discrete routes fail in characteristically different ways. The
source method develops rapidly oscillating, fast-growing amplitudes as soon
as an auxiliary surface is placed past the image radius of the filament (or
past the filament itself), and which surfaces break is predictable from the
radii alone. The direct method keeps its currents tame for any admissible
placement and only loses digits through conditioning. This module turns
that contrast into numbers: an oscillation index for solved current
vectors, an a-priori verdict per auxiliary surface, and sweeps over N that
track amplitude growth or field error.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import discrete, fields
from .exact import critical_radius, exact_field

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class OscillationReport:
    """How large and how wiggly one solved current vector is.

    oscillation_index is the fraction of the vector's mean-removed DFT
    energy carried by the top third of spatial frequencies (0 for a smooth
    vector, 1 for a sawtooth). max_amplitude is the largest entry magnitude
    and growth_factor compares it against the previous solved N of the same
    sweep (1.0 for the first). flagged marks growth_factor and
    oscillation_index jointly above the sweep's thresholds at this N.
    """

    surface: str
    n_points: int
    oscillation_index: float
    max_amplitude: float
    growth_factor: float
    flagged: bool


@dataclass(frozen=True)
class DivergencePrediction:
    """A-priori verdict for one auxiliary surface of a source-method solve."""

    method: str
    surface: str
    predicted: str


@dataclass(frozen=True)
class OscillationScan:
    """Per-surface oscillation reports across a sweep of N.

    n_points lists the successfully solved sizes in ascending order;
    reports maps each surface label to one OscillationReport per solved N;
    failures maps every N whose solve raised to the error message.
    """

    method: str
    n_points: tuple
    reports: dict
    failures: dict

    def flagged_surfaces(self):
        """Labels of surfaces flagged at any N of the sweep."""
        return tuple(
            label
            for label, reports in self.reports.items()
            if any(report.flagged for report in reports)
        )


@dataclass(frozen=True)
class SweepPoint:
    """Error observed at one N of a convergence sweep."""

    n_points: int
    error: float


@dataclass(frozen=True)
class ConvergenceSweep:
    """Error-vs-N table for one method against a fixed reference."""

    method: str
    reference: str
    points: tuple
    failures: dict

    def errors(self):
        """Mapping of solved N to the observed error."""
        return {point.n_points: point.error for point in self.points}


def predict_mas_divergence(excitation_kind, rho_aux1, rho_aux2, rho_cyl, rho_fil):
    """Classify both auxiliary surfaces of a circular source-method setup.

    The analytic continuation of the scattered field stops at the image
    radius rho_cyl**2 / rho_fil on the far side of the boundary from the
    filament, and at the filament radius on its own side. A source surface
    placed at or past the obstruction on its side picks up exponentially
    growing amplitudes; one strictly clear of it stays clean. A surface
    exactly on the threshold is classified 'diverges'.

    Returns (inner verdict, outer verdict) with surfaces labeled 'aux1'
    (inside the boundary) and 'aux2' (outside).
    """
    if excitation_kind not in ("external", "internal"):
        raise ValueError("excitation_kind must be 'external' or 'internal'")
    if min(rho_aux1, rho_aux2, rho_cyl, rho_fil) <= 0.0:
        raise ValueError("radii must be positive")
    if not rho_aux1 < rho_cyl < rho_aux2:
        raise ValueError("need rho_aux1 < rho_cyl < rho_aux2")
    if excitation_kind == "external":
        if rho_fil <= rho_cyl:
            raise ValueError("an external filament needs rho_fil > rho_cyl")
        inner_limit, outer_limit = critical_radius(rho_cyl, rho_fil), rho_fil
    else:
        if rho_fil >= rho_cyl:
            raise ValueError("an internal filament needs rho_fil < rho_cyl")
        inner_limit, outer_limit = rho_fil, critical_radius(rho_cyl, rho_fil)
    verdict_inner = "diverges" if rho_aux1 <= inner_limit else "converges"
    verdict_outer = "diverges" if rho_aux2 >= outer_limit else "converges"
    return (
        DivergencePrediction("mas", "aux1", verdict_inner),
        DivergencePrediction("mas", "aux2", verdict_outer),
    )


def oscillation_index(values):
    """Fraction of mean-removed DFT energy in the top third of frequencies.

    The spatial frequency of DFT bin m of an N-vector is min(m, N - m);
    bins above (2/3) * floor(N/2) count as the top third. A constant
    vector scores 0.0, the alternating vector (-1)**l scores 1.0.
    """
    vec = np.asarray(values, dtype=complex).ravel()
    if vec.size == 0:
        raise ValueError("need at least one sample")
    vec = vec - vec.mean()
    power = np.abs(np.fft.fft(vec)) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    wavenumber = np.minimum(np.arange(vec.size), vec.size - np.arange(vec.size))
    top_third = wavenumber > (2.0 / 3.0) * (vec.size // 2)
    return float(power[top_third].sum() / total)


def oscillation_scan(
    method,
    geometry,
    excitation,
    media,
    n_list,
    growth_threshold=3.0,
    index_threshold=0.5,
):
    """Track oscillation and amplitude growth of solved currents over N.

    Solves the system for every size in n_list and reports, per surface and
    per solved N in ascending order, the oscillation index, the peak
    amplitude, and its growth relative to the previous solved N. A report
    is flagged when growth_factor > growth_threshold and
    oscillation_index > index_threshold at the same N. A failed solve is
    recorded under its N and the scan continues; growth then compares
    against the last N that did solve.

    geometry is a (boundary, inner auxiliary surface, outer auxiliary
    surface) triple and media a (region-1 medium, region-2 medium) pair.
    Surface labels are 'aux1'/'aux2' for method 'mas' and
    'electric'/'magnetic' for method 'nfm'.
    """
    labels = _surface_labels(method)
    sizes, solutions, failures = _solve_sizes(method, geometry, excitation, media, n_list)
    reports = {label: [] for label in labels}
    previous = {label: None for label in labels}
    for n in sizes:
        if n not in solutions:
            continue
        solution = solutions[n]
        for label, vec in zip(labels, (solution.electric, solution.magnetic)):
            amplitude = float(np.max(np.abs(vec)))
            growth = _growth(previous[label], amplitude)
            index = oscillation_index(vec)
            reports[label].append(
                OscillationReport(
                    surface=label,
                    n_points=n,
                    oscillation_index=index,
                    max_amplitude=amplitude,
                    growth_factor=growth,
                    flagged=bool(growth > growth_threshold and index > index_threshold),
                )
            )
            previous[label] = amplitude
    return OscillationScan(
        method=method,
        n_points=tuple(n for n in sizes if n in solutions),
        reports={label: tuple(entries) for label, entries in reports.items()},
        failures=failures,
    )


def convergence_sweep(method, geometry, excitation, media, n_list, reference, rings=None):
    """Field or residual error of one method at every N in a sweep.

    reference 'exact' (circular boundaries only) compares total fields
    against the separable series on one observation ring per region, by
    default at five boundary radii outside and half a boundary radius
    inside, over 36 angles offset from the collocation grid so a filament
    sitting on a ring radius is never sampled; the error is the worst
    relative deviation over both rings. Pass rings as (radius, region)
    pairs to override. reference 'residual' reports the tangential-E
    boundary mismatch instead, which needs no separable solution; its
    magnetic companion is dominated by the near-boundary smearing of point
    supports on the direct route and is not folded in. Failed solves are
    recorded as in oscillation_scan.
    """
    _surface_labels(method)
    if reference not in ("exact", "residual"):
        raise ValueError("reference must be 'exact' or 'residual'")
    curve = geometry[0]
    if reference == "exact":
        if curve.kind != "circle":
            raise ValueError("the exact-series reference needs a circular boundary")
        if rings is None:
            radius = curve.params["radius"]
            rings = ((5.0 * radius, 1), (0.5 * radius, 2))
    sizes, solutions, failures = _solve_sizes(method, geometry, excitation, media, n_list)
    points = []
    for n in sizes:
        if n not in solutions:
            continue
        solution = solutions[n]
        if reference == "exact":
            error = _ring_error(solution, excitation, media, curve, rings)
        else:
            error = fields.boundary_residuals(solution, n_test=n)[0]
        points.append(SweepPoint(n_points=n, error=error))
    return ConvergenceSweep(
        method=method, reference=reference, points=tuple(points), failures=failures
    )


def _surface_labels(method):
    if method == "mas":
        return ("aux1", "aux2")
    if method == "nfm":
        return ("electric", "magnetic")
    raise ValueError("unknown method %r" % (method,))


def _growth(previous_amplitude, amplitude):
    if previous_amplitude is None:
        return 1.0
    if previous_amplitude > 0.0:
        return amplitude / previous_amplitude
    return 1.0 if amplitude == 0.0 else float("inf")


def _worker_count(n_jobs):
    """Worker count for sweeps; the CYLWAVE_THREADS variable caps it.

    Unset, non-integer, or nonpositive values fall back to the CPU count.
    """
    try:
        cap = int(os.environ.get("CYLWAVE_THREADS", ""))
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(n_jobs, cap))


def _solve_sizes(method, geometry, excitation, media, n_list):
    """Solve every N concurrently; results keyed by N, ascending sizes."""
    curve, aux_inner, aux_outer = geometry
    medium1, medium2 = media
    assemble = discrete.assemble_nfm if method == "nfm" else discrete.assemble_mas
    sizes = sorted(set(int(n) for n in n_list))
    if not sizes:
        raise ValueError("n_list must not be empty")

    def run(n):
        system = assemble(
            curve, aux_inner, aux_outer, excitation, medium1, medium2, n_points=n
        )
        return discrete.solve(system)

    solutions, failures = {}, {}
    with ThreadPoolExecutor(max_workers=_worker_count(len(sizes))) as pool:
        futures = {n: pool.submit(run, n) for n in sizes}
    for n in sizes:
        try:
            solutions[n] = futures[n].result()
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            failures[n] = str(exc)
    return sizes, solutions, failures


def _ring_error(solution, excitation, media, curve, rings):
    radius = curve.params["radius"]
    angles = _TWO_PI * (np.arange(36) + 0.5) / 36.0
    worst = 0.0
    for rho, region in rings:
        reference = np.array(
            [
                exact_field(excitation, region, rho, phi, radius, media[0], media[1]).value
                for phi in angles
            ]
        )
        observed = np.array(
            [fields.field_from_discrete(solution, rho, phi, region=region).e_z for phi in angles]
        )
        scale = float(np.max(np.abs(reference)))
        worst = max(worst, float(np.max(np.abs(observed - reference))) / (scale or 1.0))
    return worst

"""Configuration-driven command line: solve, fields, sweep, validate.

Every command except ``validate`` reads one JSON configuration describing
the geometry, the two media, the excitation, and the solver, and writes
machine-readable CSV/JSON into an output directory. Ready-made
configurations for the package's demonstration scenarios live under
``presets/``. Output is deterministic: the same configuration produces
byte-identical files (17-significant-digit floats, no timestamps), and
every data file names the SHA-256 of the configuration it came from.
``validate`` runs the package's cross-checking invariant suites and exits
nonzero if any of them fails.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import continuous, diagnostics, discrete, fields, specfun
from .exact import Medium, exact_field
from .geometry import AuxiliarySurface, BoundaryCurve, Excitation

_TWO_PI = 2.0 * np.pi
_SCHEMA = 1
_SOLVE_PATHS = {"auto": "auto", "dense": "dense", "fast": "dft"}
_MISSING = object()


class ConfigError(ValueError):
    """Invalid run configuration; messages start with the offending field path."""


@dataclass(frozen=True)
class RunConfig:
    """One validated run, ready to hand to the solver modules."""

    curve: BoundaryCurve
    aux_inner: AuxiliarySurface
    aux_outer: AuxiliarySurface
    media: tuple
    excitation: Excitation
    method: str
    solve_path: str
    n_list: tuple
    output: dict
    sha256: str

    def geometry(self):
        return (self.curve, self.aux_inner, self.aux_outer)

    def single_n(self, command):
        if len(self.n_list) != 1:
            raise ConfigError(
                "solver.n_list: the %s command takes a single N; use the sweep "
                "command for lists" % (command,)
            )
        return self.n_list[0]


# -- configuration parsing ---------------------------------------------------


def _entry(block, path, default=_MISSING):
    key = path.rsplit(".", 1)[-1]
    if key in block:
        return block[key]
    if default is _MISSING:
        raise ConfigError("%s: required field is missing" % (path,))
    return default


def _number(block, path, default=_MISSING, positive=False):
    value = _entry(block, path, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("%s: expected a number" % (path,))
    value = float(value)
    if positive and value <= 0.0:
        raise ConfigError("%s: must be positive" % (path,))
    return value


def _integer(block, path, default=_MISSING, minimum=1):
    value = _entry(block, path, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("%s: expected an integer" % (path,))
    if value < minimum:
        raise ConfigError("%s: must be at least %d" % (path, minimum))
    return value


def _string(block, path, choices=None, default=_MISSING):
    value = _entry(block, path, default)
    if not isinstance(value, str):
        raise ConfigError("%s: expected a string" % (path,))
    if choices is not None and value not in choices:
        raise ConfigError("%s: expected one of %s" % (path, "/".join(choices)))
    return value


def _block(container, path):
    value = container.get(path.rsplit(".", 1)[-1])
    if not isinstance(value, dict):
        raise ConfigError("%s: required object block is missing" % (path,))
    return value


def _amplitude(block):
    value = block.get("amplitude", 1.0)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError("excitation.amplitude: expected a number or an [re, im] pair")


def _parse_geometry(doc):
    geom = _block(doc, "geometry")
    kind = _string(geom, "geometry.kind", choices=("circle", "ellipse"))
    try:
        if kind == "circle":
            curve = BoundaryCurve.circle(_number(geom, "geometry.radius", positive=True))
        else:
            curve = BoundaryCurve.ellipse(
                _number(geom, "geometry.semi_major", positive=True),
                _number(geom, "geometry.semi_minor", positive=True),
            )
        aux = _block(geom, "geometry.aux")
        if kind == "circle":
            inner = AuxiliarySurface.from_radius(
                curve, _number(aux, "geometry.aux.inner_radius", positive=True)
            )
            outer = AuxiliarySurface.from_radius(
                curve, _number(aux, "geometry.aux.outer_radius", positive=True)
            )
        else:
            inner = AuxiliarySurface.from_scale(
                curve, _number(aux, "geometry.aux.inner_scale", positive=True)
            )
            outer = AuxiliarySurface.from_scale(
                curve, _number(aux, "geometry.aux.outer_scale", positive=True)
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("geometry: %s" % (exc,))
    return curve, inner, outer


def _parse_media(doc):
    media = _block(doc, "media")
    out = []
    for name in ("region1", "region2"):
        region = _block(media, "media.%s" % name)
        try:
            out.append(
                Medium(
                    _number(region, "media.%s.eps_r" % name, default=1.0, positive=True),
                    _number(region, "media.%s.mu_r" % name, default=1.0, positive=True),
                )
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("media.%s: %s" % (name, exc))
    return tuple(out)


def _parse_excitation(doc):
    block = _block(doc, "excitation")
    region = _string(block, "excitation.region", choices=("external", "internal"))
    radius = _number(block, "excitation.radius", positive=True)
    angle = _number(block, "excitation.angle", default=0.0)
    return Excitation(region, radius, angle, _amplitude(block))


def _parse_solver(doc):
    solver = _block(doc, "solver")
    method = _string(solver, "solver.method", choices=("nfm", "mas", "both"))
    path = _string(solver, "solver.path", choices=tuple(_SOLVE_PATHS), default="auto")
    if "n_list" in solver:
        raw = solver["n_list"]
        if not isinstance(raw, list):
            raise ConfigError("solver.n_list: expected a list of integers")
        if not raw:
            raise ConfigError("solver.n_list: must not be empty")
        n_list = []
        for i, value in enumerate(raw):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError("solver.n_list[%d]: expected an integer" % (i,))
            if value < 4:
                raise ConfigError("solver.n_list[%d]: must be at least 4" % (i,))
            n_list.append(value)
        n_list = tuple(n_list)
    else:
        n_list = (_integer(solver, "solver.n_points", minimum=4),)
    return method, _SOLVE_PATHS[path], n_list


def _parse_output(doc):
    block = doc.get("output", {})
    if not isinstance(block, dict):
        raise ConfigError("output: expected an object block")
    rings = None
    if "rings" in block:
        raw = block["rings"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("output.rings: expected a non-empty list of [radius, region] pairs")
        rings = []
        for i, pair in enumerate(raw):
            ok = (
                isinstance(pair, list)
                and len(pair) == 2
                and isinstance(pair[0], (int, float))
                and not isinstance(pair[0], bool)
                and pair[0] > 0
                and pair[1] in (1, 2)
            )
            if not ok:
                raise ConfigError(
                    "output.rings[%d]: expected [radius, region] with positive "
                    "radius and region 1 or 2" % (i,)
                )
            rings.append((float(pair[0]), int(pair[1])))
        rings = tuple(rings)
    return {
        "directory": _string(block, "output.directory", default="out"),
        "rings": rings,
        "angles": _integer(block, "output.angles", default=36, minimum=4),
        "angle_offset": _number(block, "output.angle_offset", default=0.0),
        "reference": _string(
            block, "output.reference", choices=("exact", "residual"), default=None
        )
        if "reference" in block
        else None,
    }


def load_config(path):
    """Read, hash, and validate a JSON run configuration."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % (exc,))
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise ConfigError("config is not valid JSON: %s" % (exc,))
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object at the top level")
    curve, inner, outer = _parse_geometry(doc)
    method, solve_path, n_list = _parse_solver(doc)
    return RunConfig(
        curve=curve,
        aux_inner=inner,
        aux_outer=outer,
        media=_parse_media(doc),
        excitation=_parse_excitation(doc),
        method=method,
        solve_path=solve_path,
        n_list=n_list,
        output=_parse_output(doc),
        sha256=hashlib.sha256(raw).hexdigest(),
    )


# -- output helpers ----------------------------------------------------------


def _fmt(value):
    return "%.17g" % value


def _jsonable(value):
    return value if math.isfinite(value) else str(value)


def _write_atomic(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        target = os.path.join(out_dir, name)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return target


def _csv_text(sha256, header, rows):
    buf = io.StringIO()
    buf.write("# schema=%d\n# config_sha256=%s\n" % (_SCHEMA, sha256))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _default_rings(config):
    if config.output["rings"] is not None:
        return config.output["rings"]
    if config.curve.kind == "circle":
        radius = config.curve.params["radius"]
    else:
        radius = min(config.curve.radius(_TWO_PI * np.arange(64) / 64))
    return ((5.0 * radius, 1), (0.5 * radius, 2))


def _solve_single(config, method, n):
    assemble = discrete.assemble_nfm if method == "nfm" else discrete.assemble_mas
    system = assemble(
        config.curve,
        config.aux_inner,
        config.aux_outer,
        config.excitation,
        config.media[0],
        config.media[1],
        n_points=n,
    )
    return discrete.solve(system, path=config.solve_path)


# -- commands ----------------------------------------------------------------


def cmd_solve(config, out_dir):
    """Solve one system; write currents.csv and summary.json."""
    if config.method == "both":
        raise ConfigError("solver.method: the solve command needs 'nfm' or 'mas'")
    n = config.single_n("solve")
    solution = _solve_single(config, config.method, n)
    phis = _TWO_PI * np.arange(n) / n
    dens_e, dens_m = discrete.normalized_currents(solution)
    rows = [
        [
            l,
            _fmt(phis[l]),
            _fmt(solution.electric[l].real),
            _fmt(solution.electric[l].imag),
            _fmt(solution.magnetic[l].real),
            _fmt(solution.magnetic[l].imag),
            _fmt(dens_e[l].real),
            _fmt(dens_e[l].imag),
            _fmt(dens_m[l].real),
            _fmt(dens_m[l].imag),
        ]
        for l in range(n)
    ]
    header = [
        "index",
        "angle",
        "re_electric",
        "im_electric",
        "re_magnetic",
        "im_magnetic",
        "re_electric_density",
        "im_electric_density",
        "re_magnetic_density",
        "im_magnetic_density",
    ]
    oscillation = {}
    labels = ("aux1", "aux2") if config.method == "mas" else ("electric", "magnetic")
    for label, vec in zip(labels, (solution.electric, solution.magnetic)):
        oscillation[label] = {
            "oscillation_index": diagnostics.oscillation_index(vec),
            "max_amplitude": float(np.max(np.abs(vec))),
            "growth_factor": 1.0,
            "flagged": False,
        }
    summary = {
        "schema": _SCHEMA,
        "config_sha256": config.sha256,
        "command": "solve",
        "method": config.method,
        "n_points": n,
        "solver_path": solution.path,
        "residual": _jsonable(solution.residual),
        "condition_estimate": _jsonable(solution.cond_estimate),
        "oscillation": oscillation,
    }
    wrote = [
        _write_atomic(out_dir, "currents.csv", _csv_text(config.sha256, header, rows)),
        _write_atomic(out_dir, "summary.json", _json_text(summary)),
    ]
    for path in wrote:
        print("wrote %s" % (path,))
    return 0


def cmd_fields(config, out_dir):
    """Evaluate fields on observation rings; write fields.csv."""
    n = config.single_n("fields")
    methods = ("nfm", "mas") if config.method == "both" else (config.method,)
    solutions = {method: _solve_single(config, method, n) for method in methods}
    rings = _default_rings(config)
    count = config.output["angles"]
    angles = _TWO_PI * (np.arange(count) + config.output["angle_offset"]) / count
    with_exact = config.curve.kind == "circle"
    header = ["ring_radius", "region", "angle"]
    if with_exact:
        header += ["re_exact", "im_exact"]
    for method in methods:
        header += ["re_%s" % method, "im_%s" % method]
    rows = []
    for rho, region in rings:
        for phi in angles:
            row = [_fmt(rho), region, _fmt(phi)]
            if with_exact:
                value = exact_field(
                    config.excitation,
                    region,
                    rho,
                    phi,
                    config.curve.params["radius"],
                    config.media[0],
                    config.media[1],
                ).value
                row += [_fmt(value.real), _fmt(value.imag)]
            for method in methods:
                sample = fields.field_from_discrete(solutions[method], rho, phi, region=region)
                row += [_fmt(sample.e_z.real), _fmt(sample.e_z.imag)]
            rows.append(row)
    target = _write_atomic(out_dir, "fields.csv", _csv_text(config.sha256, header, rows))
    print("wrote %s" % (target,))
    return 0


def cmd_sweep(config, out_dir):
    """Scan oscillation and error over N; write sweep.csv."""
    if config.method == "both":
        raise ConfigError("solver.method: the sweep command needs 'nfm' or 'mas'")
    reference = config.output["reference"]
    if reference is None:
        reference = "exact" if config.curve.kind == "circle" else "residual"
    scan = diagnostics.oscillation_scan(
        config.method, config.geometry(), config.excitation, config.media, config.n_list
    )
    sweep = diagnostics.convergence_sweep(
        config.method,
        config.geometry(),
        config.excitation,
        config.media,
        config.n_list,
        reference,
        rings=config.output["rings"],
    )
    errors = sweep.errors()
    predicted = {}
    if config.method == "mas" and config.curve.kind == "circle":
        for verdict in diagnostics.predict_mas_divergence(
            config.excitation.region,
            config.aux_inner.curve.params["radius"],
            config.aux_outer.curve.params["radius"],
            config.curve.params["radius"],
            config.excitation.rho,
        ):
            predicted[verdict.surface] = verdict.predicted
    header = [
        "n_points",
        "surface",
        "max_amplitude",
        "growth_factor",
        "oscillation_index",
        "flagged",
        "predicted",
        "error",
        "note",
    ]
    rows = []
    failures = dict(scan.failures)
    failures.update(sweep.failures)
    sizes = sorted(set(scan.n_points) | set(failures))
    first_seen = set()
    for size in sizes:
        if size in failures:
            rows.append([size, "", "", "", "", "", "", "", failures[size]])
            continue
        for label in scan.reports:
            report = next(r for r in scan.reports[label] if r.n_points == size)
            growth = "" if label not in first_seen else _fmt(report.growth_factor)
            first_seen.add(label)
            rows.append(
                [
                    size,
                    label,
                    _fmt(report.max_amplitude),
                    growth,
                    _fmt(report.oscillation_index),
                    "true" if report.flagged else "false",
                    predicted.get(label, ""),
                    _fmt(errors[size]) if size in errors else "",
                    "",
                ]
            )
    target = _write_atomic(out_dir, "sweep.csv", _csv_text(config.sha256, header, rows))
    print("wrote %s" % (target,))
    return 0


# -- validate ----------------------------------------------------------------


def _check_specfun():
    orders = range(0, 61, 4)
    grid = np.linspace(0.2, 30.0, 16)
    worst = max(
        float(np.max(np.abs(specfun.wronskian_residual(n, grid)) * (np.pi * grid / 2.0)))
        for n in orders
    )
    yield "wronskian", worst < 1e-12, "max relative residual %.3g (tol 1e-12)" % worst

    worst = 0.0
    for x1 in np.linspace(1.0, 3.0, 5):
        for ratio in np.linspace(1.2, 10.0, 5):
            for theta in np.linspace(0.0, np.pi, 8):
                x2 = x1 * ratio
                dist = math.sqrt(x1**2 + x2**2 - 2.0 * x1 * x2 * math.cos(theta))
                got = specfun.addition_series_h0(x1, x2, theta, n_max=220)
                worst = max(worst, abs(got - specfun.hankel2(0, dist)))
    yield "addition_closure", worst < 1e-10, "max closure error %.3g on 200 points (tol 1e-10)" % worst


def _check_exact():
    media = (Medium(), Medium(4.2, 1.0))
    for name, excitation in (
        ("external", Excitation("external", 4.0)),
        ("internal", Excitation("internal", 1.0)),
    ):
        worst = 0.0
        for rho, region in ((10.0, 1), (1.3, 2)):
            for phi in _TWO_PI * (np.arange(32) + 0.5) / 32.0:
                want = exact_field(excitation, region, rho, phi, 2.0, *media).value
                got = continuous.reconstruct_fields_from_densities(
                    excitation, rho, phi, 2.0, *media
                )
                worst = max(worst, abs(got - want) / abs(want))
        yield (
            "reconstruction_%s" % name,
            worst < 1e-9,
            "max relative deviation %.3g at 64 points (tol 1e-9)" % worst,
        )


def _check_discrete():
    media = (Medium(), Medium(4.2, 1.0))
    curve = BoundaryCurve.circle(2.0)
    inner = AuxiliarySurface.from_radius(curve, 1.5)
    outer = AuxiliarySurface.from_radius(curve, 2.5)
    excitation = Excitation("external", 4.0)

    worst = 0.0
    for n in (5, 11, 40):
        system = discrete.assemble_nfm(curve, inner, outer, excitation, *media, n_points=n)
        fast = discrete.solve(system, path="dft")
        dense = discrete.solve(system, path="dense")
        scale = max(np.max(np.abs(dense.electric)), np.max(np.abs(dense.magnetic)))
        diff = max(
            np.max(np.abs(fast.electric - dense.electric)),
            np.max(np.abs(fast.magnetic - dense.magnetic)),
        )
        worst = max(worst, float(diff / scale))
    yield "dft_vs_dense", worst < 1e-9, "max relative gap %.3g over N in {5,11,40} (tol 1e-9)" % worst

    system = discrete.assemble_nfm(curve, inner, outer, excitation, *media, n_points=11)
    worst = 0.0
    z1, z2 = media[0].Z, media[1].Z
    for m in range(11):
        sums = discrete.q_sum_coefficients(m, 11, curve, inner, outer, excitation, *media)
        dft = (
            np.fft.fft(system.rhs[:11])[m] / (11 * excitation.amplitude * z1),
            np.fft.fft(system.z11[:, 0])[m] / (11 * z1),
            np.fft.fft(system.z12[:, 0])[m] / (11 * 1j),
            np.fft.fft(system.z21[:, 0])[m] / (11 * z2),
            np.fft.fft(system.z22[:, 0])[m] / (11 * 1j),
        )
        for got, want in zip((sums.d, sums.b1, sums.b2, sums.b3, sums.b4), dft):
            worst = max(worst, abs(got - want) / abs(want))
    yield "qsums_vs_dft", worst < 1e-9, "max relative gap %.3g at N=11 (tol 1e-9)" % worst

    solution = discrete.solve(
        discrete.assemble_nfm(curve, inner, outer, excitation, *media, n_points=40)
    )
    dens_e, dens_m = discrete.normalized_currents(solution)
    phis = _TWO_PI * np.arange(40) / 40.0
    want = np.array([continuous.density_series(excitation, phi, 2.0, *media) for phi in phis])
    diff = max(
        float(np.max(np.abs(dens_e - want[:, 0])) / np.max(np.abs(want[:, 0]))),
        float(np.max(np.abs(dens_m - want[:, 1])) / np.max(np.abs(want[:, 1]))),
    )
    yield "currents_vs_densities", diff < 1e-3, "max relative gap %.3g at N=40 (tol 1e-3)" % diff


def _check_concordance():
    media = (Medium(), Medium(4.2, 1.0))
    curve = BoundaryCurve.circle(2.0)
    hits, total, nfm_flags = 0, 0, 0
    for excitation in (Excitation("external", 4.0), Excitation("internal", 1.0)):
        for rho_inner in (0.5, 1.35, 1.8):
            for rho_outer in (2.5, 3.2, 7.0):
                geometry = (
                    curve,
                    AuxiliarySurface.from_radius(curve, rho_inner),
                    AuxiliarySurface.from_radius(curve, rho_outer),
                )
                predicted = diagnostics.predict_mas_divergence(
                    excitation.region, rho_inner, rho_outer, 2.0, excitation.rho
                )
                scan = diagnostics.oscillation_scan(
                    "mas", geometry, excitation, media, [40, 46]
                )
                flagged = scan.flagged_surfaces()
                for verdict in predicted:
                    total += 1
                    if (verdict.surface in flagged) == (verdict.predicted == "diverges"):
                        hits += 1
                nfm = diagnostics.oscillation_scan(
                    "nfm", geometry, excitation, media, [40, 46]
                )
                nfm_flags += len(nfm.flagged_surfaces())
    yield "mas_flags_match_predictions", hits == total, "%d/%d surfaces concordant" % (hits, total)
    yield "nfm_never_flags", nfm_flags == 0, "%d flagged NFM scans on the grid" % nfm_flags


_VALIDATE_GROUPS = {
    "specfun": _check_specfun,
    "exact": _check_exact,
    "discrete": _check_discrete,
    "concordance": _check_concordance,
}


def cmd_validate(only, out_dir):
    """Run the cross-checking invariant suites; exit 0 iff all pass."""
    if only is not None and only not in _VALIDATE_GROUPS:
        raise ConfigError(
            "--only: unknown group %r (choose from %s)"
            % (only, "/".join(sorted(_VALIDATE_GROUPS)))
        )
    names = [only] if only else list(_VALIDATE_GROUPS)
    report = {"schema": _SCHEMA, "groups": {}, "passed": True}
    passed = failed = 0
    for name in names:
        entries = []
        for check, ok, detail in _VALIDATE_GROUPS[name]():
            entries.append({"check": check, "passed": bool(ok), "detail": detail})
            print("%s %s.%s: %s" % ("PASS" if ok else "FAIL", name, check, detail))
            passed += bool(ok)
            failed += not ok
        report["groups"][name] = entries
    report["passed"] = failed == 0
    print("%d checks passed, %d failed" % (passed, failed))
    if out_dir is not None:
        print("wrote %s" % (_write_atomic(out_dir, "validate.json", _json_text(report)),))
    return 0 if failed == 0 else 1


# -- entry point -------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cylwave",
        description="Line-source scattering workbench: solvers, fields, sweeps, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("solve", "solve one system and write currents.csv + summary.json"),
        ("fields", "evaluate fields on observation rings and write fields.csv"),
        ("sweep", "scan oscillation and error over an N list and write sweep.csv"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="path to a JSON run configuration")
        cmd.add_argument("--out", help="output directory (overrides output.directory)")
    check = sub.add_parser("validate", help="run the invariant suites and report pass/fail")
    check.add_argument("--only", help="run a single group: %s" % "/".join(sorted(_VALIDATE_GROUPS)))
    check.add_argument("--out", help="directory for validate.json")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.only, args.out)
        config = load_config(args.config)
        out_dir = args.out if args.out is not None else config.output["directory"]
        command = {"solve": cmd_solve, "fields": cmd_fields, "sweep": cmd_sweep}[args.command]
        return command(config, out_dir)
    except (ValueError, ArithmeticError, OSError) as exc:
        print("cylwave: error: %s" % (exc,), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    pseudotopo <command> [--config PATH] [--out PATH] [--format json|csv] [--seed N] [--timing]

The configuration is a JSON object; every field is validated before any
computation starts.  Reports are deterministic for a given (config, seed):
floats are written with 17 significant digits and keys keep a fixed order.
Wall-clock timing is only included with ``--timing``.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import (
    ModelError,
    NoChiralOperator,
    NumericalError,
    ParseError,
    PseudotopoError,
    ValidationError,
)
from .invariants import DEFAULT_POINTS_2D, SCHEMES, QuadratureSpec, berry_connection_point, invariant_report
from .lattice import (
    MassProfile,
    discretize_1d,
    eta_norm_drift,
    phase_aligned_distance,
    zero_mode_nonhermitian,
    zero_mode_solve,
)
from .linalg import gen_eig, herm_eig, max_abs, multiset_distance
from .models import (
    ModelId,
    ModelSpec,
    build_H,
    build_h,
    build_metric,
    chiral_operators,
    find_chiral_operator,
    metric_spectrum,
    symmetry_residuals_3d,
)
from .pseudoherm import bloch_solve, evolve, normality_check

COMMANDS = ("spectrum", "metric-check", "berry", "invariant", "zeromode", "evolve", "report")
FORMATS = ("json", "csv")
TOP_KEYS = ("command", "model", "p", "quadrature", "lattice", "evolve", "output", "format", "seed")

EXIT_OK, EXIT_FAILED, EXIT_NUMERICAL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class LatticeConfig:
    profile: MassProfile
    n_sites: int = 800
    spacing: float = 0.05
    wilson_r: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: ModelSpec | None
    momenta: np.ndarray | None          # (K, D)
    quadrature: QuadratureSpec
    lattice: LatticeConfig
    times: tuple = ()
    state: np.ndarray | None = None
    output_path: str | None = None
    output_format: str = "json"
    seed: int = 0
    echo: dict = field(default_factory=dict)


@dataclass
class Report:
    toolkit_version: str
    config_echo: dict
    results: dict
    timing: float
    exit_code: int = EXIT_OK

    def as_dict(self, include_timing: bool = False) -> dict:
        out = {"toolkit_version": self.toolkit_version, "config_echo": self.config_echo,
               "results": self.results, "exit_code": self.exit_code}
        if include_timing:
            out["timing"] = self.timing
        return out


# ------------------------------------------------------------- parsing

def _number(value, name, *, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name} must be a number")
    if integer and int(value) != value:
        raise ValidationError(f"{name} must be an integer")
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite")
    return int(value) if integer else float(value)


def _section(raw: dict, key: str, allowed: tuple) -> dict:
    sec = raw.get(key, {})
    if not isinstance(sec, dict):
        raise ValidationError(f"{key} must be an object")
    unknown = sorted(set(sec) - set(allowed))
    if unknown:
        raise ValidationError(f"unknown field {key}.{unknown[0]}")
    return sec


def _parse_model(raw: dict, required: bool):
    if "model" not in raw:
        if required:
            raise ValidationError("model required")
        return None
    sec = _section(raw, "model", ("id", "m", "phi", "axis"))
    if "id" not in sec:
        raise ValidationError("model.id required")
    try:
        model_id = ModelId(sec["id"])
    except ValueError:
        raise ValidationError(f"model.id must be one of {[m.value for m in ModelId]}") from None
    axis = sec.get("axis", [1.0, 0.0, 0.0])
    if not isinstance(axis, list) or len(axis) != 3:
        raise ValidationError("model.axis must be a list of three numbers")
    axis = tuple(_number(c, "model.axis") for c in axis)
    if model_id is ModelId.DIRAC_2D and abs(math.sqrt(sum(c * c for c in axis)) - 1.0) > 1e-12:
        raise ValidationError("axis not unit length")
    if "m" not in sec:
        raise ValidationError("model.m required")
    m = _number(sec["m"], "model.m")
    phi = _number(sec.get("phi", 0.0), "model.phi")
    try:
        return ModelSpec(model_id, m, phi, axis)
    except ModelError as exc:
        raise ValidationError(str(exc)) from None


def _parse_momenta(raw: dict, dim: int):
    if "p" not in raw:
        return np.zeros((1, dim))
    p = raw["p"]
    if isinstance(p, dict):
        unknown = sorted(set(p) - {"min", "max", "n"})
        if unknown or not {"min", "max", "n"} <= set(p):
            raise ValidationError("p grid needs exactly min, max, n")
        lo, hi = _number(p["min"], "p.min"), _number(p["max"], "p.max")
        n = _number(p["n"], "p.n", integer=True)
        if n < 1 or hi < lo:
            raise ValidationError("p grid needs n >= 1 and max >= min")
        axis = np.linspace(lo, hi, n)
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=-1)
    if not isinstance(p, list) or not p:
        raise ValidationError("p must be a non-empty array or a grid spec {min, max, n}")
    if dim == 1 and all(not isinstance(x, list) for x in p):
        return np.array([[_number(x, "p")] for x in p])
    rows = []
    for row in p:
        row = row if isinstance(row, list) else [row]
        if len(row) != dim:
            raise ValidationError(f"each momentum must have {dim} components")
        rows.append([_number(x, "p") for x in row])
    return np.array(rows)


def _parse_quadrature(raw: dict, model: ModelSpec | None) -> QuadratureSpec:
    sec = _section(raw, "quadrature", ("n_points", "cutoff", "scheme", "fd_step", "tol"))
    two_d = model is not None and model.model_id is ModelId.DIRAC_2D
    kw = {"n_points": _number(sec.get("n_points", DEFAULT_POINTS_2D if two_d else 2048),
                              "quadrature.n_points", integer=True)}
    for key in ("cutoff", "fd_step", "tol"):
        if key in sec:
            kw[key] = _number(sec[key], f"quadrature.{key}")
    if "scheme" in sec:
        if sec["scheme"] not in SCHEMES:
            raise ValidationError(f"quadrature.scheme must be one of {list(SCHEMES)}")
        kw["scheme"] = sec["scheme"]
    try:
        return QuadratureSpec(**kw)
    except ModelError as exc:
        raise ValidationError(str(exc)) from None


def _parse_lattice(raw: dict) -> LatticeConfig:
    sec = _section(raw, "lattice", ("profile", "m0", "w", "n_sites", "spacing", "wilson_r"))
    kind = sec.get("profile", "sign")
    if kind not in ("sign", "tanh", "constant"):
        raise ValidationError("lattice.profile must be 'sign', 'tanh' or 'constant'")
    m0 = _number(sec.get("m0", 1.0), "lattice.m0")
    w = _number(sec.get("w", 1.0), "lattice.w")
    n_sites = _number(sec.get("n_sites", 800), "lattice.n_sites", integer=True)
    spacing = _number(sec.get("spacing", 0.05), "lattice.spacing")
    wilson_r = _number(sec.get("wilson_r", 1.0), "lattice.wilson_r")
    if n_sites < 64:
        raise ValidationError("lattice.n_sites must be >= 64")
    if not spacing > 0:
        raise ValidationError("lattice.spacing must be positive")
    if spacing * m0 > 0.2:
        raise ValidationError("lattice.spacing * lattice.m0 must not exceed 0.2")
    if not 0.0 <= wilson_r <= 1.0:
        raise ValidationError("lattice.wilson_r must lie in [0, 1]")
    try:
        profile = MassProfile(kind, m0, w)
    except ModelError as exc:
        raise ValidationError(str(exc)) from None
    return LatticeConfig(profile, n_sites, spacing, wilson_r)


def _parse_state(value, dim: int):
    if not isinstance(value, list) or len(value) != dim:
        raise ValidationError(f"evolve.state must list {dim} components")
    out = []
    for c in value:
        if isinstance(c, list):
            if len(c) != 2:
                raise ValidationError("complex state entries are [re, im] pairs")
            out.append(complex(_number(c[0], "evolve.state"), _number(c[1], "evolve.state")))
        else:
            out.append(complex(_number(c, "evolve.state")))
    state = np.array(out)
    if not np.any(state):
        raise ValidationError("evolve.state must be nonzero")
    return state


def parse_config(text, command: str | None = None) -> RunConfig:
    """Validate a JSON configuration (bytes or str) into a :class:`RunConfig`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not UTF-8: {exc}") from None
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object", line=1)
    unknown = sorted(set(raw) - set(TOP_KEYS))
    if unknown:
        raise ValidationError(f"unknown field {unknown[0]}")

    cmd = raw.get("command", command)
    if command is not None and cmd != command:
        raise ValidationError(f"command {command!r} conflicts with config command {cmd!r}")
    if cmd not in COMMANDS:
        raise ValidationError(f"command must be one of {list(COMMANDS)}")

    model = _parse_model(raw, required=cmd not in ("zeromode", "report"))
    if cmd == "zeromode" and model is not None and model.model_id is not ModelId.DIRAC_1D:
        raise ValidationError("zeromode needs model.id DIRAC_1D")
    momenta = _parse_momenta(raw, model.space_dim) if model else None
    quadrature = _parse_quadrature(raw, model)
    lattice = _parse_lattice(raw)

    times, state = (), None
    sec = _section(raw, "evolve", ("t", "state"))
    if cmd == "evolve":
        if "t" not in sec:
            raise ValidationError("evolve.t required")
        t = sec["t"]
        times = tuple(_number(x, "evolve.t") for x in (t if isinstance(t, list) else [t]))
        if "state" in sec:
            state = _parse_state(sec["state"], model.dim)

    fmt = raw.get("format", "json")
    if fmt not in FORMATS:
        raise ValidationError("format must be 'json' or 'csv'")
    out = raw.get("output")
    if out is not None and not isinstance(out, str):
        raise ValidationError("output must be a path string")
    seed = _number(raw.get("seed", 0), "seed", integer=True)

    echo = {"command": cmd}
    if model is not None:
        echo["model"] = {"id": model.model_id.value, "m": model.mass, "phi": model.phi, "axis": list(model.axis)}
        echo["p"] = momenta.tolist()
    echo["quadrature"] = {"n_points": quadrature.n_points, "cutoff": quadrature.cutoff,
                          "scheme": quadrature.scheme, "fd_step": quadrature.fd_step, "tol": quadrature.tol}
    echo["lattice"] = {"profile": lattice.profile.kind, "m0": lattice.profile.amplitude,
                       "w": lattice.profile.width, "n_sites": lattice.n_sites,
                       "spacing": lattice.spacing, "wilson_r": lattice.wilson_r}
    if cmd == "evolve":
        echo["evolve"] = {"t": list(times),
                          "state": None if state is None else [[c.real, c.imag] for c in state]}
    echo.update({"output": out, "format": fmt, "seed": seed})
    return RunConfig(cmd, model, momenta, quadrature, lattice, times, state, out, fmt, seed, echo)


# ------------------------------------------------------------ commands

def _cplx(a):
    """Complex array -> nested [re, im] lists (real arrays pass through)."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.tolist()


def _spectrum(cfg: RunConfig):
    spec = cfg.model
    points = []
    for p in cfg.momenta:
        ev_H = gen_eig(build_H(spec, p)).values
        ev_h = herm_eig(build_h(spec, p)).values
        points.append({"p": p.tolist(), "energies": ev_H.real.tolist(),
                       "im_energy_residual": np.abs(ev_H.imag).tolist(),
                       "energies_h": ev_h.tolist(),
                       "multiset_distance": multiset_distance(ev_H, ev_h)})
    return {"points": points}


def _metric_check(cfg: RunConfig):
    spec = cfg.model
    met = build_metric(spec)
    eta, eta_inv = met.eta_plus, np.linalg.inv(met.eta_plus)
    H, h = build_H(spec, cfg.momenta), build_h(spec, cfg.momenta)
    Hd = np.conj(np.swapaxes(H, -1, -2))
    residuals = {
        "eta_hermiticity": max_abs(eta - eta.conj().T),
        "rho_squared_minus_eta": max_abs(met.rho @ met.rho - eta),
        "rho_times_rho_inverse": max_abs(met.rho @ met.rho_inv - np.eye(spec.dim)),
        "similarity": max_abs(met.rho @ H @ met.rho_inv - h),
        "pseudo_hermiticity": max_abs(Hd - eta @ H @ eta_inv),
        "h_hermiticity": max_abs(h - np.conj(np.swapaxes(h, -1, -2))),
        "isospectrality": max(multiset_distance(gen_eig(a).values, herm_eig(b).values) for a, b in zip(H, h)),
    }
    diagnostics = {"metric_spectrum": metric_spectrum(spec).tolist()}
    try:
        sym = chiral_operators(spec)
        kappa_inv = np.linalg.inv(sym.kappa)
        residuals["pseudo_anti_hermiticity"] = max_abs(Hd + sym.kappa @ H @ kappa_inv)
        diagnostics["chiral_operator"] = _cplx(find_chiral_operator(spec))
    except NoChiralOperator:
        diagnostics["chiral_operator"] = None
    if spec.model_id is ModelId.DIRAC_3D:
        sym_res = [symmetry_residuals_3d(spec, p) for p in cfg.momenta]
        residuals["time_reversal"] = max(r["time_reversal"] for r in sym_res)
        residuals["parity_deformed"] = max(r["parity_deformed"] for r in sym_res)
        diagnostics["parity_standard"] = max(r["parity_standard"] for r in sym_res)
        diagnostics["time_reversal_fixed_p"] = max(r["time_reversal_fixed_p"] for r in sym_res)
    try:
        comm, qdef = zip(*(normality_check(a) for a in H))
        diagnostics["normality_commutator"] = max(comm)
        diagnostics["q_idempotency_defect"] = max(qdef)
    except PseudotopoError as exc:
        diagnostics["normality"] = f"skipped: {exc}"
    return {"residuals": residuals, "diagnostics": diagnostics}


def _berry(cfg: RunConfig):
    conn = berry_connection_point(cfg.model, cfg.momenta, cfg.quadrature.fd_step)
    return {"points": [{"p": p.tolist(), "a": _cplx(a), "A": _cplx(A)}
                       for p, a, A in zip(cfg.momenta, conn.a, conn.A)],
            "max_difference": conn.difference, "fd_step": cfg.quadrature.fd_step}


def _invariant(cfg: RunConfig):
    rep = invariant_report(cfg.model, cfg.quadrature)
    return {"cs1": rep.cs1, "winding": rep.winding,
            "chern_like_2d": None if rep.chern_like_2d is None else list(rep.chern_like_2d),
            "equality_residuals": rep.equality_residuals,
            "convergence_estimate": rep.convergence_estimate}


def _zeromode(cfg: RunConfig):
    lat = cfg.lattice
    phi = cfg.model.phi if cfg.model else 0.0
    op = discretize_1d(lat.profile, lat.n_sites, lat.spacing, lat.wilson_r)
    res = zero_mode_solve(op, phi)
    op_H = discretize_1d(lat.profile, lat.n_sites, lat.spacing, lat.wilson_r, phi=phi)
    direct = zero_mode_nonhermitian(op_H)
    return {
        "energy": res.energy,
        "residual": res.residual,
        "overlap_with_analytic": res.overlap_with_analytic,
        "nonhermitian_state_distance": phase_aligned_distance(direct, res.state_eta, phi),
        "eta_norm_drift_t10": eta_norm_drift(op_H, res.state_eta, 10.0),
        "lowest_levels": res.levels[:4].tolist(),
        "half_length": op.half_length,
        "_profile": (op.positions, res.state_eta),
    }


def _evolve(cfg: RunConfig):
    spec = cfg.model
    eta = build_metric(spec).eta_plus
    rows = []
    for p in cfg.momenta:
        v0 = cfg.state if cfg.state is not None else bloch_solve(spec, p).filled_eta[:, 0]
        n_eta0 = math.sqrt((v0.conj() @ eta @ v0).real)
        n0 = float(np.linalg.norm(v0))
        for t in cfg.times:
            v = evolve(spec, p, t, v0)
            n_eta = math.sqrt((v.conj() @ eta @ v).real)
            rows.append({"p": p.tolist(), "t": t, "state": _cplx(v),
                         "eta_norm": n_eta, "eta_norm_drift": abs(n_eta - n_eta0),
                         "standard_norm": float(np.linalg.norm(v)),
                         "standard_norm_drift": abs(float(np.linalg.norm(v)) - n0)})
    return {"steps": rows}


def _report(cfg: RunConfig):
    from .acceptance import run_suite

    results = run_suite(cfg.seed)
    return {"criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "details": r.details}
                         for r in results],
            "all_passed": all(r.passed for r in results)}


_DISPATCH = {"spectrum": _spectrum, "metric-check": _metric_check, "berry": _berry,
             "invariant": _invariant, "zeromode": _zeromode, "evolve": _evolve, "report": _report}


def _exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, ModelError):
        return EXIT_INPUT
    return EXIT_INTERNAL


def run(config: RunConfig, include_timing: bool = False) -> Report:
    """Execute one command, write the report if an output path is set, and return it."""
    t0 = time.perf_counter()
    try:
        results = _DISPATCH[config.command](config)
        code = EXIT_OK
        if config.command == "report" and not results["all_passed"]:
            code = EXIT_FAILED
    except PseudotopoError as exc:
        results = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        code = _exit_code_for(exc)
    report = Report(__version__, config.echo, results, time.perf_counter() - t0, code)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render(report, config.output_format, include_timing))
    return report


# ------------------------------------------------------------ rendering

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def _plain(obj):
    """Strip numpy scalars/arrays and private keys."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats at 17 significant digits."""
    pad, inner = " " * indent * _level, " " * indent * (_level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent, _level + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _csv_cell(v):
    if isinstance(v, float):
        return _fmt_float(v).strip('"')
    if isinstance(v, list):
        return " ".join(str(_csv_cell(x)) for x in v)
    return "" if v is None else str(v)


def to_csv(report: Report, command: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    res = report.results
    if "error" in res:
        w.writerow(["error_type", "message"])
        w.writerow([res["error"]["type"], res["error"]["message"]])
    elif command == "spectrum":
        dim = len(res["points"][0]["p"])
        w.writerow([f"p{i + 1}" for i in range(dim)] + ["band_index", "energy", "im_energy_residual"])
        for pt in res["points"]:
            for b, (e, im) in enumerate(zip(pt["energies"], pt["im_energy_residual"])):
                w.writerow([_csv_cell(float(x)) for x in pt["p"]] + [b, _csv_cell(float(e)), _csv_cell(float(im))])
    elif command == "zeromode":
        x, state = res["_profile"]
        w.writerow(["x", "re_up", "im_up", "re_down", "im_down"])
        for xi, (u, d) in zip(x, state.reshape(-1, 2)):
            w.writerow([_csv_cell(float(v)) for v in (xi, u.real, u.imag, d.real, d.imag)])
    elif command == "evolve":
        w.writerow(["p", "t", "eta_norm", "standard_norm"])
        for row in res["steps"]:
            w.writerow([_csv_cell(row["p"]), _csv_cell(float(row["t"])),
                        _csv_cell(row["eta_norm"]), _csv_cell(row["standard_norm"])])
    elif command == "report":
        w.writerow(["criterion", "title", "passed"])
        for c in res["criteria"]:
            w.writerow([c["number"], c["title"], c["passed"]])
    else:
        rows: list = []
        _flatten("", _plain(res), rows)
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, _csv_cell(v)])
    return buf.getvalue()


def render(report: Report, fmt: str = "json", include_timing: bool = False) -> str:
    if fmt == "csv":
        return to_csv(report, report.config_echo.get("command", ""))
    return to_json(_plain(report.as_dict(include_timing))) + "\n"


# ------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pseudotopo", description="Pseudo-hermitian Dirac model toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--timing", action="store_true", help="include wall-clock time in JSON reports")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = b""
        if args.config:
            with open(args.config, "rb") as fh:
                text = fh.read()
        raw = json.loads(text) if text.strip() else {}
        if isinstance(raw, dict):
            if args.format:
                raw["format"] = args.format
            if args.seed is not None:
                raw["seed"] = args.seed
            if args.out:
                raw["output"] = args.out
            text = json.dumps(raw)
        cfg = parse_config(text, args.command)
    except json.JSONDecodeError as exc:
        print(f"error: ParseError: invalid JSON at line {exc.lineno}: {exc.msg}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PseudotopoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code_for(exc)

    try:
        report = run(cfg, include_timing=args.timing)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 4
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if not cfg.output_path:
        sys.stdout.write(render(report, cfg.output_format, args.timing))
    if cfg.command == "report":
        from .acceptance import CriterionResult

        for c in report.results.get("criteria", []):
            print(CriterionResult(c["number"], c["title"], c["passed"]).line(), file=sys.stderr)
    if "error" in report.results:
        err = report.results["error"]
        print(f"error: {err['type']}: {err['message']}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

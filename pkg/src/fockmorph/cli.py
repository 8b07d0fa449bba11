"""``fockmorph`` command-line driver.

Exit status: 0 on success, 1 on invalid input, 2 when a checked property fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from . import hamiltonians as ham
from . import mourre as mo
from . import operators as ops
from . import spectral as sp
from .config import ConfigError, ModelConfig, family_values
from .verify import UnknownSuite, run_suites

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class Report:
    """Structured record plus named tables; tolerances travel with the values they gate."""

    def __init__(self, command: str):
        self.data: dict[str, Any] = {"command": command}
        self.tables: dict[str, tuple[list[str], list[list]]] = {}
        self.failed = False

    def check(self, name: str, value: float, tol: float, relation: str = "<=") -> dict:
        ok = {"<=": value <= tol, ">": value > tol}[relation]
        self.failed |= not ok
        rec = {"value": float(value), "tolerance": float(tol), "relation": relation, "passed": bool(ok)}
        self.data.setdefault("checks", {})[name] = rec
        return rec

    def table(self, name: str, header: list[str], rows: list[list]):
        self.tables[name] = (header, rows)

    def structured(self) -> str:
        return json.dumps(_jsonable(self.data), indent=2, sort_keys=True) + "\n"

    def tabular(self) -> dict[str, str]:
        out = {}
        for name, (header, rows) in self.tables.items():
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in r])
            out[name] = buf.getvalue()
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# -- commands ------------------------------------------------------------


def _need_config(args) -> ModelConfig:
    if not args.config:
        raise UsageError("this command needs --config PATH")
    return ModelConfig.load(args.config)


def cmd_basis(args) -> Report:
    cfg = _need_config(args)
    b = cfg.qfh_spec().basis
    r = Report("basis")
    r.data["basis"] = {"statistics": b.statistics.value, "d": b.d, "n_max": b.n_max, "dim": b.dim,
                       "sector_sizes": b.sector_sizes, "sector_offsets": list(b.sector_offsets)}
    r.table("basis", ["index", "particles", *[f"n{j}" for j in range(b.d)]],
            [[i, int(b.particle_numbers[i]), *[int(v) for v in row]] for i, row in enumerate(b.occupations)])
    return r


def _hamiltonian(cfg: ModelConfig):
    if cfg.small_system is not None:
        return ham.build_pauli_fierz(cfg.pauli_fierz_spec())
    return ham.build_qfh(cfg.qfh_spec())


def cmd_spectrum(args) -> Report:
    cfg = _need_config(args)
    h = _hamiltonian(cfg)
    dec = sp.eigh(h)
    r = Report("spectrum")
    tol = 1e-9 * max(1.0, h.norm())
    r.data["dimension"] = h.dim
    r.data["eigenvalues"] = dec.eigenvalues
    r.check("eigen_residual", dec.residual, tol)
    r.table("spectrum", ["index", "eigenvalue"], [[i, float(x)] for i, x in enumerate(dec.eigenvalues)])
    if cfg.small_system is not None and "form_bound" in cfg.analysis:
        fb = cfg.analysis["form_bound"]
        rng = np.random.default_rng(args.seed)
        reps = ham.form_bound_check(cfg.pauli_fierz_spec(), fb["r"], rng, fb["samples"])
        rows = []
        for rep in reps:
            rows.append([rep.r, rep.constant, rep.corrected_constant, rep.best_constant, rep.worst_sample_ratio])
        r.data["form_bound"] = [rep.__dict__ for rep in reps]
        r.check("form_bound_constant_nonincreasing_in_r",
                max((reps[i + 1].constant - reps[i].constant for i in range(len(reps) - 1)), default=0.0), 0.0)
        r.check("form_bound_stated_constant_on_samples",
                max(rep.worst_sample_ratio / rep.constant for rep in reps), 1.0)
        # seed-independent: the optimal constant itself against C(v, r)
        r.check("form_bound_stated_constant_exact",
                max(rep.best_constant / rep.constant for rep in reps), 1.0)
        r.check("form_bound_corrected_constant",
                max(rep.best_constant - rep.corrected_constant for rep in reps), 1e-10)
        r.table("form_bound", ["r", "C", "corrected", "best", "worst_sample_ratio"], rows)
    return r


def cmd_ess(args) -> Report:
    cfg = _need_config(args)
    r = Report("ess")
    if cfg.small_system is not None:
        raise UsageError("ess works on field models without a small system")
    if cfg.analysis["fibered"]:
        fam = cfg.family
        if fam is None:
            raise ConfigError("one_particle.family", "fibered analysis needs a named family")
        vals = family_values(fam["name"], fam["mass"], fam["grid"])
        rep = sp.fibered_union([np.array([[v]]) for v in vals], fam["grid"], cfg.interaction,
                               cfg.n_max, cfg.statistics, jobs=args.jobs)
        r.data["ess"] = rep.to_dict()
        r.table("ess", ["point", "multiplicity"],
                [[float(p), int(m)] for p, m in zip(rep.result.points, rep.result.multiplicities)])
        return r
    spec = cfg.qfh_spec()
    rep = sp.hvz_essential_spectrum(spec)
    r.data["ess"] = rep.to_dict()
    r.table("ess", ["point", "multiplicity"],
            [[float(p), int(m)] for p, m in zip(rep.result.points, rep.result.multiplicities)])
    h = ham.build_qfh(spec)
    gs = sp.ground_state_report(h, rep.result)
    r.data["ground_state"] = gs.to_dict()
    if cfg.mass is not None:
        r.check("ground_state_isolated", gs.gap, 0.0, ">")
    if "probe_energy" in cfg.analysis:
        w = sp.morphism_spectrum_check(spec, cfg.analysis["probe_energy"])
        r.data["witness"] = w.to_dict()
        r.check("witness_defect", w.defect, 1e-9)
        r.check("witness_invariance", w.invariance_defect, 1e-9)
    return r


def cmd_mourre(args) -> Report:
    cfg = _need_config(args)
    if cfg.conjugate is None:
        raise ConfigError("conjugate", "section is required for mourre")
    if "mourre" not in cfg.analysis:
        raise ConfigError("analysis.mourre", "section is required for mourre")
    m = cfg.analysis["mourre"]
    eps = m["epsilon"]
    r = Report("mourre")
    if cfg.small_system is not None:
        spec = cfg.pauli_fierz_spec()
        h = ham.build_pauli_fierz(spec)
        a_big = np.kron(ops.dgamma(spec.basis, cfg.conjugate).matrix, np.eye(spec.ell))
    else:
        spec = cfg.qfh_spec()
        h = ham.build_qfh(spec)
        a_big = mo.conjugate_operator(spec.basis, cfg.conjugate).A.matrix
    w = sp.eigvals(h)
    grid = m["grid"] if m["grid"] is not None else np.linspace(w[0] - 4 * eps, w[-1] + 4 * eps, 801)
    prof = mo.rho_profile(h, a_big, grid, eps, jobs=args.jobs)
    num = mo.thresholds_numeric(prof, m["delta"])
    r.data["rho_profile"] = prof.to_dict()
    r.data["thresholds_numeric"] = num.to_dict()
    r.table("rho", ["lambda", "rho"], [[float(x), float(y)] for x, y in zip(prof.grid, prof.values)])
    r.check("virial", mo.virial_check(h, a_big), 1e-10 * max(1.0, h.norm() * float(np.linalg.norm(a_big, 2))))
    if cfg.small_system is None and spec.n_max >= 1:
        tau = mo.one_particle_thresholds(spec.h, cfg.conjugate, max(eps, 1e-3))
        levels = [sp.spectrum_of(ham.build_qfh(ham.descend(spec, spec.n_max - j))) for j in range(spec.n_max)]
        theo = mo.thresholds_cutoff(tau, levels, spec.n_max)
        r.data["tau_h"] = tau.to_dict()
        r.data["thresholds_theoretical"] = theo.to_dict()
        step = float(np.max(np.diff(grid))) if len(grid) > 1 else 0.0
        tol = eps + step
        full = theo.points.union(sp.spectrum_of(h))
        r.check("numeric_within_theory_union_point_spectrum",
                float(sum(not full.contains(x, tol) for x in num.points.points)), 0.0)
    return r


def cmd_trotter(args) -> Report:
    cfg = _need_config(args)
    if "trotter" not in cfg.analysis:
        raise ConfigError("analysis.trotter", "section is required for trotter")
    t = cfg.analysis["trotter"]
    if cfg.small_system is not None:
        spec = cfg.pauli_fierz_spec()
        h0 = ham.pf_free(spec)
        v = ham.coupled_field(spec.basis, spec.ell, spec.v)
    else:
        spec = cfg.qfh_spec()
        h0 = ops.dgamma(spec.basis, spec.h)
        v = ham.build_interaction(spec)
    rep = ham.trotter_check(h0, v, t["t"], t["schedule"])
    r = Report("trotter")
    r.data["trotter"] = {"t": rep.t, "schedule": list(rep.schedule), "errors": list(rep.errors),
                         "ratios": list(rep.ratios)}
    r.table("trotter", ["n", "error"], [[n, e] for n, e in zip(rep.schedule, rep.errors)])
    return r


def cmd_verify(args) -> Report:
    entries = run_suites(args.suites, args.seed)
    r = Report("verify")
    r.data["seed"] = args.seed
    r.data["ledger"] = [e.to_dict() for e in entries]
    r.data["passed"] = all(e.passed for e in entries)
    r.failed = not r.data["passed"]
    r.table("ledger", ["suite", "identity", "defect", "relation", "tolerance", "passed"],
            [[e.suite, e.identity, e.defect, e.relation, e.tolerance, e.passed] for e in entries])
    return r


COMMANDS = {"basis": cmd_basis, "spectrum": cmd_spectrum, "ess": cmd_ess, "mourre": cmd_mourre,
            "trotter": cmd_trotter, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fockmorph", description="Truncated Fock-space models and their spectral checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML model configuration")
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for grid sweeps")
    common.add_argument("--out", help="directory for report files (default: stdout)")
    common.add_argument("--format", choices=("structured", "tabular"), default="structured")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp_ = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp_.add_argument("suites", nargs="*", help="suite names, or 'all' (default)")
    return p


def _emit(report: Report, args):
    if args.format == "structured":
        files = {"report.json": report.structured()}
    else:
        files = {f"{k}.csv": v for k, v in report.tabular().items()}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text)
    else:
        for name, text in files.items():
            if len(files) > 1:
                sys.stdout.write(f"# {name}\n")
            sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    t0 = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (ConfigError, UsageError, UnknownSuite) as e:
        print(f"fockmorph: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"fockmorph: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    if args.timing:
        report.data["timing_seconds"] = time.perf_counter() - t0
    _emit(report, args)
    return EXIT_PROPERTY if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

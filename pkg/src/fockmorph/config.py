"""YAML model configurations.

Scalars may be numbers, rational strings such as ``"3/2"`` or ``[re, im]``
pairs. Matrices are lists of rows. Unknown keys are rejected and every
error names the offending field path.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import hamiltonians as ham
from .fock_core import Statistics


class ConfigError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


_SCHEMA: dict[str, Any] = {
    "basis": {"statistics": None, "d": None, "n_max": None},
    "one_particle": {"h": None, "family": None, "mass": None, "grid": None, "mass_check": None},
    "interaction": {"kind": None, "terms": None, "atoms": None},
    "small_system": {"ell": None, "L": None, "v": None},
    "conjugate": {"a": None},
    "analysis": {
        "ess_spectrum": None,
        "probe_energy": None,
        "fibered": None,
        "mourre": {"grid": None, "epsilon": None, "delta": None},
        "trotter": {"t": None, "schedule": None},
        "form_bound": {"r": None, "samples": None},
    },
}

FAMILIES = ("relativistic", "nonrelativistic")


def _check_keys(node: Any, schema: dict, path: str):
    if not isinstance(node, dict):
        raise ConfigError(path, "expected a mapping")
    for k, v in node.items():
        sub = f"{path}.{k}" if path else str(k)
        if k not in schema:
            raise ConfigError(sub, "unknown key")
        if isinstance(schema[k], dict) and v is not None:
            _check_keys(v, schema[k], sub)


def parse_scalar(x: Any, path: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError(path, "boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        try:
            return complex(float(Fraction(x.strip())))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(path, f"cannot read {x!r} as a number") from None
    if isinstance(x, (list, tuple)) and len(x) == 2:
        re, im = (parse_scalar(t, f"{path}[{i}]") for i, t in enumerate(x))
        if re.imag or im.imag:
            raise ConfigError(path, "complex pair entries must be real")
        return complex(re.real, im.real)
    raise ConfigError(path, f"expected a number, rational string or [re, im] pair, got {x!r}")


def parse_real(x: Any, path: str) -> float:
    z = parse_scalar(x, path)
    if z.imag:
        raise ConfigError(path, "expected a real number")
    return z.real


def parse_int(x: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(path, f"expected an integer, got {x!r}")
    if minimum is not None and x < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return x


def parse_vector(x: Any, path: str, n: int | None = None) -> np.ndarray:
    if not isinstance(x, (list, tuple)):
        raise ConfigError(path, "expected a list")
    v = np.array([parse_scalar(t, f"{path}[{i}]") for i, t in enumerate(x)], dtype=np.complex128)
    if n is not None and v.size != n:
        raise ConfigError(path, f"expected length {n}, got {v.size}")
    return v


def parse_matrix(x: Any, path: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(x, (list, tuple)) or not x:
        raise ConfigError(path, "expected a nonempty list of rows")
    rows = [parse_vector(r, f"{path}[{i}]") for i, r in enumerate(x)]
    width = {r.size for r in rows}
    if len(width) != 1:
        raise ConfigError(path, "rows have different lengths")
    m = np.vstack(rows)
    if shape is not None and m.shape != shape:
        raise ConfigError(path, f"expected shape {shape}, got {m.shape}")
    return m


def parse_grid(x: Any, path: str) -> np.ndarray:
    if isinstance(x, dict):
        for k in x:
            if k not in ("start", "stop", "num", "step"):
                raise ConfigError(f"{path}.{k}", "unknown key")
        if "start" not in x or "stop" not in x:
            raise ConfigError(path, "grid needs start and stop")
        a, b = parse_real(x["start"], f"{path}.start"), parse_real(x["stop"], f"{path}.stop")
        if "num" in x:
            return np.linspace(a, b, parse_int(x["num"], f"{path}.num", 1))
        if "step" in x:
            s = parse_real(x["step"], f"{path}.step")
            if not s > 0:
                raise ConfigError(f"{path}.step", "must be positive")
            return a + s * np.arange(int(np.floor((b - a) / s + 1e-9)) + 1)
        raise ConfigError(path, "grid needs num or step")
    return parse_vector(x, path).real


def family_values(name: str, mass: float, grid: np.ndarray) -> np.ndarray:
    if name == "relativistic":
        return np.sqrt(grid ** 2 + mass ** 2)
    if name == "nonrelativistic":
        return grid ** 2 / 2 + mass
    raise ValueError(f"unknown family {name!r}")


def _herm(m: np.ndarray, path: str):
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
        raise ConfigError(path, "matrix is not Hermitian")


@dataclass(frozen=True, eq=False)
class ModelConfig:
    raw: dict
    statistics: Statistics
    d: int
    n_max: int
    h: np.ndarray
    mass: float | None
    family: dict | None
    interaction: ham.Interaction
    small_system: dict | None
    conjugate: np.ndarray | None
    analysis: dict

    # -- construction ----------------------------------------------------
    @classmethod
    def from_dict(cls, doc: Any) -> "ModelConfig":
        if doc is None:
            raise ConfigError("", "empty configuration")
        _check_keys(doc, _SCHEMA, "")
        raw = copy.deepcopy(doc)
        b = doc.get("basis")
        if b is None:
            raise ConfigError("basis", "section is required")
        try:
            stats = Statistics.parse(b.get("statistics", "boson"))
        except ValueError as e:
            raise ConfigError("basis.statistics", str(e)) from None
        d = parse_int(b.get("d"), "basis.d", 1)
        n_max = parse_int(b.get("n_max"), "basis.n_max", 0)
        if stats is Statistics.FERMION and n_max > d:
            raise ConfigError("basis.n_max", f"fermionic cutoff {n_max} exceeds d = {d}")

        op = doc.get("one_particle")
        if op is None:
            raise ConfigError("one_particle", "section is required")
        family = None
        mass = None if op.get("mass_check") is None else parse_real(op["mass_check"], "one_particle.mass_check")
        if op.get("h") is not None:
            if op.get("family") is not None:
                raise ConfigError("one_particle", "give either h or family, not both")
            h = parse_matrix(op["h"], "one_particle.h", (d, d))
            _herm(h, "one_particle.h")
        elif op.get("family") is not None:
            name = op["family"]
            if name not in FAMILIES:
                raise ConfigError("one_particle.family", f"unknown family {name!r}; use one of {FAMILIES}")
            if op.get("mass") is None or op.get("grid") is None:
                raise ConfigError("one_particle", "family needs mass and grid")
            m = parse_real(op["mass"], "one_particle.mass")
            grid = parse_grid(op["grid"], "one_particle.grid")
            family = {"name": name, "mass": m, "grid": grid}
            vals = family_values(name, m, grid)
            fibered = bool((doc.get("analysis") or {}).get("fibered", False))
            if fibered:
                if d != 1:
                    raise ConfigError("basis.d", "fibered families use d = 1 (one fiber per grid point)")
                h = np.array([[vals[0]]], dtype=np.complex128)
            else:
                if vals.size != d:
                    raise ConfigError("one_particle.grid", f"grid has {vals.size} points, basis has d = {d}")
                h = np.diag(vals).astype(np.complex128)
        else:
            raise ConfigError("one_particle", "h or family is required")

        interaction = _parse_interaction(doc.get("interaction"), d)
        small = None
        if doc.get("small_system") is not None:
            s = doc["small_system"]
            ell = parse_int(s.get("ell"), "small_system.ell", 1)
            L = parse_matrix(s.get("L"), "small_system.L", (ell, ell))
            _herm(L, "small_system.L")
            if float(np.linalg.eigvalsh(L).min()) < -1e-12:
                raise ConfigError("small_system.L", "must be positive")
            v = parse_matrix(s.get("v"), "small_system.v", (d * ell, ell))
            if stats is not Statistics.BOSON:
                raise ConfigError("basis.statistics", "coupled small systems are bosonic only")
            small = {"ell": ell, "L": L, "v": v}
        conj = None
        if doc.get("conjugate") is not None:
            conj = parse_matrix(doc["conjugate"].get("a"), "conjugate.a", (d, d))
            _herm(conj, "conjugate.a")
        analysis = _parse_analysis(doc.get("analysis") or {})
        cfg = cls(raw, stats, d, n_max, h, mass, family, interaction, small, conj, analysis)
        cfg._validate_models()
        return cfg

    def _validate_models(self):
        try:
            if self.small_system is None:
                spec = self.qfh_spec()
                ham.build_interaction(spec)
            else:
                self.pauli_fierz_spec()
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("interaction" if "interaction" in str(e) else "one_particle", str(e)) from None

    @classmethod
    def load(cls, path: str | Path) -> "ModelConfig":
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError("", f"cannot read {path}: {e}") from None
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError("", f"invalid YAML: {e}") from None
        return cls.from_dict(doc)

    @classmethod
    def loads(cls, text: str) -> "ModelConfig":
        return cls.from_dict(yaml.safe_load(text))

    # -- models ----------------------------------------------------------
    def qfh_spec(self) -> ham.QfhSpec:
        return ham.QfhSpec(self.statistics, self.d, self.n_max, self.h, self.interaction, self.mass)

    def pauli_fierz_spec(self) -> ham.PauliFierzSpec:
        if self.small_system is None:
            raise ConfigError("small_system", "section is required for this analysis")
        s = self.small_system
        return ham.PauliFierzSpec(self.d, self.n_max, self.h, s["ell"], s["L"], s["v"], self.mass)

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        """Normalized document: every number written as a float or ``[re, im]``."""
        out: dict[str, Any] = {"basis": {"statistics": self.statistics.value, "d": self.d, "n_max": self.n_max}}
        op: dict[str, Any] = {}
        if self.family is not None:
            op.update(family=self.family["name"], mass=self.family["mass"], grid=_ser_vec(self.family["grid"]))
        else:
            op["h"] = _ser_mat(self.h)
        if self.mass is not None:
            op["mass_check"] = self.mass
        out["one_particle"] = op
        out["interaction"] = _ser_interaction(self.interaction)
        if self.small_system is not None:
            s = self.small_system
            out["small_system"] = {"ell": s["ell"], "L": _ser_mat(s["L"]), "v": _ser_mat(s["v"])}
        if self.conjugate is not None:
            out["conjugate"] = {"a": _ser_mat(self.conjugate)}
        out["analysis"] = _ser_analysis(self.analysis)
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)


def _parse_interaction(node, d: int) -> ham.Interaction:
    if node is None:
        return ham.PolynomialField(())
    kind = node.get("kind", "none")
    if kind == "none":
        if node.get("terms") or node.get("atoms"):
            raise ConfigError("interaction.kind", "kind 'none' takes no terms")
        return ham.PolynomialField(())
    if kind == "polynomial":
        terms = []
        for i, t in enumerate(node.get("terms") or []):
            p = f"interaction.terms[{i}]"
            if not isinstance(t, dict):
                raise ConfigError(p, "expected a mapping with coeff and factors")
            for k in t:
                if k not in ("coeff", "factors"):
                    raise ConfigError(f"{p}.{k}", "unknown key")
            c = parse_scalar(t.get("coeff", 1), f"{p}.coeff")
            fs = [parse_vector(u, f"{p}.factors[{j}]", d) for j, u in enumerate(t.get("factors") or [])]
            terms.append((c, fs))
        return ham.PolynomialField(tuple(terms))
    if kind == "weyl":
        atoms = []
        for i, t in enumerate(node.get("atoms") or []):
            p = f"interaction.atoms[{i}]"
            if not isinstance(t, dict):
                raise ConfigError(p, "expected a mapping with coeff and u")
            for k in t:
                if k not in ("coeff", "u"):
                    raise ConfigError(f"{p}.{k}", "unknown key")
            atoms.append((parse_scalar(t.get("coeff", 1), f"{p}.coeff"), parse_vector(t.get("u"), f"{p}.u", d)))
        return ham.WeylSum(tuple(atoms))
    raise ConfigError("interaction.kind", f"unknown kind {kind!r}; use none, polynomial or weyl")


def _parse_analysis(node: dict) -> dict:
    out: dict[str, Any] = {"ess_spectrum": bool(node.get("ess_spectrum", False)),
                           "fibered": bool(node.get("fibered", False))}
    if node.get("probe_energy") is not None:
        out["probe_energy"] = parse_real(node["probe_energy"], "analysis.probe_energy")
    if node.get("mourre") is not None:
        m = node["mourre"]
        eps = parse_real(m.get("epsilon", 1e-3), "analysis.mourre.epsilon")
        if not eps > 0:
            raise ConfigError("analysis.mourre.epsilon", "must be positive")
        out["mourre"] = {"grid": None if m.get("grid") is None else parse_grid(m["grid"], "analysis.mourre.grid"),
                         "epsilon": eps,
                         "delta": None if m.get("delta") is None else parse_real(m["delta"], "analysis.mourre.delta")}
    if node.get("trotter") is not None:
        t = node["trotter"]
        tt = parse_real(t.get("t", 1.0), "analysis.trotter.t")
        if not tt > 0:
            raise ConfigError("analysis.trotter.t", "must be positive")
        sched = t.get("schedule", [1, 2, 4, 8, 16, 32, 64])
        if not isinstance(sched, list) or not sched:
            raise ConfigError("analysis.trotter.schedule", "expected a nonempty list of step counts")
        out["trotter"] = {"t": tt, "schedule": [parse_int(n, f"analysis.trotter.schedule[{i}]", 1)
                                                for i, n in enumerate(sched)]}
    if node.get("form_bound") is not None:
        f = node["form_bound"]
        rs = f.get("r", [1, 10, 100])
        if not isinstance(rs, list) or not rs:
            raise ConfigError("analysis.form_bound.r", "expected a nonempty list")
        rr = [parse_real(r, f"analysis.form_bound.r[{i}]") for i, r in enumerate(rs)]
        if any(not r > 0 for r in rr):
            raise ConfigError("analysis.form_bound.r", "values must be positive")
        out["form_bound"] = {"r": rr, "samples": parse_int(f.get("samples", 200), "analysis.form_bound.samples", 1)}
    return out


def _ser_num(z: complex):
    z = complex(z)
    return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]


def _ser_vec(v) -> list:
    return [_ser_num(z) for z in np.asarray(v).reshape(-1)]


def _ser_mat(m) -> list:
    return [_ser_vec(r) for r in np.asarray(m)]


def _ser_interaction(inter) -> dict:
    if isinstance(inter, ham.WeylSum):
        return {"kind": "weyl", "atoms": [{"coeff": _ser_num(c), "u": _ser_vec(u)} for c, u in inter.atoms]}
    if not inter.terms:
        return {"kind": "none"}
    return {"kind": "polynomial",
            "terms": [{"coeff": _ser_num(c), "factors": [_ser_vec(u) for u in fs]} for c, fs in inter.terms]}


def _ser_analysis(a: dict) -> dict:
    out: dict[str, Any] = {"ess_spectrum": a["ess_spectrum"], "fibered": a["fibered"]}
    if "probe_energy" in a:
        out["probe_energy"] = a["probe_energy"]
    if "mourre" in a:
        m = a["mourre"]
        out["mourre"] = {"epsilon": m["epsilon"]}
        if m["grid"] is not None:
            out["mourre"]["grid"] = [float(x) for x in m["grid"]]
        if m["delta"] is not None:
            out["mourre"]["delta"] = m["delta"]
    if "trotter" in a:
        out["trotter"] = dict(a["trotter"])
    if "form_bound" in a:
        out["form_bound"] = dict(a["form_bound"])
    return out

from importlib import resources

import numpy as np
import pytest
import yaml

from fockmorph import hamiltonians as ham
from fockmorph.config import ConfigError, ModelConfig, family_values, parse_grid, parse_scalar

CONFIGS = ["free-field", "cutoff-polynomial", "pauli-fierz"]


def shipped(name):
    return resources.files("fockmorph") / "data" / "configs" / f"{name}.yaml"


@pytest.mark.parametrize("name", CONFIGS)
def test_round_trip(name):
    cfg = ModelConfig.load(shipped(name))
    again = ModelConfig.loads(cfg.dumps())
    assert again.to_dict() == cfg.to_dict()
    assert ModelConfig.loads(again.dumps()).dumps() == again.dumps()


def test_literals():
    assert parse_scalar("3/2", "x") == 1.5
    assert parse_scalar([1, "-1/4"], "x") == complex(1, -0.25)
    assert parse_scalar(2, "x") == 2
    for bad in (True, "abc", [1, 2, 3], {"a": 1}):
        with pytest.raises(ConfigError):
            parse_scalar(bad, "x")
    assert np.allclose(parse_grid({"start": 0, "stop": 1, "num": 3}, "g"), [0, 0.5, 1])
    assert np.allclose(parse_grid({"start": 0, "stop": 1, "step": 0.25}, "g"), [0, 0.25, 0.5, 0.75, 1])


def test_families():
    g = np.array([0.0, 3.0])
    assert np.allclose(family_values("relativistic", 4.0, g), [4.0, 5.0])
    assert np.allclose(family_values("nonrelativistic", 1.0, g), [1.0, 5.5])
    cfg = ModelConfig.from_dict({"basis": {"d": 2, "n_max": 2},
                                 "one_particle": {"family": "relativistic", "mass": 1, "grid": [0, 1]}})
    assert np.allclose(np.diag(cfg.h).real, [1.0, np.sqrt(2.0)])


BASE = {"basis": {"statistics": "boson", "d": 2, "n_max": 2}, "one_particle": {"h": [[1, 0], [0, 2]]}}


def with_(path, value):
    doc = yaml.safe_load(yaml.safe_dump(BASE))
    node = doc
    *head, last = path.split(".")
    for k in head:
        node = node.setdefault(k, {})
    node[last] = value
    return doc


@pytest.mark.parametrize("path,value,where", [
    ("basis.colour", 1, "basis.colour"),
    ("basis.d", 0, "basis.d"),
    ("basis.statistics", "anyon", "basis.statistics"),
    ("one_particle.h", [[1, 0], [0]], "one_particle.h"),
    ("one_particle.h", [[1, 1], [0, 1]], "one_particle.h"),
    ("one_particle.h", [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "one_particle.h"),
    ("conjugate.a", [[0, 1], [0, 0]], "conjugate.a"),
    ("interaction.kind", "cubic", "interaction.kind"),
    ("analysis.mourre", {"epsilon": -1}, "analysis.mourre.epsilon"),
    ("analysis.trotter", {"schedule": [1, 0]}, "analysis.trotter.schedule[1]"),
    ("analysis.form_bound", {"r": [1, -2]}, "analysis.form_bound.r"),
    ("small_system", {"ell": 2, "L": [[0, 0], [0, -1]], "v": [[1, 0]] * 4}, "small_system.L"),
])
def test_errors_name_the_field(path, value, where):
    with pytest.raises(ConfigError) as e:
        ModelConfig.from_dict(with_(path, value))
    assert e.value.path == where


def test_interaction_terms_and_hermiticity():
    doc = with_("interaction", {"kind": "polynomial",
                                "terms": [{"coeff": 1, "factors": [[0.3, [0, 0.2]], [0.3, [0, 0.2]]]}]})
    cfg = ModelConfig.from_dict(doc)
    assert isinstance(cfg.interaction, ham.PolynomialField) and cfg.interaction.degree == 2
    bad = with_("interaction", {"kind": "polynomial", "terms": [{"coeff": [0, 1], "factors": [[1, 0], [1, 0]]}]})
    with pytest.raises(ConfigError):
        ModelConfig.from_dict(bad)
    extra = with_("interaction", {"kind": "polynomial", "terms": [{"coef": 1}]})
    with pytest.raises(ConfigError) as e:
        ModelConfig.from_dict(extra)
    assert e.value.path == "interaction.terms[0].coef"


def test_missing_and_unreadable(tmp_path):
    with pytest.raises(ConfigError):
        ModelConfig.from_dict(None)
    with pytest.raises(ConfigError):
        ModelConfig.from_dict({"basis": {"d": 1, "n_max": 1}})
    with pytest.raises(ConfigError):
        ModelConfig.load(tmp_path / "missing.yaml")
    p = tmp_path / "bad.yaml"
    p.write_text("basis: [unclosed")
    with pytest.raises(ConfigError):
        ModelConfig.load(p)

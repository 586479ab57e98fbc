"""Shared fixtures: small reference systems and scenario-file helpers."""

import json

import numpy as np
import pytest

from gchs import PhasePoint, StructuredSystem, parse_field


@pytest.fixture
def oscillator():
    """Classical harmonic oscillator: H = (q^2 + p^2)/2, no structure."""
    return StructuredSystem(1, parse_field("(q1^2 + p1^2) / 2", 1),
                            parse_field("0", 1))


@pytest.fixture
def structured():
    """The oscillator Hamiltonian with structural function s = q1."""
    return StructuredSystem(1, parse_field("(q1^2 + p1^2) / 2", 1),
                            parse_field("q1", 1))


@pytest.fixture
def pt12():
    """The reference point (q, p) = (1, 2), i.e. z = 1 + 2i."""
    return PhasePoint(np.array([1.0]), np.array([2.0]))


BASE_SCENARIO = {
    "n": 1,
    "hamiltonian": "(q1^2 + p1^2) / 2",
    "structural": "q1",
    "initial": {"q": [0.5], "p": [0.5]},
    "stepper": {"method": "rk4", "step": 1e-3, "t_end": 2.0},
}


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario JSON file into tmp_path and return its path.

    Keyword overrides replace top-level fields; a value of None removes
    the field entirely.
    """

    def _write(name="scenario.json", **overrides):
        doc = json.loads(json.dumps(BASE_SCENARIO))
        for key, value in overrides.items():
            if value is None:
                doc.pop(key, None)
            else:
                doc[key] = value
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2))
        return path

    return _write

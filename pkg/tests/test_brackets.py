"""Bracket operations: canonical values, structure terms, algebraic laws."""

import numpy as np
import pytest

from gchs import (PhasePoint, RealnessError, StructuredSystem, geobracket,
                  geometrio, gspb, parse_field, pb_complex, pb_real,
                  structural_derivative)

Q1 = parse_field("q1", 1)
P1 = parse_field("p1", 1)
Z1 = parse_field("z1", 1)
ZB1 = parse_field("conj(z1)", 1)
H_OSC = parse_field("(q1^2 + p1^2) / 2", 1)


# ---------------------------------------------------------------------------
# canonical Poisson bracket


def test_canonical_pairs(pt12):
    assert pb_complex(Q1, P1, pt12) == pytest.approx(1.0, abs=1e-15)
    assert pb_complex(Z1, ZB1, pt12) == pytest.approx(-2.0j, abs=1e-15)
    assert pb_complex(Z1, Z1, pt12) == pytest.approx(0.0, abs=1e-15)
    assert pb_complex(Q1, H_OSC, pt12) == pytest.approx(2.0, abs=1e-15)
    assert pb_complex(P1, H_OSC, pt12) == pytest.approx(-1.0, abs=1e-15)


def test_pb_real_equals_pb_complex(pt12):
    for f, g in [(Q1, P1), (Z1, ZB1), (Q1, H_OSC), (Z1, H_OSC)]:
        assert pb_real(f, g, pt12) == pytest.approx(pb_complex(f, g, pt12),
                                                    abs=1e-12)


def test_pb_independent_degrees():
    pt = PhasePoint([1.0, 2.0], [3.0, 4.0])
    q1 = parse_field("q1", 2)
    p2 = parse_field("p2", 2)
    assert pb_complex(q1, p2, pt) == pytest.approx(0.0, abs=1e-15)


def test_antisymmetry_random_fields():
    rng = np.random.default_rng(5)
    f = parse_field("q1^2 * p1 + sin(p1)", 1)
    g = parse_field("exp(0.3 * q1) - p1^3", 1)
    for _ in range(20):
        pt = PhasePoint(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        assert pb_complex(f, g, pt) == pytest.approx(-pb_complex(g, f, pt),
                                                     abs=1e-12)


# ---------------------------------------------------------------------------
# structured system construction


def test_system_rejects_complex_structural():
    with pytest.raises(RealnessError, match="real"):
        StructuredSystem(1, H_OSC, parse_field("i * q1", 1))


def test_system_rejects_z_in_hamiltonian():
    with pytest.raises(RealnessError, match="Hamiltonian"):
        StructuredSystem(1, parse_field("z1", 1), Q1)


def test_system_rejects_conj_anywhere():
    with pytest.raises(RealnessError):
        StructuredSystem(1, H_OSC, parse_field("conj(q1)", 1))


def test_system_rejects_mismatched_arity():
    with pytest.raises(ValueError):
        StructuredSystem(2, parse_field("q1", 2), parse_field("q1", 1))


# ---------------------------------------------------------------------------
# structural terms at the reference point (s = q1, z = 1 + 2i)


def test_structural_derivative_reference(structured, pt12):
    d = structural_derivative(Z1, structured, pt12)
    assert d.dz[0] == pytest.approx(1.5 + 1.0j, abs=1e-15)
    assert d.dzbar[0] == pytest.approx(0.5 + 1.0j, abs=1e-15)


def test_geobracket_reference(structured, pt12):
    assert geobracket(Z1, ZB1, structured, pt12) == pytest.approx(-2.0j,
                                                                  abs=1e-14)


def test_gspb_reference(structured, pt12):
    assert gspb(Z1, ZB1, structured, pt12) == pytest.approx(-4.0j, abs=1e-14)


def test_geometrio_reference(structured, pt12):
    with_z, with_zbar = geometrio(structured, pt12)
    assert with_z[0] == pytest.approx(1.0j, abs=1e-15)
    assert with_zbar[0] == pytest.approx(-1.0j, abs=1e-15)


def test_gspb_coordinate_formula(structured):
    # gspb{z, zbar} = -2i (1 + z s_z + zbar s_zbar) for any point
    rng = np.random.default_rng(3)
    for _ in range(20):
        pt = PhasePoint(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        z = complex(pt.q[0], pt.p[0])
        want = -2j * (1.0 + z * 0.5 + np.conj(z) * 0.5)  # s = q1
        assert gspb(Z1, ZB1, structured, pt) == pytest.approx(want, abs=1e-12)


def test_gspb_reduces_to_pb_without_structure(oscillator, pt12):
    f = parse_field("q1 * p1^2", 1)
    assert gspb(f, H_OSC, oscillator, pt12) == pb_complex(f, H_OSC, pt12)
    assert geobracket(f, H_OSC, oscillator, pt12) == 0.0


def test_gspb_antisymmetry(structured):
    rng = np.random.default_rng(9)
    f = parse_field("z1^2 - i * p1", 1)
    g = parse_field("cos(q1) + z1 * conj(z1)", 1)
    for _ in range(20):
        pt = PhasePoint(rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1))
        assert gspb(f, g, structured, pt) == pytest.approx(
            -gspb(g, f, structured, pt), abs=1e-12)


def test_gspb_self_bracket_vanishes(structured, pt12):
    f = parse_field("sin(q1) + p1^2", 1)
    assert gspb(f, f, structured, pt12) == pytest.approx(0.0, abs=1e-12)

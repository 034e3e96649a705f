import math

import numpy as np
import pytest

import floqspin as fs


def rhombic(e_over_d=0.1, bs=(0.0, 0.0, 0.0)):
    return fs.StaticParams(D=5.0, E=5.0 * e_over_d, Bs=np.array(bs))


def test_static_spectrum():
    energies, states = fs.solve_static(rhombic())
    np.testing.assert_allclose(energies, [-10 / 3, 7 / 6, 13 / 6], rtol=1e-12)
    np.testing.assert_allclose(states.conj().T @ states, np.eye(3), atol=1e-12)


def test_spin_operators_commutator():
    sx, sy, sz = fs.spin_operators(1.5)
    np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-12)


def test_polarization_catalog():
    assert len(fs.polarization_names()) == 15
    assert len(fs.linear_polarization_names()) == 9
    cos, sin = fs.polarization("(xy)+")
    np.testing.assert_allclose(np.cross(cos, sin), [0, 0, 1])
    with pytest.raises(ValueError):
        fs.polarization("(ab)+")


def test_zero_drive_levels_match_static():
    p = rhombic()
    lv = fs.levels(p, "x", 0.0)
    np.testing.assert_allclose(lv["energies"], fs.solve_static(p)[0], atol=1e-9)


def test_linear_drive_keeps_clock_transition():
    lv = fs.levels(rhombic(), "+x+z", 100.0, step=5.0)
    assert max(np.linalg.norm(g) for g in lv["gradients"]) < 1e-8


def test_axial_drive_effective_hamiltonian_is_static():
    p = rhombic(0.0)
    h = fs.effective_hamiltonian(p, "z", 150.0, time_steps=50)
    np.testing.assert_allclose(h["matrix"], fs.static_hamiltonian(p), atol=1e-10)
    np.testing.assert_allclose(h["zeeman_field"], 0.0, atol=1e-10)


def test_vanvleck_circular_first_order_field():
    r = fs.vanvleck(rhombic(0.0), "(xy)+", 100.0)
    expected = -fs.MU_B * 2.0 * 100.0**2 / (2 * 20.0)
    assert math.isclose(r["first_order_field"][2], expected, rel_tol=1e-12)


def test_track_shapes_and_fold():
    tr = fs.track(rhombic(), "y", [0.0, 10.0, 20.0], gradients=True)
    assert len(tr["energies"]) == 3 and len(tr["gradients"][2]) == 3
    assert fs.fold(25.0, 20.0) == pytest.approx(5.0)


def test_cancel_rejects_non_spin_one():
    p = fs.StaticParams(spin=1.5)
    with pytest.raises(ValueError):
        fs.cancel(p, "x", 10.0)

import math

import numpy as np
import pytest

import fslab


def test_version():
    assert fslab.__version__ == "0.1.0"


def test_annihilation_entries():
    b = fslab.annihilation(3)
    assert b.shape == (4, 4)
    np.testing.assert_allclose(np.diag(b, 1), np.sqrt([1, 2, 3]))


def test_coherent_state_is_poissonian():
    amps = fslab.coherent_state(0.5, 30)
    expected = [math.exp(-0.125) * 0.5**n / math.sqrt(math.factorial(n)) for n in range(31)]
    np.testing.assert_allclose(amps, expected, atol=1e-14)


def test_truncation_error():
    with pytest.raises(fslab.TruncationError):
        fslab.coherent_state(3.0, 20)
    assert issubclass(fslab.TruncationError, fslab.NumericalError)


def test_ssh_edge_state():
    h = fslab.build_ssh(-1.0, -2.0, 40)
    s = fslab.diagonalize(h)
    assert s["gap_window"] is not None
    (k,) = s["edge_states"]
    assert abs(s["eigenvalues"][k]) < 1e-10
    fit = fslab.fit_geometric(s["eigenvectors"][:, k])
    assert abs(abs(fit["A"]["ratio"]) - 0.5) < 1e-8


def test_driven_edge_energy():
    h = fslab.add_drives(fslab.build_ssh(-1.0, -2.0, 60), -0.5, 0.0)
    s = fslab.diagonalize(h)
    (k,) = s["edge_states"]
    assert s["eigenvalues"][k].real == pytest.approx(fslab.predicted_edge_energy(-1.0, -2.0, -0.5))


def test_gap_closure():
    with pytest.raises(fslab.GapClosureError):
        fslab.winding_number(1.0, 1.0)
    assert fslab.winding_number(1.0, 2.0) == 1
    assert fslab.winding_number(2.0, 1.0) == 0


def test_dark_state():
    n_max = 30
    h = fslab.build_driven_jc(1.0, 0.5, n_max)
    jumps = fslab.atom_decay_jumps(n_max + 1, 1.0)
    psi = np.zeros(2 * (n_max + 1), dtype=complex)
    psi[0::2] = fslab.coherent_state(-0.5, n_max)
    report = fslab.dark_state_check(h.matrix, jumps, psi)
    assert report["dark"]
    rho = fslab.steady_state(h.matrix, jumps)
    assert fslab.trace_distance(rho, np.outer(psi, psi.conj())) < 1e-8


def test_lindblad_coherent_decay():
    n_cells = 16
    h = fslab.cavity_number(n_cells)
    jumps = [fslab.photon_loss_jump(n_cells, 0.2)]
    psi = np.zeros(2 * n_cells, dtype=complex)
    psi[0::2] = fslab.coherent_state(1.0, n_cells - 1)
    run = fslab.lindblad_evolve(h, jumps, np.outer(psi, psi.conj()), [0.0, 1.0])
    assert run["trace"][-1] == pytest.approx(1.0, abs=1e-9)
    assert run["purity"][-1] == pytest.approx(1.0, abs=1e-8)
    schmidt = fslab.sublattice_schmidt(psi, n_cells)
    assert schmidt["schmidt_values"][1] < 1e-12


def test_trajectories_deterministic():
    n_cells = 8
    h = fslab.cavity_number(n_cells)
    jumps = [fslab.photon_loss_jump(n_cells, 0.5)]
    psi = np.zeros(2 * n_cells, dtype=complex)
    psi[2] = 1.0
    a = fslab.trajectory_average(h, jumps, psi, [0.0, 1.0], seed=3, n_trajectories=50, threads=1)
    b = fslab.trajectory_average(h, jumps, psi, [0.0, 1.0], seed=3, n_trajectories=50, threads=2)
    np.testing.assert_array_equal(a["states"][-1], b["states"][-1])

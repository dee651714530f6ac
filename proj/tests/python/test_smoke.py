import math

import numpy as np
import pytest

qcmps = pytest.importorskip("qcmps")


def test_parse_and_dense():
    h = qcmps.parse_hamiltonian('{"n_qubits": 1, "terms": [{"coeff": [1, 0], "ops": "Z0"}]}')
    assert h.n_qubits == 1
    assert h.hermitian
    m = qcmps.dense_matrix(h)
    assert np.allclose(m, np.diag([1.0, -1.0]))


def test_exact_diagonalize():
    h = qcmps.PauliSum(1)
    h.add(1.0 + 0.0j, "Z0")
    spectrum = qcmps.exact_diagonalize(h)
    assert abs(spectrum["ground_energy"] - (-1.0)) < 1e-12


def test_block_unitary_is_unitary():
    spec = qcmps.AnsatzSpec(1, 2, 1)
    assert spec.n_params == 2 * 1 * 1 * 15
    params = qcmps.random_params(spec, 3)
    u = qcmps.block_unitary(spec, 0, params)
    assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-12


def test_expectation_matches_hadamard_test():
    spec = qcmps.AnsatzSpec(1, 2, 1)
    params = qcmps.random_params(spec, 11)
    h = qcmps.PauliSum(2)
    h.add(1.0 + 0.0j, "Z0 X1")
    exact = qcmps.expectation(spec, params, h)
    via_test = qcmps.hadamard_test_expectation(spec, params, "Z0 X1", "real")
    assert abs(exact.real - via_test) < 1e-10


def test_synthesize_tc_isospectral():
    h = qcmps.PauliSum(2)
    h.add(-1.0 + 0.0j, "Z0 Z1")
    h.add(-1.0 + 0.0j, "X0")
    tc = qcmps.synthesize_tc(h, [0.2, 0.2])
    assert not tc.hermitian
    ev_h = sorted(e.real for e in qcmps.exact_diagonalize(h)["eigenvalues"])
    ev_tc = sorted(e.real for e in qcmps.exact_diagonalize(tc)["eigenvalues"])
    assert max(abs(a - b) for a, b in zip(ev_h, ev_tc)) < 1e-8


def test_run_varqite_toy():
    spec = qcmps.AnsatzSpec(1, 1, 1)
    h = qcmps.PauliSum(1)
    h.add(1.0 + 0.0j, "Z0")
    theta0 = qcmps.random_params(spec, 0)
    result = qcmps.run_varqite(spec, h, theta0, max_iters=200, deterministic=True)
    assert result["energy_re"][-1] == pytest.approx(-1.0, abs=1e-5)

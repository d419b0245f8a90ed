"""Finite-lattice oracle: assembly, eigensolvers, agreement reports."""

import math

import numpy as np
import pytest

import belowband as bb
from belowband.lattice import parity_of


def test_chain_l1_free_matrix():
    ham = bb.build_hamiltonian(1, 1, 0.0, 0.0)
    np.testing.assert_array_equal(
        ham.matrix.toarray(),
        [[1.0, -0.5, 0.0], [-0.5, 1.0, -0.5], [0.0, -0.5, 1.0]])
    spec = bb.lowest_eigenvalues(ham, 3)
    expected = [1.0 - math.sqrt(2.0) / 2.0, 1.0, 1.0 + math.sqrt(2.0) / 2.0]
    assert np.allclose(spec.eigenvalues, expected, atol=1e-12)


def test_square_lattice_center_impurity_matrix():
    ham = bb.build_hamiltonian(2, 1, 0.0, 1.0)
    dense = ham.matrix.toarray()
    assert dense.shape == (9, 9)
    diag = np.diag(dense)
    assert diag[4] == 1.0  # center site: 2 - mu
    assert np.all(np.delete(diag, 4) == 2.0)
    assert np.array_equal(dense, dense.T)
    # each site couples to its in-box neighbors with -1/2
    assert dense[4, 1] == dense[4, 3] == dense[4, 5] == dense[4, 7] == -0.5


def test_neighbor_coupling_on_diagonal():
    ham = bb.build_hamiltonian(1, 2, 3.0, 0.5)
    diag = np.diag(ham.matrix.toarray())
    np.testing.assert_allclose(diag, [1.0, -0.5, 0.5, -0.5, 1.0])


def test_free_case_nonnegative_and_band_bottom():
    lows = []
    for L in (10, 20, 40):
        spec = bb.lowest_eigenvalues(bb.build_hamiltonian(1, L, 0.0, 0.0), 1)
        lows.append(spec.eigenvalues[0])
        assert spec.eigenvalues[0] >= 0.0
    assert lows[0] > lows[1] > lows[2]
    assert lows[-1] < 1e-2


def test_dense_and_iterative_paths_agree():
    ham = bb.build_hamiltonian(2, 35, 0.0, 3.0)  # dim 5041 > dense limit
    assert ham.dim > 4000
    it = bb.lowest_eigenvalues(ham, 3)
    dense = np.linalg.eigvalsh(ham.matrix.toarray())[:3]
    assert np.allclose(it.eigenvalues, dense, atol=1e-8)


def test_size_budget_and_validation():
    with pytest.raises(ValueError):
        bb.build_hamiltonian(3, 100, 0.0, 0.0)  # 201^3 over budget
    with pytest.raises(ValueError):
        bb.build_hamiltonian(1, 0, 0.0, 0.0)
    ham = bb.build_hamiltonian(1, 3, 0.0, 0.0)
    with pytest.raises(ValueError):
        bb.lowest_eigenvalues(ham, 0)


def test_parity_attribution():
    ham = bb.build_hamiltonian(1, 30, 2.0, 0.0)
    spec, vecs = bb.lowest_eigenvalues(ham, 2, return_vectors=True)
    # ground state of the neighbor-impurity chain is even, first excited odd
    assert parity_of(ham, vecs[:, 0]) == "even"
    assert parity_of(ham, vecs[:, 1]) == "odd"


def test_compare_chain_ground_state():
    rep = bb.compare(bb.ModelParams(1, 0.0, 1.0), [50, 100, 200])
    assert rep.counts_agree and rep.predicted_count == 1
    errs = [rep.matched_errors[L][0] for L in (50, 100, 200)]
    assert all(e <= 1e-6 for e in errs)
    assert rep.predicted[0] == pytest.approx(1.0 - math.sqrt(2.0), abs=1e-10)


def test_compare_square_lattice_single_state():
    rep = bb.compare(bb.ModelParams(2, 0.0, 3.0), [10, 20, 30])
    assert rep.counts_agree and rep.predicted_count == 1
    errs = [max(rep.matched_errors[L]) for L in (10, 20, 30)]
    assert errs[0] >= errs[-1]  # monotone improvement along the ladder


def test_compare_monotone_improvement_weakly_bound():
    # shallower state: the exponential ladder convergence is visible
    rep = bb.compare(bb.ModelParams(2, 0.0, 1.0), [10, 16, 24])
    assert rep.counts_agree and rep.predicted_count == 1
    errs = [rep.matched_errors[L][0] for L in (10, 16, 24)]
    assert errs[0] > errs[1] > errs[2]


def test_chain_odd_state_at_large_box():
    # lam = 2: two bound states below -1e-3, the odd one at exactly -1/4
    spec = bb.lowest_eigenvalues(bb.build_hamiltonian(1, 500, 2.0, 0.0), 3)
    assert spec.count_below(-1e-3) == 2
    assert min(abs(e + 0.25) for e in spec.eigenvalues) <= 1e-6


def test_compare_free_case_empty():
    rep = bb.compare(bb.ModelParams(2, 0.0, 0.0), [6, 10])
    assert rep.predicted_count == 0
    assert all(c == 0 for c in rep.oracle_counts.values())


def test_compare_requires_negative_theta():
    with pytest.raises(ValueError):
        bb.compare(bb.ModelParams(1, 0.0, 1.0), [10], theta=0.0)

import numpy as np
import pytest

from coverpovm.povm import (
    PauliGroupSpec,
    StateVector,
    candidate_fiducials,
    default_factors,
    gram_analysis,
    pauli_group,
    pauli_orbit,
    permutation_matrix,
    povm_scan,
    stabilizer_test,
)

W6 = np.exp(2j * np.pi / 6)


def test_default_factors():
    assert default_factors(2) == (2,)
    assert default_factors(4) == (2, 2)
    assert default_factors(6) == (2, 3)
    assert default_factors(12) == (2, 2, 3)


def test_pauli_group_sizes_and_unitarity():
    for dims in ((2,), (3,), (2, 2), (2, 3)):
        ops = pauli_group(PauliGroupSpec(dims))
        d = int(np.prod(dims))
        assert len(ops) == d * d
        assert ops[0].exponents == tuple((0, 0) for _ in dims)  # identity first
        for op in ops:
            assert np.allclose(op.matrix @ op.matrix.conj().T, np.eye(d), atol=1e-12)


def test_qubit_paulis_match_xz():
    ops = {op.exponents[0]: op.matrix for op in pauli_group(PauliGroupSpec((2,)))}
    assert np.allclose(ops[(0, 0)], np.eye(2))
    assert np.allclose(ops[(1, 0)], np.array([[0, 1], [1, 0]]))
    assert np.allclose(ops[(0, 1)], np.diag([1, -1]))


def test_permutation_matrix():
    assert np.allclose(permutation_matrix((0, 1, 2)), np.eye(3))
    assert np.allclose(permutation_matrix((1, 0)), np.array([[0, 1], [1, 0]]))
    m = permutation_matrix((1, 2, 0))
    ev = sorted(np.round(np.angle(np.linalg.eigvals(m)) / (2 * np.pi / 3)).astype(int) % 3)
    assert ev == [0, 1, 2]
    assert np.allclose(m @ m.T, np.eye(3))


def test_spec_validation():
    with pytest.raises(ValueError):
        PauliGroupSpec((1, 2))
    with pytest.raises(ValueError):
        PauliGroupSpec.for_dimension(6, (2, 2))


def test_stabilizer_test():
    assert stabilizer_test(StateVector.from_amplitudes([1, 0]), PauliGroupSpec((2,)))
    assert stabilizer_test(StateVector.from_amplitudes([1, 1]), PauliGroupSpec((2,)))
    assert not stabilizer_test(StateVector.from_amplitudes([0, 1, -1]),
                               PauliGroupSpec((3,)))


def test_orbit_identities():
    spec = PauliGroupSpec((3,))
    psi = StateVector.from_amplitudes([0, 1, -1])
    orbit = pauli_orbit(psi, spec)
    assert len(orbit) == 9
    total = sum(orbit)
    assert np.allclose(total, 3 * np.eye(3), atol=1e-9)
    for proj in orbit:
        assert np.allclose(proj, proj.conj().T, atol=1e-9)
        assert np.allclose(proj @ proj, proj, atol=1e-9)
        assert abs(np.trace(proj) - 1) < 1e-9
    distinct = {tuple(np.round(p, 8).ravel()) for p in orbit}
    assert len(distinct) == 9


def test_orbit_sum_random_fiducials():
    rng = np.random.default_rng(11)
    for dims in ((2,), (3,), (2, 2)):
        d = int(np.prod(dims))
        amps = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi = StateVector.from_amplitudes(amps)
        total = sum(pauli_orbit(psi, PauliGroupSpec(dims)))
        assert np.allclose(total, d * np.eye(d), atol=1e-9)


def test_qubit_zero_state_orbit_rank():
    spec = PauliGroupSpec((2,))
    psi = StateVector.from_amplitudes([1, 0])
    orbit = pauli_orbit(psi, spec)
    distinct = {tuple(np.round(p, 8).ravel()) for p in orbit}
    assert len(distinct) == 2
    report = gram_analysis(orbit, psi)
    assert report.gram_rank == 2 and not report.is_ic


def test_hesse_sic_exact():
    spec = PauliGroupSpec((3,))
    psi = StateVector.from_amplitudes([0, 1, -1])
    orbit = pauli_orbit(psi, spec)
    report = gram_analysis(orbit, psi)
    assert report.gram_rank == 9
    assert report.pp == 1 and report.is_sic and report.is_equiangular and report.is_ic
    # exact-arithmetic spot check: Gram entries are 1 and 1/4
    stack = np.asarray(orbit)
    gram = np.einsum("aij,bji->ab", stack, stack).real
    off = gram[~np.eye(9, dtype=bool)]
    assert np.all(np.abs(off - 0.25) < 1e-12)
    assert np.all(np.abs(np.diag(gram) - 1.0) < 1e-12)


def test_two_qubit_ic_fiducial():
    spec = PauliGroupSpec((2, 2))
    psi = StateVector.from_amplitudes([0, 1, -W6, W6 - 1])
    report = gram_analysis(pauli_orbit(psi, spec), psi)
    assert report.gram_rank == 16 and report.is_ic and not report.is_sic


def test_rank_invariant_under_global_phase():
    spec = PauliGroupSpec((2, 2))
    amps = np.array([0, 1, -W6, W6 - 1]) / np.sqrt(3)
    r1 = gram_analysis(pauli_orbit(StateVector.from_amplitudes(amps), spec))
    r2 = gram_analysis(pauli_orbit(StateVector.from_amplitudes(np.exp(0.7j) * amps), spec))
    assert r1.gram_rank == r2.gram_rank == 16


def test_candidates_trefoil_s3(trefoil_records6):
    rec = [r for r in trefoil_records6 if r.index == 3 and r.covering_type == "irr"][0]
    cands = candidate_fiducials(rec.rep)
    assert _contains_permuted(cands.states, [0, 1, -1])


def _contains_permuted(states, pattern):
    import itertools

    pattern = np.asarray(pattern, dtype=complex)
    for perm in itertools.permutations(range(len(pattern))):
        v = pattern[list(perm)]
        sv = StateVector.from_amplitudes(v)
        if any(s.matches(sv.amplitudes) for s in states):
            return True
    return False


def test_candidates_fig8_a4(fig8_records5):
    rec = [r for r in fig8_records5 if r.index == 4 and r.covering_type == "irr"][0]
    cands = candidate_fiducials(rec.rep, spec=PauliGroupSpec((2, 2)))
    assert _contains_permuted(cands.states, [0, 1, -W6, W6 - 1])


def test_candidates_degree_one():
    from coverpovm.todd_coxeter import PermutationRep

    rep = PermutationRep(1, ((0,),))
    cands = candidate_fiducials(rep, spec=None)
    assert cands.states == [] and cands.stabilizer_states == []


def test_candidates_are_eigenvectors(fig8_records5):
    from coverpovm.povm import _image_elements

    rec = [r for r in fig8_records5 if r.index == 4 and r.covering_type == "irr"][0]
    cands = candidate_fiducials(rec.rep, spec=PauliGroupSpec((2, 2)))
    elements, _ = _image_elements(rec.rep, 20000)
    mats = [permutation_matrix(p) for p in elements]
    for s in cands.states:
        v = s.amplitudes
        ok = False
        for m in mats:
            w = m @ v
            lam = np.vdot(v, w)
            if abs(abs(lam) - 1) < 1e-9 and np.allclose(w, lam * v, atol=1e-9):
                ok = True
                break
        assert ok


def test_candidate_dedup_deterministic(trefoil_records6):
    rec = [r for r in trefoil_records6 if r.index == 3 and r.covering_type == "irr"][0]
    a = candidate_fiducials(rec.rep)
    b = candidate_fiducials(rec.rep)
    assert [s.key() for s in a.states] == [s.key() for s in b.states]
    keys = [s.key() for s in a.states]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_povm_scan_trefoil_sic(trefoil_records6):
    rec = [r for r in trefoil_records6 if r.index == 3 and r.covering_type == "irr"][0]
    res = povm_scan(rec)
    assert res.best.gram_rank == 9 and res.best.is_sic
    chain = res.best
    assert chain.is_sic and chain.is_equiangular and chain.pp == 1


def test_povm_scan_element_cap(fig8_records5):
    rec = [r for r in fig8_records5 if r.index == 5 and r.covering_type == "irr"][0]
    res = povm_scan(rec, PauliGroupSpec((5,)), element_cap=3)
    assert res.element_cap_hit is True


def test_povm_scan_degree_mismatch(trefoil_records6):
    rec = [r for r in trefoil_records6 if r.index == 3][0]
    with pytest.raises(ValueError):
        povm_scan(rec, PauliGroupSpec((2, 2)))


def test_stabilizer_fallback_reports(fig8_records5):
    rec = [r for r in fig8_records5 if r.index == 2][0]
    res = povm_scan(rec)
    assert res.best is not None
    assert res.best.from_stabilizer
    assert res.best.gram_rank == 2


def test_report_json_roundtrip(trefoil_records6):
    rec = [r for r in trefoil_records6 if r.index == 3 and r.covering_type == "irr"][0]
    blob = povm_scan(rec).best.to_json()
    assert blob["gram_rank"] == 9 and blob["is_sic"] is True

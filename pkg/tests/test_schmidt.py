import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schmidt_thermo.evolution import propagate, propagators
from schmidt_thermo.model import builtin_model, random_system
from schmidt_thermo.numerics import expm_hermitian_prop, unitarity_error
from schmidt_thermo.schmidt import (DegeneracyWarning, GaugeAlignmentError, SchmidtFrame, align_trajectory,
                                    effective_rank, schmidt_decompose, schmidt_trajectory)

T_STAR = np.pi / (2 * np.sqrt(1.25))
RABI_NODE = np.pi / np.sqrt(1.25)


def test_product_and_bell_states():
    f = schmidt_decompose(np.kron([0, 1], [1, 0]), (2, 2))
    assert np.allclose(f.s, [1, 0]) and f.M == 1
    f = schmidt_decompose(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))
    assert np.allclose(f.s, [1 / np.sqrt(2)] * 2) and f.M == 2


def test_rabi_maximum():
    psi = propagators(builtin_model("TQ1"), np.array([T_STAR]))[0] @ np.kron([1, 0], [1, 0])
    assert np.allclose(schmidt_decompose(psi, (2, 2)).s ** 2, [0.8, 0.2], atol=1e-12)


def test_effective_rank_examples():
    assert effective_rank([1, 0]) == 1
    assert effective_rank([np.sqrt(0.8), np.sqrt(0.2)]) == 2
    assert effective_rank([np.sqrt(1 - 5e-13), np.sqrt(5e-13)]) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_decomposition_invariants(n1, n2, seed):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(n1 * n2) + 1j * rng.standard_normal(n1 * n2)
    psi /= np.linalg.norm(psi)
    f = schmidt_decompose(psi, (n1, n2))
    assert np.all(f.s >= 0) and abs(np.sum(f.s**2) - 1) < 1e-10
    assert unitarity_error(f.basis1) < 1e-9 and unitarity_error(f.basis2) < 1e-9
    assert np.max(np.abs(f.state() - psi)) < 1e-8
    assert f.M == effective_rank(f.s)


def test_rabi_oracle_along_trajectory(tq1):
    st_ = tq1.st
    assert np.max(np.abs(st_.s[:, 1] ** 2 - 0.2 * np.sin(np.sqrt(1.25) * st_.times) ** 2)) < 1e-8


def test_tq1_bases_stay_computational(tq1):
    # the dynamics never leave span{|00>, |11>}, so the aligned bases are diagonal
    for B in (tq1.st.B1, tq1.st.B2):
        off = np.abs(B[:, 0, 1]) + np.abs(B[:, 1, 0])
        assert np.max(off) < 1e-12


def test_reconstruction_along_trajectory(qutrit1):
    st_ = qutrit1.st
    r = st_.s.shape[1]
    psi = np.einsum("kl,kal,kbl->kab", st_.s, st_.B1[:, :, :r], st_.B2[:, :, :r]).reshape(len(st_), -1)
    assert np.max(np.abs(psi - qutrit1.traj.states)) < 1e-10


def test_continuity_gauge(qutrit1):
    st_ = qutrit1.st
    ov = np.einsum("kal,kal->kl", st_.B1[:-1].conj(), st_.B1[1:])
    strong = st_.s[1:] > 1e-6
    r = st_.s.shape[1]
    assert np.all(ov[:, :r].real[strong] > 0)
    assert st_.diagnostics()["min_consecutive_overlap"] > 0.999


def test_first_frame_anchored_to_initial_states(tq1):
    spec = tq1.spec
    assert np.allclose(tq1.st.B1[0][:, 0], spec.phi1_0)
    assert np.allclose(tq1.st.B2[0][:, 0], spec.phi2_0)


def test_tq1_breaks(tq1):
    d = tq1.st.diagnostics()
    assert d["degeneracy_flags"] == 0
    assert d["rank_transitions"] == pytest.approx([0.001])
    assert d["coefficient_nodes"] == pytest.approx([RABI_NODE * m for m in (1, 2, 3)], abs=2e-3)
    assert d["rank_range"] == [1, 2]


def test_qutrit_and_jc_breaks(qutrit1, jc):
    d = qutrit1.st.diagnostics()
    assert d["coefficient_nodes"] == pytest.approx([2.893, 5.785, 8.677], abs=2e-3)
    assert d["degeneracy_flags"] == 0
    d = jc.st.diagnostics()
    assert d["coefficient_nodes"] == [] and d["degeneracy_flags"] == 0


def test_valid_mask_excludes_break_stencils(tq1):
    st_ = tq1.st
    v1, v2 = st_.valid(1), st_.valid(2)
    assert not v1[0] and not v1[-1] and not v2[1]
    assert not v1[1]  # straddles the rank transition at the first step
    node = int(np.argmax(st_.breaks[1:])) + 1  # first node step, between frames node and node+1
    assert not v1[node] and not v1[node + 1]
    assert v1[node - 1] and v1[node + 2]
    assert np.all(v2 <= v1)


def test_alignment_is_idempotent(qutrit1):
    st_ = qutrit1.st
    frames = st_.frames[:500]
    again = align_trajectory(frames, anchor=(qutrit1.spec.phi1_0, qutrit1.spec.phi2_0))
    assert np.allclose(again.B1, st_.B1[:500], atol=1e-13)
    assert np.allclose(again.B2, st_.B2[:500], atol=1e-13)


def test_decoupled_bases_follow_free_evolution():
    spec = random_system(3, 2, lam=0.0, seed=8)
    traj = propagate(spec, 1.0, 1e-2)
    st_ = schmidt_trajectory(traj)
    for k in (10, 100):
        u = expm_hermitian_prop(spec.H1, traj.times[k])
        ov = np.vdot(u @ spec.phi1_0, st_.B1[k][:, 0])
        assert abs(abs(ov) - 1) < 1e-10


def test_ambiguous_assignment_is_flagged():
    # equal coefficients leave the SVD free to rotate the bases: a 45 degree turn of
    # a Bell state's bases (U on one side, U* on the other) gives tied overlaps
    s = np.full(2, 1 / np.sqrt(2))
    rot = np.array([[1, -1], [1, 1]]) / np.sqrt(2)
    frames = [SchmidtFrame(0.0, s, np.eye(2, dtype=complex), np.eye(2, dtype=complex), 2),
              SchmidtFrame(0.1, s, rot.astype(complex), rot.astype(complex), 2),
              SchmidtFrame(0.2, s, rot.astype(complex), rot.astype(complex), 2)]
    assert np.allclose(frames[1].state(), frames[0].state())
    with pytest.warns(DegeneracyWarning):
        st_ = align_trajectory(frames)
    assert st_.diagnostics()["degeneracy_flags"] == 1
    assert not st_.valid(1)[1]
    assert np.allclose(st_.frames[1].state(), frames[0].state())


def test_alignment_failure_advises_smaller_dt():
    # a DFT basis overlaps every previous vector with modulus 1/sqrt(5) < 0.5
    n = 5
    s = np.full(n, 1 / np.sqrt(n))
    dft = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    eye = np.eye(n, dtype=complex)
    frames = [SchmidtFrame(0.0, s, eye, eye, n), SchmidtFrame(0.1, s, dft, dft.conj(), n)]
    with pytest.raises(GaugeAlignmentError, match="reduce dt"):
        align_trajectory(frames)

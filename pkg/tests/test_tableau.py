import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_change_of_variables, random_tableau
from qlnc.oracle import DenseState, equal_up_to_global_phase
from qlnc.tableau import (
    PLUS,
    ZERO,
    ExpansionTooLarge,
    OutcomeSource,
    OutcomesExhausted,
    ParityTableau,
    new_tableau,
)

NONE = OutcomeSource.forced([])


def amps(t, order=None):
    return t.expand_amplitudes(order=order).amps


def test_new_tableau_plus_zero():
    t = new_tableau(2, [PLUS, ZERO])
    assert t.N == 1
    assert t.C.tolist() == [[1, 0, 0], [0, 1, 0]]
    assert t.p.tolist() == [0, 0]


def test_new_tableau_three_plus_rows_independent():
    t = new_tableau(2, [PLUS] * 3)
    assert t.N == 3
    assert np.array_equal(t.C[1:, 1:], np.eye(3, dtype=int))


def test_new_tableau_qutrit_plus_expansion():
    assert np.allclose(amps(new_tableau(3, [PLUS])), np.full(3, 1 / np.sqrt(3)))


def test_x_on_zero_gives_one():
    t = new_tableau(2, [ZERO])
    t.apply_x(1)
    assert np.allclose(amps(t), [0, 1])


def test_x_shifts_formula_constant():
    t = new_tableau(2, [PLUS])
    t.apply_x(1)
    assert t.C[:, 1].tolist() == [1, 1]


def test_qutrit_x_squared_on_one():
    t = new_tableau(3, [ZERO])
    t.apply_x(1)
    t.apply_x(1, 2)
    assert np.allclose(amps(t), [1, 0, 0])


def test_z_on_constant_leaves_phase():
    t = new_tableau(2, [ZERO])
    t.apply_z(1)
    assert not t.p.any()


def test_z_on_indeterminate_sets_phase():
    t = new_tableau(2, [PLUS])
    t.apply_z(1)
    assert t.p.tolist() == [0, 1]
    t.apply_z(1)
    assert t.p.tolist() == [0, 0]


def test_cnot_adds_formulas():
    t = new_tableau(2, [PLUS, PLUS])
    t.apply_cnot(1, 2)
    assert t.formula(2).tolist() == [0, 1, 1]


def test_cnot_basis_states():
    t = new_tableau(2, [ZERO, ZERO])
    t.apply_x(1)
    t.apply_cnot(1, 2)
    assert np.allclose(amps(t), [0, 0, 0, 1])


def test_qutrit_add_two_plus_two():
    t = new_tableau(3, [ZERO, ZERO])
    t.apply_x(1, 2)
    t.apply_x(2, 2)
    t.apply_cnot(1, 2)
    want = np.zeros(9)
    want[2 * 3 + 1] = 1
    assert np.allclose(amps(t), want)


def bell(d=2):
    t = new_tableau(d, [PLUS, ZERO])
    t.apply_cnot(1, 2)
    return t


def test_measure_x_private_plus_is_deterministic():
    t = new_tableau(2, [PLUS])
    assert t.measure_x(1, NONE) == 0
    assert t.N == 1


def test_measure_x_qutrit_outcome_sign():
    # Z|+> on a qutrit is the X eigenvector with eigenvalue w^2 (the w^-1 one)
    t = new_tableau(3, [PLUS])
    t.apply_z(1)
    assert t.measure_x(1, NONE) == 2


def test_measure_x_on_bell_disentangles():
    t = bell()
    s = t.measure_x(1, OutcomeSource.forced([0]))
    assert s == 0 and t.N == 2
    assert np.allclose(amps(t), np.full(4, 0.5))


def test_measure_x_on_zero_with_outcome_one_gives_minus():
    t = new_tableau(2, [ZERO])
    assert t.measure_x(1, OutcomeSource.forced([1])) == 1
    assert t.N == 1 and t.p.tolist() == [0, 1]
    assert equal_up_to_global_phase(t.expand_amplitudes(), DenseState(2, [1], [1 / np.sqrt(2), -1 / np.sqrt(2)]))


def test_measure_x_twice_second_is_deterministic():
    t = bell(3)
    src = OutcomeSource.forced([2])
    s1 = t.measure_x(1, src)
    s2 = t.measure_x(1, src)
    assert s1 == s2 == 2 and len(src.drawn) == 1


def test_measure_z_deterministic_zero():
    assert new_tableau(2, [ZERO]).measure_z(1, NONE) == 0


def test_measure_z_bell_collapses_both():
    t = bell()
    assert t.measure_z(1, OutcomeSource.forced([1])) == 1
    assert t.N == 0
    assert t.C[0, 1:].tolist() == [1, 1]


def test_measure_z_destructive_product():
    t = new_tableau(2, [ZERO, PLUS])
    t.measure_z_destructive(1, NONE)
    assert t.labels == [2] and t.N == 1


def test_measure_z_destructive_bell_half():
    t = bell()
    t.measure_z_destructive(1, OutcomeSource.forced([0]))
    assert t.labels == [2] and t.C.tolist() == [[1, 0]]


def test_measure_z_destructive_ghz_middle():
    t = new_tableau(2, [PLUS, ZERO, ZERO])
    t.apply_cnot(1, 2)
    t.apply_cnot(1, 3)
    t.measure_z_destructive(2, OutcomeSource.forced([1]))
    assert t.labels == [1, 3] and t.C.tolist() == [[1, 1, 1]]


def test_forced_outcomes_exhausted():
    with pytest.raises(OutcomesExhausted) as exc:
        bell().measure_z(1, OutcomeSource.forced({}), record="y")
    assert exc.value.record == "y"


def test_forced_mapping_keys_by_record():
    t = bell()
    assert t.measure_z(2, OutcomeSource.forced({"y": 1}), record="y") == 1


def test_find_phase_correction_examples():
    assert new_tableau(2, [PLUS, ZERO]).find_phase_correction() == {}
    t = new_tableau(2, [PLUS])
    t.apply_z(1)
    assert t.find_phase_correction() == {1: 1}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_find_phase_correction_clears_phases(seed, d):
    t = random_tableau(seed, d)
    for q, e in t.find_phase_correction().items():
        t.apply_z(q, e)
    t._reduce()
    assert not t.p[1:].any()


def test_terminate_middle_of_chain_gives_bell():
    for s in range(2):
        t = new_tableau(2, [PLUS, ZERO, ZERO])
        t.apply_cnot(1, 2)
        t.apply_cnot(2, 3)
        rec = t.terminate(2, OutcomeSource.forced([s]), remove=True)
        assert rec.outcome == s
        assert t.same_state(ParityTableau(2, np.array([[1, 0, 0], [0, 1, 1]]), np.zeros(2, dtype=int), [1, 3]))


def test_terminate_product_plus_is_noop():
    t = new_tableau(2, [PLUS, PLUS])
    before = t.copy()
    rec = t.terminate(1, NONE)
    assert rec.outcome == 0 and rec.deterministic and t.same_state(before)


def test_canonicalize_fixed_point():
    t = new_tableau(3, [PLUS, ZERO, PLUS])
    assert t.canonicalize() == t.canonicalize().canonicalize()
    assert t.canonicalize().same_state(t)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_canonical_form_ignores_change_of_variables(seed, qseed, d):
    t = random_tableau(seed, d)
    u = random_change_of_variables(t, qseed)
    assert u.canonical_key() == t.canonical_key()
    assert equal_up_to_global_phase(t.expand_amplitudes(), u.expand_amplitudes())


def test_expand_bell_and_minus_bell():
    t = bell()
    assert np.allclose(amps(t), [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])
    t.apply_z(1)
    assert np.allclose(amps(t), [1 / np.sqrt(2), 0, 0, -1 / np.sqrt(2)])


def test_expansion_cap():
    with pytest.raises(ExpansionTooLarge):
        new_tableau(2, [PLUS] * 5).expand_amplitudes(cap=16)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_operations_keep_invariants(seed, d):
    t = random_tableau(seed, d)
    t.check_invariants()
    assert t.C.shape[0] == t.N + 1


def test_json_round_trip():
    t = random_tableau(7, 3)
    assert ParityTableau.from_json(t.to_json()) == t


def test_reset_entangled_qubit_refused():
    with pytest.raises(ValueError):
        bell().reset(1)


def test_single_qubit_measured_away_leaves_valid_tableau():
    t = new_tableau(2, [PLUS])
    t.measure_z_destructive(1, OutcomeSource.forced([1]))
    assert t.n == 0 and t.N == 0
    t.check_invariants()

"""System conditioning, cuts, and conditional independence."""

import numpy as np
import pytest

from monophi import core as co
from monophi import systems as sy
from monophi.errors import UnsupportedOperationError, ValidationError
from monophi.indexing import flatten_index

from conftest import fixture_system, random_stochastic

S2 = co.classical_space((2, 2))


def _system(table):
    return sy.System(S2, co.Process(S2, S2, np.asarray(table, dtype=float)))


def swap_system():
    table = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            table[a + 2 * b, b + 2 * a] = 1.0
    return _system(table)


def test_rejects_non_causal_evolution():
    bad = np.full((4, 4), 0.2)
    with pytest.raises(ValidationError):
        _system(bad)


def test_restrict_state_basics(rng):
    payload = rng.random(4)
    s = co.State(S2, payload / payload.sum())
    assert np.array_equal(co.restrict_state(s, (0, 1)).payload, s.payload)
    p = rng.random(2); p /= p.sum()
    q = rng.random(2); q /= q.sum()
    product = co.tensor_states(co.State(co.classical_space((2,)), p),
                               co.State(co.classical_space((2,)), q))
    assert np.allclose(co.restrict_state(product, (0,)).payload, p)
    correlated = co.State(S2, np.array([0.5, 0.0, 0.0, 0.5]))
    assert np.allclose(co.restrict_state(correlated, (1,)).payload, [0.5, 0.5])
    # nested restriction agrees with direct restriction
    space3 = co.classical_space((2, 2, 2))
    w = rng.random(8)
    state3 = co.State(space3, w / w.sum())
    via_pair = co.restrict_state(co.restrict_state(state3, (0, 2)), (0,))
    assert np.allclose(via_pair.payload, co.restrict_state(state3, (0,)).payload, atol=1e-12)


def test_subsystem_of_product_dynamics(rng):
    t1 = random_stochastic(rng, 2, 2)
    t2 = random_stochastic(rng, 2, 2)
    system = _system(np.kron(t2, t1))
    s = co.mixed(S2)
    sub = sy.subsystem(system, s, (0,))
    assert np.allclose(sub.evolution.payload, t1, atol=1e-12)
    assert sy.subsystem(system, s, (0, 1)).evolution.payload == pytest.approx(
        system.evolution.payload)


def test_subsystem_conditional_table():
    # A' = AND(A,B), B' = OR(A,B); freeze B = 0 and keep A
    table = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            table[a + 2 * b, (a & b) + 2 * (a | b)] = 1.0
    system = _system(table)
    s = co.point_state(S2, flatten_index((1, 0), (2, 2)))
    sub = sy.subsystem(system, s, (0,))
    # with B = 0: AND = 0 regardless of A
    assert np.allclose(sub.evolution.payload, [[1.0, 0.0], [1.0, 0.0]])
    assert co.is_causal(sub.evolution)
    assert len(sub.decompositions) == 2


def test_subsystem_evolution_always_causal(rng):
    for _ in range(10):
        system = _system(random_stochastic(rng, 4, 4))
        w = rng.random(4)
        s = co.State(S2, w / w.sum())
        for keep in [(0,), (1,), (0, 1)]:
            assert co.is_causal(sy.subsystem(system, s, keep).evolution)
    space3 = co.classical_space((2, 2, 2))
    from monophi.indexing import subset_masks

    for _ in range(5):
        system = sy.System(space3, co.Process(space3, space3, random_stochastic(rng, 8, 8)))
        w = rng.random(8)
        s = co.State(space3, w / w.sum())
        for keep in subset_masks(3):
            if keep:
                assert co.is_causal(sy.subsystem(system, s, keep).evolution)


def test_symmetric_cut_product_unchanged():
    t1 = np.array([[0.75, 0.25], [0.5, 0.5]])
    t2 = np.array([[1.0, 0.0], [0.25, 0.75]])
    system = _system(np.kron(t2, t1))
    cut = sy.symmetric_cut(system, (0,))
    assert np.array_equal(cut.evolution.payload, system.evolution.payload)


def test_symmetric_cut_complement_identical():
    system, _, _ = fixture_system("and_or_2")
    a = sy.symmetric_cut(system, (0,))
    b = sy.symmetric_cut(system, (1,))
    assert np.array_equal(a.evolution.payload, b.evolution.payload)


def test_symmetric_cut_constant_dynamics():
    # outputs fixed to delta_(1,0) regardless of input
    table = np.zeros((4, 4))
    table[:, 1] = 1.0
    system = _system(table)
    cut = sy.symmetric_cut(system, (0,))
    assert np.allclose(cut.evolution.payload, table)


def test_symmetric_cut_swap_becomes_noise():
    cut = sy.symmetric_cut(swap_system(), (0,))
    assert np.allclose(cut.evolution.payload, np.full((4, 4), 0.25))
    with pytest.raises(ValidationError):
        sy.symmetric_cut(swap_system(), ())
    with pytest.raises(ValidationError):
        sy.symmetric_cut(swap_system(), (0, 1))


def test_conditional_independence():
    assert sy.is_conditionally_independent(swap_system())
    correlated = np.zeros((4, 4))
    correlated[:, 0] = 0.5
    correlated[:, 3] = 0.5
    assert not sy.is_conditionally_independent(_system(correlated))
    system, _, _ = fixture_system("noisy_chain_3")
    assert sy.is_conditionally_independent(system, tol=1e-12)


def test_directional_cut_semantics():
    # bit 1 copies bit 0; bit 0 keeps itself
    table = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            table[a + 2 * b, a + 2 * a] = 1.0
    system = _system(table)
    cut = sy.directional_cut(system, (0,))
    assert np.allclose(sy.element_channel(cut, 0).payload,
                       np.array([[1, 0], [0, 1], [1, 0], [0, 1]], dtype=float))
    assert np.allclose(sy.element_channel(cut, 1).payload, np.full((4, 2), 0.5))
    assert co.is_causal(cut.evolution)
    assert sy.is_conditionally_independent(cut)
    # trivial parts leave a conditionally independent evolution unchanged
    assert np.allclose(sy.directional_cut(system, (0, 1)).evolution.payload, table, atol=1e-12)
    assert np.allclose(sy.directional_cut(system, ()).evolution.payload, table, atol=1e-12)


def test_directional_cut_guards():
    correlated = np.zeros((4, 4))
    correlated[:, 0] = 0.5
    correlated[:, 3] = 0.5
    with pytest.raises(ValidationError):
        sy.directional_cut(_system(correlated), (0,))
    q = co.quantum_space((2, 2))
    from monophi import quantum as qu

    qsys = sy.System(q, co.Process(q, q, qu.identity_choi(4)))
    with pytest.raises(UnsupportedOperationError):
        sy.directional_cut(qsys, (0,))


def test_double_directional_cut_noises_both_directions():
    system, _, rows = fixture_system("noisy_copy_2")
    once = sy.directional_cut(system, (0,))
    twice = sy.directional_cut(once, (1,))
    # expected: every element keeps its channel with the *other* bit's input noised
    expected = np.ones((4, 1))
    dims = (2, 2)
    for i in range(2):
        ti = sy.element_channel(system, i).payload
        axes = ti.reshape(dims + (2,), order="F")
        avg = axes.mean(axis=1 - i, keepdims=True)
        noised = np.broadcast_to(avg, axes.shape).reshape(4, 2, order="F")
        expected = np.einsum("sx,st->stx", expected, noised).reshape(4, -1)
    assert np.allclose(twice.evolution.payload, expected, atol=1e-12)


def test_quantum_subsystem_and_cut(rng):
    from monophi import quantum as qu

    q = co.quantum_space((2, 2))
    table = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            table[a + 2 * b, b + 2 * a] = 1.0
    qsys = sy.System(q, co.Process(q, q, qu.embed_table(table)))
    cut = sy.symmetric_cut(qsys, (0,))
    classical_cut = sy.symmetric_cut(swap_system(), (0,))
    assert np.allclose(cut.evolution.payload,
                       qu.embed_table(classical_cut.evolution.payload), atol=1e-12)
    state = co.State(q, qu.embed_distribution(np.array([0.1, 0.2, 0.3, 0.4])))
    sub = sy.subsystem(qsys, state, (1,))
    assert co.is_causal(sub.evolution)

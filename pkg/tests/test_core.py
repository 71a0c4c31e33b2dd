"""Process algebra axioms shared by both backends."""

import numpy as np
import pytest

from monophi import core as co
from monophi.errors import CompositionError, ValidationError

from conftest import random_channel_choi, random_density, random_stochastic

BACKENDS = [co.CLASSICAL, co.QUANTUM]


def _random_process(rng, backend, d_in, d_out):
    dom = co.Space(backend, (d_in,))
    cod = co.Space(backend, (d_out,))
    if backend == co.CLASSICAL:
        return co.Process(dom, cod, random_stochastic(rng, d_in, d_out))
    return co.Process(dom, cod, random_channel_choi(rng, d_in, d_out))


@pytest.mark.parametrize("backend", BACKENDS)
def test_identity_neutral(rng, backend):
    f = _random_process(rng, backend, 3, 2)
    assert np.allclose(co.compose(co.identity(f.dom), f).payload, f.payload, atol=1e-12)
    assert np.allclose(co.compose(f, co.identity(f.cod)).payload, f.payload, atol=1e-12)


def test_compose_matches_matrix_product(rng):
    f = _random_process(rng, co.CLASSICAL, 2, 2)
    g = _random_process(rng, co.CLASSICAL, 2, 2)
    assert np.allclose(co.compose(f, g).payload, f.payload @ g.payload)


def test_bit_identity_then_not():
    bit = co.classical_space((2,))
    ident = co.Process(bit, bit, np.eye(2))
    negate = co.Process(bit, bit, np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.array_equal(co.compose(ident, negate).payload, negate.payload)


def test_compose_rejects_mismatch(rng):
    f = _random_process(rng, co.CLASSICAL, 2, 3)
    g = _random_process(rng, co.CLASSICAL, 2, 2)
    with pytest.raises(CompositionError):
        co.compose(f, g)


@pytest.mark.parametrize("backend", BACKENDS)
def test_tensor_unit_is_neutral(rng, backend):
    f = _random_process(rng, backend, 2, 3)
    unit_id = co.identity(co.unit_space(backend))
    assert np.allclose(co.tensor(f, unit_id).payload, f.payload, atol=1e-12)


def test_scalar_tensor_multiplies():
    assert (co.Scalar(0.5) * co.Scalar(0.25)).value == 0.125
    with pytest.raises(ValidationError):
        co.Scalar(-1.0)


def test_classical_tensor_product_formula(rng):
    f = _random_process(rng, co.CLASSICAL, 2, 2)
    g = _random_process(rng, co.CLASSICAL, 2, 2)
    ft = co.tensor(f, g).payload
    for a in range(2):
        for c in range(2):
            for b in range(2):
                for d in range(2):
                    assert ft[a + 2 * c, b + 2 * d] == pytest.approx(
                        f.payload[a, b] * g.payload[c, d], abs=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_interchange_law(rng, backend):
    for _ in range(20):
        dims = rng.integers(1, 4, size=6)
        f = _random_process(rng, backend, dims[0], dims[1])
        h = _random_process(rng, backend, dims[1], dims[2])
        g = _random_process(rng, backend, dims[3], dims[4])
        k = _random_process(rng, backend, dims[4], dims[5])
        lhs = co.compose(co.tensor(f, g), co.tensor(h, k))
        rhs = co.tensor(co.compose(f, h), co.compose(g, k))
        assert np.allclose(lhs.payload, rhs.payload, atol=1e-10)


@pytest.mark.parametrize("backend", BACKENDS)
def test_discard_and_mixed_axioms(rng, backend):
    for _ in range(20):
        fa = tuple(int(x) for x in rng.integers(1, 4, size=rng.integers(1, 3)))
        fb = tuple(int(x) for x in rng.integers(1, 4, size=rng.integers(1, 3)))
        a, b = co.Space(backend, fa), co.Space(backend, fb)
        ab = co.tensor_space(a, b)
        assert np.allclose(co.discard(ab).payload,
                           co.tensor(co.discard(a), co.discard(b)).payload, atol=1e-12)
        assert np.allclose(co.mixed(ab).payload,
                           co.tensor_states(co.mixed(a), co.mixed(b)).payload, atol=1e-12)
        unit_scalar = co.apply(co.discard(a), co.mixed(a))
        assert co.mass(unit_scalar) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(co.discard(co.unit_space(backend)).payload,
                       co.identity(co.unit_space(backend)).payload)


def test_mixed_values():
    four = co.classical_space((4,))
    assert np.array_equal(co.mixed(four).payload, np.full(4, 0.25))
    qubit = co.quantum_space((2,))
    assert np.array_equal(co.mixed(qubit).payload, np.eye(2) / 2)


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_process_absorbs(rng, backend):
    f = _random_process(rng, backend, 2, 2)
    z = co.zero_process(f.dom, f.cod)
    assert not np.any(co.compose(f, z).payload)
    assert not np.any(co.tensor(f, z).payload)


def test_causality_checks(rng):
    bit = co.classical_space((2,))
    f = co.Process(bit, bit, np.array([[0.3, 0.7], [1.0, 0.0]]))
    assert co.is_causal(f)
    assert not co.is_causal(co.zero_process(bit, bit))
    qubit = co.quantum_space((2,))
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    from monophi import quantum as qu

    channel = co.Process(qubit, qubit, qu.unitary_channel(u))
    assert co.is_causal(channel)
    assert co.is_cocausal(channel)


def test_dagger_laws(rng):
    bit = co.classical_space((2,))
    f = co.Process(bit, bit, np.array([[0.3, 0.7], [1.0, 0.0]]))
    assert np.array_equal(co.dagger(f).payload, np.array([[0.3, 1.0], [0.7, 0.0]]))
    assert np.array_equal(co.dagger(co.dagger(f)).payload, f.payload)
    g = _random_process(rng, co.CLASSICAL, 2, 2)
    assert np.array_equal(co.dagger(co.compose(f, g)).payload,
                          co.compose(co.dagger(g), co.dagger(f)).payload)
    # quantum: involution and the adjoint defining property
    q = _random_process(rng, co.QUANTUM, 3, 2)
    qd = co.dagger(q)
    assert np.allclose(co.dagger(qd).payload, q.payload, atol=1e-12)
    from monophi import quantum as qu

    for _ in range(10):
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        y = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        lhs = np.trace(qu.apply_choi(q.payload, x, 3, 2).conj().T @ y)
        rhs = np.trace(x.conj().T @ qu.apply_choi(qd.payload, y, 2, 3))
        assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("backend", BACKENDS)
def test_swap_is_involutive(rng, backend):
    a = co.Space(backend, (2, 3))
    b = co.Space(backend, (2,))
    roundtrip = co.compose(co.swap(a, b), co.swap(b, a))
    assert np.allclose(roundtrip.payload, co.identity(co.tensor_space(a, b)).payload,
                       atol=1e-12)


def test_distance_basics():
    two_bits = co.classical_space((2, 2))
    u = co.mixed(two_bits)
    assert co.distance(u, u) == 0.0
    assert co.distance(u, co.zero_state(two_bits)) == pytest.approx(1.0, abs=1e-12)
    # Hamming ground metric: opposite corners sit at distance 2
    assert co.distance(co.point_state(two_bits, 0),
                       co.point_state(two_bits, 3)) == pytest.approx(2.0, abs=1e-12)
    # point ground metric on a bare pair of labels
    pair = co.classical_space((2,))
    assert co.distance(co.point_state(pair, 0),
                       co.point_state(pair, 1)) == pytest.approx(1.0, abs=1e-12)
    qubit = co.quantum_space((2,))
    assert co.distance(co.point_state(qubit, 0),
                       co.point_state(qubit, 1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(CompositionError):
        co.distance(co.point_state(pair, 0), co.point_state(qubit, 0))


def test_restrict_state_matches_compositional_form(rng):
    from monophi.decompositions import split

    for backend in BACKENDS:
        space = co.Space(backend, (2, 3, 2))
        if backend == co.CLASSICAL:
            payload = rng.random(12)
            state = co.State(space, payload / payload.sum())
        else:
            state = co.State(space, random_density(rng, 12))
        for keep in [(0,), (1,), (2,), (0, 2), (1, 2), (0, 1, 2), ()]:
            d = split(space, keep)
            expected = co.apply(
                co.compose(d.iso, co.tensor(co.identity(d.left_space),
                                            co.discard(d.right_space))), state)
            got = co.restrict_state(state, keep)
            assert np.allclose(got.payload, expected.payload, atol=1e-12)
            assert co.is_causal_state(got)

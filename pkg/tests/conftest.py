import json
import os

import numpy as np
import pytest

from monophi import core as co
from monophi import systems as sy

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

FIXTURES_N2 = ["copy_swap_2", "and_or_2", "xor_feedback_2",
               "product_2", "noisy_copy_2", "const_uniform_2"]
FIXTURES_N3 = ["copy_cycle_3", "and_or_xor_3", "majority_3", "noisy_chain_3"]
ALL_FIXTURES = FIXTURES_N2 + FIXTURES_N3


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURE_DIR, f"{name}.json")


def load_fixture(name: str) -> dict:
    with open(fixture_path(name), "r", encoding="utf-8") as fh:
        return json.load(fh)


def fixture_system(name: str, metric: str = "table"):
    """The fixture as a (system, sizes, rows) triple with the chosen metric."""
    raw = load_fixture(name)
    sizes = tuple(e["size"] for e in raw["elements"])
    rows = np.array(raw["dynamics"], dtype=float)
    if metric == "point":
        dim = int(np.prod(sizes))
        space = co.Space(co.CLASSICAL, sizes, 1.0 - np.eye(dim))
    else:
        space = co.classical_space(sizes)
    return sy.System(space, co.Process(space, space, rows)), sizes, rows


def basis_states(space: co.Space):
    for idx in range(space.dim):
        yield idx, co.point_state(space, idx)


def random_stochastic(rng, d_in: int, d_out: int) -> np.ndarray:
    table = rng.random((d_in, d_out))
    return table / table.sum(axis=1, keepdims=True)


def random_channel_choi(rng, d_in: int, d_out: int) -> np.ndarray:
    from monophi import quantum as qu

    n_kraus = d_in * d_out + 1
    ops = [rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
           for _ in range(n_kraus)]
    gram = sum(k.conj().T @ k for k in ops)
    whiten = np.linalg.inv(np.linalg.cholesky(gram).conj().T)
    return qu.kraus_to_choi([k @ whiten for k in ops])


def random_density(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_metric(rng, dim: int) -> np.ndarray:
    m = rng.random((dim, dim))
    m = m + m.T
    np.fill_diagonal(m, 0.0)
    for k in range(dim):  # metric completion via shortest paths
        m = np.minimum(m, m[:, [k]] + m[[k], :])
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)

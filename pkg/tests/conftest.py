import numpy as np
import pytest

from qvoterlab.graphs import build
from qvoterlab.scenarios import generate_scenario, preset


@pytest.fixture(scope="session")
def fortress_clan_net():
    return generate_scenario(preset("fortress-clan"), np.random.default_rng(5))


@pytest.fixture(scope="session")
def small_duplex():
    """Two layers over 6 nodes: a path and a cycle."""
    layer0 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
    layer1 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]
    return build(6, [layer0, layer1])


def random_multiplex(n, n_layers, edge_prob, rng):
    """Erdos-Renyi layers; test helper."""
    layers = []
    for _ in range(n_layers):
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if rng.random() < edge_prob]
        layers.append(edges)
    return build(n, layers)

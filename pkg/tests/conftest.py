import numpy as np
import pytest

from wcluster import GaussianMeasure, MeasureCollection


def random_orthogonal(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def random_spd(rng, d, eig_low=0.3, eig_high=3.0):
    q = random_orthogonal(rng, d)
    eigs = rng.uniform(eig_low, eig_high, size=d)
    return (q * eigs) @ q.T


def random_measure(rng, d, mean_scale=2.0, eig_low=0.3, eig_high=3.0):
    return GaussianMeasure(
        rng.normal(0.0, mean_scale, size=d), random_spd(rng, d, eig_low, eig_high)
    )


def random_collection(rng, n, d, **kwargs):
    return MeasureCollection(tuple(random_measure(rng, d, **kwargs) for _ in range(n)))


def commuting_spd_pair(rng, d, eig_low=0.3, eig_high=3.0):
    """Two SPD matrices sharing an eigenbasis, plus their eigenvalues."""
    q = random_orthogonal(rng, d)
    a = rng.uniform(eig_low, eig_high, size=d)
    b = rng.uniform(eig_low, eig_high, size=d)
    return (q * a) @ q.T, (q * b) @ q.T, a, b


@pytest.fixture
def rng():
    return np.random.default_rng(20240511)

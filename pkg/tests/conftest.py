import numpy as np
import pytest

from limitlab.bulk import BulkParams, ElasticParams
from limitlab.coefficients import ViscosityParams
from limitlab.grid import PeriodicGrid, SpectralContext
from limitlab.params import MaterialParams


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def grid32():
    return PeriodicGrid(32, 32)


@pytest.fixture(scope="session")
def ctx32(grid32):
    return SpectralContext(grid32)


@pytest.fixture
def bulk111():
    return BulkParams(1.0, 1.0, 1.0)


@pytest.fixture
def elastic_general():
    return ElasticParams(L1=1.0, L2=0.3, L3=0.2)


@pytest.fixture
def visc_demo():
    return ViscosityParams(beta1=1.0, beta4=2.0, beta5=0.5, beta6=2.5,
                           beta7=1.0, mu1=2.0, mu2=2.0, J=0.1)


@pytest.fixture
def material_demo(bulk111, elastic_general, visc_demo):
    return MaterialParams(bulk=bulk111, elastic=elastic_general,
                          visc=visc_demo, eps=0.5)


def smooth_director(grid, amp=0.2):
    x, y = grid.meshgrid()
    n = np.stack([np.ones_like(x), amp * np.sin(x), amp * np.cos(y)])
    return n / np.sqrt(np.einsum('i...,i...->...', n, n))


def smooth_velocity(ctx, amp=0.1):
    x, y = ctx.grid.meshgrid()
    v = amp * np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y),
                        0.3 * np.sin(x + y)])
    return ctx.leray_project(v)

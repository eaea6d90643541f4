import warnings
from types import SimpleNamespace

import numpy as np
import pytest

from slipopt import (assemble_operators, assemble_rigid_system, build_grid,
                     build_gait_system, chiral_helical_shape, sphere,
                     tilted_dumbbell)


def _pipeline(shape, p, mode="general"):
    grid = build_grid(shape, p)
    operators = assemble_operators(grid)
    with warnings.catch_warnings():
        # moderate-p grids on deformed shapes trip the (informational)
        # net-flux compatibility warning; accuracy is asserted explicitly
        warnings.simplefilter("ignore")
        rigid = assemble_rigid_system(grid, operators)
        system = build_gait_system(grid, operators, rigid, mode=mode)
    return SimpleNamespace(shape=shape, grid=grid, operators=operators,
                           rigid=rigid, system=system)


@pytest.fixture(scope="session")
def sphere_pipeline():
    return _pipeline(sphere(), 8, mode="general")


@pytest.fixture(scope="session")
def dumbbell_pipeline():
    return _pipeline(tilted_dumbbell(), 8)


@pytest.fixture(scope="session")
def chiral_pipeline():
    return _pipeline(chiral_helical_shape(), 8)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


def random_spd_z(rng, scale=1.0):
    """Random SPD 6x6 mobility-like matrix for algebra-only tests."""
    M = rng.normal(size=(6, 6))
    return scale * (M @ M.T + 0.5 * np.eye(6))

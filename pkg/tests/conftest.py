import numpy as np
import pytest

from dtnlab import Potential, assemble, boundary_flux, build_grid, euclidean_metric, solve_eigensystem
from dtnlab.lab.families import random_smooth

ALEPH = 5.0


def make_op(grid, q=None, metric=None):
    metric = metric or euclidean_metric(grid)
    values = np.zeros(grid.n_nodes) if q is None else np.broadcast_to(q, grid.n_nodes)
    return assemble(grid, metric, Potential(values, ALEPH))


def make_data(op, order=None):
    return boundary_flux(op, solve_eigensystem(op, order=order))


def smooth_q(grid, seed, amplitude=ALEPH):
    return random_smooth(grid, seed, amplitude)


def bump(grid, center, width, amplitude):
    x = grid.coordinates()
    return amplitude * np.exp(-np.sum((x - np.asarray(center)) ** 2, axis=1) / (2 * width**2))


def fd_eigenvalues_1d(n, length=1.0):
    h = length / (n - 1)
    m = np.arange(1, n - 1)
    return 4 / h**2 * np.sin(m * np.pi * h / (2 * length)) ** 2


def fd_eigenvalues_square(n):
    e = fd_eigenvalues_1d(n)
    return np.sort((e[:, None] + e[None, :]).ravel())


@pytest.fixture(scope="session")
def square17():
    return build_grid(2, [1.0, 1.0], [17, 17])


@pytest.fixture(scope="session")
def rect17():
    return build_grid(2, [1.0, 1.37], [17, 17])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

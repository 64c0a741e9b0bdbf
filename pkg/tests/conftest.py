import numpy as np
import pytest

from solitonforge.algebra import from_brackets


@pytest.fixture
def heis3():
    return from_brackets("heisenberg3", 3, {(1, 2): {3: 1.0}})


@pytest.fixture
def heis5():
    return from_brackets("heisenberg5", 5, {(1, 2): {5: 1.0}, (3, 4): {5: 1.0}})


@pytest.fixture
def solv2():
    return from_brackets("solv2", 2, {(1, 2): {2: 1.0}})


@pytest.fixture
def abelian3():
    return from_brackets("abelian_3", 3, {})


@pytest.fixture
def so3():
    # compact simple algebra: [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
    return from_brackets("so3", 3, {(1, 2): {3: 1.0}, (2, 3): {1: 1.0}, (1, 3): {2: -1.0}})


def shear_derivation(u: float) -> np.ndarray:
    """Non-normal derivation of heisenberg3: block identity plus a central shear."""
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0 * u, 0.0, 2.0]])


def shear_for_defect(delta: float) -> float:
    """Shear parameter u whose derivation has normality defect exactly delta.

    The commutator of the symmetric/antisymmetric parts has Frobenius norm
    sqrt(2 u^2 + 8 u^4); solve for u^2.
    """
    x = (-1.0 + np.sqrt(1.0 + 8.0 * delta ** 2)) / 8.0
    return float(np.sqrt(x))

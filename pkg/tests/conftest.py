"""Test configuration and fixtures."""

import pytest
import sympy

from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.config import settings
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem
from expsum_lab.domain.value_objects.frequency import Frequency


@pytest.fixture
def lattice_service():
    """Lattice service with default bounds."""
    return LatticeService()


@pytest.fixture
def integer_lattice(lattice_service):
    """Rank-one lattice ℤ·1 in ℝ."""
    return lattice_service.find_basis([Frequency.of(1)])


@pytest.fixture
def surd_lattice(lattice_service):
    """Lattice with basis {1, √2} in ℝ."""
    return lattice_service.find_basis([Frequency.of(1), Frequency.of(sympy.sqrt(2))])


@pytest.fixture
def planar_lattice(lattice_service):
    """Lattice ℤ² with basis {(1, 0), (0, 1)}."""
    return lattice_service.find_basis([Frequency.of(1, 0), Frequency.of(0, 1)])


@pytest.fixture
def one_plus_e(integer_lattice):
    """F = 1 + exp(2πz)."""
    return ExpSum(integer_lattice, {(0,): 1, (1,): 1})


@pytest.fixture
def one_plus_e_system(one_plus_e):
    """The one-variable system F = 1 + exp(2πz)."""
    return ExpSystem((one_plus_e,))


@pytest.fixture
def decoupled_system(planar_lattice):
    """F₁ = 1 + exp(2πz₁), F₂ = 1 + exp(2πz₂)."""
    return ExpSystem(
        (
            ExpSum(planar_lattice, {(0, 0): 1, (1, 0): 1}),
            ExpSum(planar_lattice, {(0, 0): 1, (0, 1): 1}),
        )
    )


@pytest.fixture
def run_dir(tmp_path, monkeypatch):
    """Isolated artifact and cache directories."""
    monkeypatch.setattr(settings, "cache_dir", str(tmp_path / "cache"))
    return tmp_path / "runs"

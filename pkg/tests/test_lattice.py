"""Tests for the frequency lattice service."""

from fractions import Fraction

import pytest
import sympy

from expsum_lab.application.services.lattice import LatticeService
from expsum_lab.domain.value_objects.frequency import Frequency


def sqrt(d):
    return sympy.sqrt(d)


class TestFindBasis:
    """Tests for LatticeService.find_basis."""

    @pytest.fixture
    def service(self):
        """Create lattice service."""
        return LatticeService()

    def test_independent_surds(self, service):
        """Test {1, √2, 1+√2} has basis {1, √2}."""
        freqs = [Frequency.of(1), Frequency.of(sqrt(2)), Frequency.of(1 + sqrt(2))]
        lattice = service.find_basis(freqs)

        assert lattice.N == 2
        assert lattice.is_exact
        assert [b.entries[0].exact for b in lattice.basis] == [1, sqrt(2)]
        assert [m for _, m in lattice.entries] == [(1, 0), (0, 1), (1, 1)]

    def test_rationals_reduce_to_common_generator(self, service):
        """Test {1/2, 1/3} generates (1/6)ℤ."""
        lattice = service.find_basis([Frequency.of(Fraction(1, 2)), Frequency.of(Fraction(1, 3))])

        assert lattice.N == 1
        assert lattice.basis[0].entries[0].exact == sympy.Rational(1, 6)
        assert [m for _, m in lattice.entries] == [(3,), (2,)]

    def test_reduced_basis_is_canonical(self, service):
        """Test a negated first input flips the generator so its coordinate stays positive."""
        lattice = service.find_basis([Frequency.of(Fraction(-1, 2)), Frequency.of(Fraction(1, 3))])

        assert lattice.basis[0].entries[0].exact == sympy.Rational(-1, 6)
        assert [m for _, m in lattice.entries] == [(3,), (-2,)]

    def test_reduced_generators_follow_input_order(self, service):
        """Test equivalent inputs with surds get identically ordered generators."""
        half, third = sympy.Rational(1, 2), sympy.Rational(1, 3)
        forward = service.find_basis(
            [Frequency.of(half), Frequency.of(third), Frequency.of(sqrt(2) / 2), Frequency.of(sqrt(2) / 3)]
        )
        surds_first = service.find_basis(
            [Frequency.of(sqrt(2) / 2), Frequency.of(sqrt(2) / 3), Frequency.of(half), Frequency.of(third)]
        )

        assert [m for _, m in forward.entries] == [(3, 0), (2, 0), (0, 3), (0, 2)]
        assert [m for _, m in surds_first.entries] == [(3, 0), (2, 0), (0, 3), (0, 2)]
        assert [b.entries[0].exact for b in forward.basis] == [sympy.Rational(1, 6), sqrt(2) / 6]
        assert [b.entries[0].exact for b in surds_first.basis] == [sqrt(2) / 6, sympy.Rational(1, 6)]

    def test_planar_with_surd(self, service):
        """Test {(1,0), (0,1), (√2,0)} has rank 3."""
        lattice = service.find_basis(
            [Frequency.of(1, 0), Frequency.of(0, 1), Frequency.of(sqrt(2), 0)]
        )

        assert lattice.n == 2
        assert lattice.N == 3
        assert lattice.basis_matrix.shape == (3, 2)

    def test_zero_frequency_has_zero_coordinates(self, service):
        """Test the zero frequency sits at the origin of the lattice."""
        lattice = service.find_basis([Frequency.of(0), Frequency.of(1), Frequency.of(2)])

        assert lattice.N == 1
        assert lattice.coords["0"] == (0,)
        assert lattice.coords["2"] == (2 * lattice.coords["1"][0],)

    def test_approximate_inputs(self, service):
        """Test decimal inputs go through relation search."""
        root2 = 2**0.5
        lattice = service.find_basis([Frequency.of(1.0), Frequency.of(root2), Frequency.of(1.0 + root2)])

        assert not lattice.is_exact
        assert lattice.N == 2
        assert lattice.entries[2][1] == (1, 1)

    def test_frequency_of(self, service):
        """Test coordinates map back to real frequencies."""
        lattice = service.find_basis([Frequency.of(1), Frequency.of(sqrt(2))])

        assert lattice.frequency_of((2, 1))[0] == pytest.approx(2 + 2**0.5)
        assert lattice.exact_frequency_of((2, 1)).entries[0].exact == 2 + sqrt(2)

    def test_empty_input(self, service):
        """Test an empty frequency list is rejected."""
        with pytest.raises(ValueError):
            service.find_basis([])

    def test_mixed_dimensions(self, service):
        """Test frequencies of different dimensions are rejected."""
        with pytest.raises(ValueError):
            service.find_basis([Frequency.of(1), Frequency.of(1, 0)])

    def test_to_dict(self, service):
        """Test the lattice report fields."""
        data = service.find_basis([Frequency.of(1), Frequency.of(sqrt(2))]).to_dict()

        assert data["N"] == 2
        assert data["frame"]["mode"] == "exact"
        assert data["coords"][1] == {"frequency": ["sqrt(2)"], "m": [0, 1]}


class TestMembership:
    """Tests for coords_of, is_commensurate and integer_relation."""

    @pytest.fixture
    def service(self):
        """Create lattice service."""
        return LatticeService()

    def test_coords_of_member(self, service, surd_lattice):
        """Test 1+√2 has coordinates (1, 1)."""
        assert service.coords_of(Frequency.of(1 + sqrt(2)), surd_lattice) == (1, 1)

    def test_coords_of_outsider(self, service, surd_lattice):
        """Test √3 is not in the lattice of {1, √2}."""
        assert service.coords_of(Frequency.of(sqrt(3)), surd_lattice) is None

    def test_coords_of_rational_multiple(self, service, surd_lattice):
        """Test √2/2 is in the span but not in the lattice."""
        assert service.coords_of(Frequency.of(sqrt(2) / 2), surd_lattice) is None

    def test_coords_of_zero(self, service, surd_lattice):
        """Test the zero frequency."""
        assert service.coords_of(Frequency.of(0), surd_lattice) == (0, 0)

    def test_commensurate_rational(self, service, integer_lattice):
        """Test 7·(3/7) lies in ℤ."""
        result = service.is_commensurate(Frequency.of(Fraction(3, 7)), integer_lattice)

        assert result
        assert result.witness == 7

    def test_incommensurate_surd(self, service, integer_lattice):
        """Test no multiple of √2 lies in ℤ."""
        result = service.is_commensurate(Frequency.of(sqrt(2)), integer_lattice)

        assert not result
        assert result.witness is None

    def test_commensurate_surd(self, service):
        """Test 5·(√2/5) lies in ℤ√2."""
        lattice = service.find_basis([Frequency.of(sqrt(2))])
        result = service.is_commensurate(Frequency.of(sqrt(2) / 5), lattice)

        assert result.commensurate
        assert result.witness == 5

    def test_commensurate_beyond_bound(self, service, integer_lattice):
        """Test the witness must respect the coefficient bound."""
        result = service.is_commensurate(Frequency.of(Fraction(1, 60)), integer_lattice, relation_bound=50)

        assert not result
        assert result.bound == 50

    def test_no_relation_for_independent_basis(self, service, surd_lattice):
        """Test an independent basis certifies density."""
        assert service.integer_relation(surd_lattice) is None

    def test_no_relation_for_rank_one(self, service, integer_lattice):
        """Test rank-one lattices have no relation."""
        assert service.integer_relation(integer_lattice) is None

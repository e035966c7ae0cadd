"""Tests for the mean-value formula service."""

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from expsum_lab.application.services.formula import FormulaService, vertex_key
from expsum_lab.application.services.geometry import polytope_from_points
from expsum_lab.domain.errors import DegenerateSegment, LatticeMismatch, MissingCoefficients, NotDeveloped
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem
from expsum_lab.domain.value_objects.frequency import Frequency

DECOUPLED_K = {"0,0": 1, "1,0": -1, "0,1": -1, "1,1": 1}


class TestCombinatorialCoefficients:
    """Tests for the one-variable coefficients."""

    @pytest.fixture
    def service(self):
        """Create formula service."""
        return FormulaService()

    def test_unit_segment(self, service):
        """Test [0, 1] gets +1 below and −1 above."""
        segment = polytope_from_points(np.array([[0.0], [1.0]]), [(0,), (1,)])

        assert service.combinatorial_coefficients_1d(segment) == {(0,): 1, (1,): -1}

    def test_point(self, service):
        """Test a single point is a degenerate segment."""
        point = polytope_from_points(np.array([[2.0]]), [(2,)])

        with pytest.raises(DegenerateSegment):
            service.combinatorial_coefficients_1d(point)

    def test_polygon(self, service):
        """Test planar polytopes are rejected."""
        square = polytope_from_points(
            np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), [(0, 0), (1, 0), (0, 1)]
        )

        with pytest.raises(DegenerateSegment):
            service.combinatorial_coefficients_1d(square)

    def test_vertex_key(self):
        """Test the k-file key format."""
        assert vertex_key((1, -2)) == "1,-2"


class TestPredictMean:
    """Tests for FormulaService.predict_mean."""

    @pytest.fixture
    def service(self):
        """Create formula service."""
        return FormulaService()

    def test_density_of_one_plus_e(self, service, integer_lattice, one_plus_e_system):
        """Test F = 1+e, G = 1 predicts density 1."""
        prediction = service.predict_mean(one_plus_e_system, ExpSum.constant(integer_lattice))

        assert prediction.total == pytest.approx(1)
        assert prediction.k_source == "calibrated"
        assert [c.k for c in prediction.contributions] == [1, -1]

    def test_g_equals_e(self, service, integer_lattice, one_plus_e_system):
        """Test F = 1+e, G = e predicts −1."""
        prediction = service.predict_mean(one_plus_e_system, ExpSum.monomial(integer_lattice, (1,)))

        assert prediction.total == pytest.approx(-1)

    def test_cube_roots(self, service, integer_lattice):
        """Test F = 1+e+e², G = e predicts −1."""
        system = ExpSystem((ExpSum(integer_lattice, {(0,): 1, (1,): 1, (2,): 1}),))

        prediction = service.predict_mean(system, ExpSum.monomial(integer_lattice, (1,)))

        assert prediction.total == pytest.approx(-1)

    def test_incommensurate_g(self, service, lattice_service):
        """Test G = e^{√3} over F = 1+e predicts 0."""
        lattice = lattice_service.find_basis(
            [Frequency.of(0), Frequency.of(1), Frequency.of(sympy.sqrt(3))]
        )
        F = ExpSum.from_spectrum(lattice, [(Frequency.of(0), 1), (Frequency.of(1), 1)])
        G = ExpSum.from_spectrum(lattice, [(Frequency.of(sympy.sqrt(3)), 1)])

        prediction = service.predict_mean(ExpSystem((F,)), G)

        assert prediction.total == pytest.approx(0, abs=1e-12)

    def test_irrational_density(self, service, lattice_service):
        """Test the zero density of 1+e+e^{√2} is √2."""
        root2 = Frequency.of(sympy.sqrt(2))
        lattice = lattice_service.find_basis([Frequency.of(0), Frequency.of(1), root2])
        F = ExpSum.from_spectrum(lattice, [(Frequency.of(0), 1), (Frequency.of(1), 1), (root2, 1)])

        prediction = service.predict_mean(ExpSystem((F,)), ExpSum.constant(lattice))

        assert prediction.total == pytest.approx(2**0.5)

    def test_decoupled_with_user_coefficients(self, service, planar_lattice, decoupled_system):
        """Test the decoupled system with product coefficients predicts density 1."""
        prediction = service.predict_mean(decoupled_system, ExpSum.constant(planar_lattice), DECOUPLED_K)

        assert prediction.total == pytest.approx(1)
        assert prediction.k_source == "user"
        assert len(prediction.contributions) == 4

    @pytest.mark.parametrize(
        "f_coefs,g_terms",
        [
            ({0: 1, 1: 2, 2: -1, 3: 3}, {(1,): 1}),
            ({0: 2, 1: 1j, 2: 1}, {(2,): 1, (-1,): 0.5}),
            ({-1: 1, 1: 4 - 1j}, {(0,): 1j, (3,): -2}),
        ],
    )
    def test_matches_root_oracle(self, service, integer_lattice, f_coefs, g_terms):
        """Test integer frequencies against Σ G(w) over the roots of the Laurent polynomial."""
        lo = min(f_coefs)
        poly = [f_coefs.get(k, 0) for k in range(max(f_coefs), lo - 1, -1)]
        roots = np.roots(poly)
        expected = sum(c * roots ** m[0] for m, c in g_terms.items()).sum()
        system = ExpSystem((ExpSum(integer_lattice, {(k,): c for k, c in f_coefs.items()}),))

        prediction = service.predict_mean(system, ExpSum(integer_lattice, g_terms))

        assert prediction.total == pytest.approx(complex(expected), abs=1e-8)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_systems_match_root_oracle(self, service, integer_lattice, seed):
        """Test seeded random systems with frequencies in [−3, 3] against the companion-matrix roots."""
        rng = np.random.default_rng(seed)
        support = sorted(rng.choice(np.arange(-3, 4), size=int(rng.integers(2, 6)), replace=False))
        f_coefs = {int(k): complex(rng.normal(), rng.normal()) for k in support}
        m = int(rng.integers(-3, 4))
        lo = min(f_coefs)
        roots = np.roots([f_coefs.get(k, 0) for k in range(max(f_coefs), lo - 1, -1)])
        system = ExpSystem((ExpSum(integer_lattice, {(k,): c for k, c in f_coefs.items()}),))

        prediction = service.predict_mean(system, ExpSum.monomial(integer_lattice, (m,)))

        assert prediction.total == pytest.approx(complex(np.sum(roots**m)), rel=1e-8, abs=1e-8)

    def test_missing_coefficients(self, service, planar_lattice, decoupled_system):
        """Test n = 2 without coefficients."""
        with pytest.raises(MissingCoefficients) as exc:
            service.predict_mean(decoupled_system, ExpSum.constant(planar_lattice))

        assert sorted(exc.value.details["vertices"]) == ["0,0", "0,1", "1,0", "1,1"]

    def test_incomplete_coefficients(self, service, planar_lattice, decoupled_system):
        """Test a k-map that misses a vertex."""
        partial = {"0,0": 1, "1,1": 1}

        with pytest.raises(MissingCoefficients) as exc:
            service.predict_mean(decoupled_system, ExpSum.constant(planar_lattice), partial)

        assert sorted(exc.value.details["vertices"]) == ["0,1", "1,0"]

    def test_not_developed(self, service, planar_lattice):
        """Test identical triangles are rejected with a witness."""
        triangle = {(0, 0): 1, (1, 0): 1, (0, 1): 1}
        system = ExpSystem((ExpSum(planar_lattice, triangle), ExpSum(planar_lattice, {(0, 0): 1, (1, 0): 2, (0, 1): 3})))

        with pytest.raises(NotDeveloped) as exc:
            service.predict_mean(system, ExpSum.constant(planar_lattice), DECOUPLED_K)

        assert exc.value.qualified_code == "gkh_formula.NotDeveloped"
        assert exc.value.details["witness"].faces

    def test_lattice_mismatch(self, service, one_plus_e_system, surd_lattice):
        """Test G must share the lattice of the system."""
        with pytest.raises(LatticeMismatch):
            service.predict_mean(one_plus_e_system, ExpSum.constant(surd_lattice))

    def test_to_dict(self, service, integer_lattice, one_plus_e_system):
        """Test the prediction report."""
        data = service.predict_mean(one_plus_e_system, ExpSum.constant(integer_lattice)).to_dict()

        assert data["total"] == pytest.approx([1.0, 0.0])
        assert data["contributions"][1]["vertex"] == [1]
        assert data["contributions"][1]["k"] == -1

    @settings(max_examples=20, deadline=None)
    @given(
        a=st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False),
        b=st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False),
    )
    def test_linear_in_g(self, a, b):
        """Test the prediction is linear in G."""
        service = FormulaService()
        lattice = service.algebra.lattice_service.find_basis([Frequency.of(1)])
        system = ExpSystem((ExpSum(lattice, {(0,): 2, (1,): -1, (3,): 0.5}),))
        G1 = ExpSum.monomial(lattice, (1,))
        G2 = ExpSum(lattice, {(0,): 1, (2,): 1j})

        combined = service.predict_mean(system, G1.scale(a) + G2.scale(b)).total
        separate = a * service.predict_mean(system, G1).total + b * service.predict_mean(system, G2).total

        assert combined == pytest.approx(separate, abs=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(
        c=st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False),
        shift=st.integers(-3, 3),
    )
    def test_gauge_invariance(self, c, shift):
        """Test F ↦ c·e^m·F leaves the prediction unchanged."""
        service = FormulaService()
        lattice = service.algebra.lattice_service.find_basis([Frequency.of(1)])
        F = ExpSum(lattice, {(0,): 1, (1,): 1, (2,): 1})
        G = ExpSum(lattice, {(1,): 1, (-1,): 0.5})

        base = service.predict_mean(ExpSystem((F,)), G).total
        gauged = service.predict_mean(ExpSystem((F.shift((shift,)).scale(c),)), G).total

        assert gauged == pytest.approx(base, abs=1e-9)

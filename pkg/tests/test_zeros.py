"""Tests for the zero finder service."""

import pytest

from expsum_lab.application.services.zeros import Rectangle, ZeroFinderService, strip_box_for
from expsum_lab.domain.errors import BoundaryZero, NotDeveloped
from expsum_lab.domain.value_objects.exp_sum import ExpSum, ExpSystem
from expsum_lab.infrastructure.cache.disk_cache import CacheService


class TestRectangleCounting:
    """Tests for argument-principle counting in one variable."""

    @pytest.fixture
    def service(self):
        """Create zero finder service."""
        return ZeroFinderService(threads=1)

    def test_ten_zeros(self, service, one_plus_e):
        """Test 1+e has ten zeros with 0 < Im z < 10."""
        assert service.count_zeros_rect_1d(one_plus_e, Rectangle(-1, 1, 0, 10)) == 10

    def test_double_zeros(self, service, one_plus_e):
        """Test (1+e)² counts each zero twice."""
        assert service.count_zeros_rect_1d(one_plus_e * one_plus_e, Rectangle(-1, 1, 0, 10)) == 20

    def test_empty_rectangle(self, service, one_plus_e):
        """Test a rectangle between two zeros."""
        assert service.count_zeros_rect_1d(one_plus_e, Rectangle(-1, 1, 0.6, 1.4)) == 0

    def test_zero_on_boundary(self, service, one_plus_e):
        """Test a zero on the contour is reported."""
        with pytest.raises(BoundaryZero) as exc:
            service.count_zeros_rect_1d(one_plus_e, Rectangle(-1, 1, 0.5, 1.2))

        assert exc.value.qualified_code == "zero_finder.BoundaryZero"

    def test_two_variables_rejected(self, service, planar_lattice):
        """Test counting needs n = 1."""
        with pytest.raises(ValueError):
            service.count_zeros_rect_1d(ExpSum.constant(planar_lattice), Rectangle(-1, 1, 0, 1))

    def test_winding_on_circle(self, service, one_plus_e):
        """Test a small circle around a double zero winds twice."""
        assert service.winding_on_circle(one_plus_e * one_plus_e, 0.5j, 0.1) == 2

    def test_empty_rectangle_rejected(self):
        """Test degenerate rectangles are rejected."""
        with pytest.raises(ValueError):
            Rectangle(1, 1, 0, 1)


class TestStripRadius:
    """Tests for the strip radius estimate."""

    @pytest.fixture
    def service(self):
        """Create zero finder service."""
        return ZeroFinderService(threads=1)

    def test_dominance_bound(self, one_plus_e, integer_lattice):
        """Test the bound vanishes when no term dominates and grows otherwise."""
        assert ZeroFinderService.dominance_bound(one_plus_e) == 0
        assert ZeroFinderService.dominance_bound(ExpSum(integer_lattice, {(0,): 1, (1,): 5, (2,): 1})) > 0

    def test_zeros_on_imaginary_axis(self, service, one_plus_e_system):
        """Test 1+e validates at the initial radius."""
        estimate = service.strip_radius(one_plus_e_system)

        assert estimate.R == pytest.approx(0.5)
        assert estimate.doublings == 0

    def test_shifted_zeros(self, service, integer_lattice):
        """Test 1+4e has zeros at Re z = −log 4/2π inside the radius."""
        system = ExpSystem((ExpSum(integer_lattice, {(0,): 1, (1,): 4}),))

        estimate = service.strip_radius(system)

        assert estimate.R > 0.221

    def test_not_developed(self, service, planar_lattice):
        """Test identical triangles are rejected."""
        triangle = {(0, 0): 1, (1, 0): 1, (0, 1): 1}
        system = ExpSystem((ExpSum(planar_lattice, triangle), ExpSum(planar_lattice, triangle)))

        with pytest.raises(NotDeveloped):
            service.strip_radius(system)


class TestLocateZeros:
    """Tests for ZeroFinderService.locate_zeros."""

    @pytest.fixture
    def service(self):
        """Create zero finder service."""
        return ZeroFinderService(threads=2, seed=7)

    def test_one_plus_e(self, service, one_plus_e_system):
        """Test zeros i/2, 3i/2, 5i/2 sorted by imaginary part."""
        search = service.locate_zeros(one_plus_e_system, strip_box_for(1.0, [0], [3]))

        assert [r.z[0] for r in search.zeros] == pytest.approx([0.5j, 1.5j, 2.5j], abs=1e-9)
        assert all(r.multiplicity == 1 for r in search.zeros)
        assert search.expected_count == pytest.approx(3)
        assert search.warnings == ()

    def test_cube_roots_polished(self, service, integer_lattice):
        """Test every zero of 1+e+e² on a long strip meets the residual tolerance."""
        F = ExpSum(integer_lattice, {(0,): 1, (1,): 1, (2,): 1})

        search = service.locate_zeros(ExpSystem((F,)), strip_box_for(0.5, [0], [40]))

        assert search.count == 80
        assert max(r.residual for r in search.zeros) <= 1e-10
        assert all(abs(F.evaluate([r.z[0]])) <= 1e-10 for r in search.zeros)
        assert all(abs(r.z[0].real) <= 1e-9 for r in search.zeros)
        fractions = {round(r.z[0].imag % 1, 6) for r in search.zeros}
        assert fractions == {round(1 / 3, 6), round(2 / 3, 6)}

    @pytest.mark.slow
    def test_long_strip_residuals(self, integer_lattice):
        """Test 400 zeros of 1+e+e² with Im z in [0, 200] for one and four threads."""
        F = ExpSum(integer_lattice, {(0,): 1, (1,): 1, (2,): 1})

        for threads in (1, 4):
            search = ZeroFinderService(threads=threads).locate_zeros(
                ExpSystem((F,)), strip_box_for(0.5, [0], [200])
            )

            assert search.count == 400
            assert max(r.residual for r in search.zeros) <= 1e-10

    def test_gauge_equivariance(self, service, integer_lattice):
        """Test c·e^{2πmz}·F has the zeros of F."""
        F = ExpSum(integer_lattice, {(0,): 1, (1,): 2, (2,): -1, (3,): 0.5})
        box = strip_box_for(1.0, [0], [6])

        base = service.locate_zeros(ExpSystem((F,)), box)
        gauged = service.locate_zeros(ExpSystem((F.shift((2,)).scale(3 - 1j),)), box)

        assert base.count == gauged.count == 18
        assert [r.z[0] for r in gauged.zeros] == pytest.approx([r.z[0] for r in base.zeros], abs=1e-8)

    @pytest.mark.parametrize("y0", [0.37, 1.91])
    def test_shift_equivariance(self, service, integer_lattice, y0):
        """Test zeros of z ↦ F(z + iy₀) are the zeros of F moved by −iy₀."""
        F = ExpSum(integer_lattice, {(0,): 1, (1,): 2, (2,): -1, (3,): 0.5})

        shifted = service.locate_zeros(ExpSystem((F.translate([1j * y0]),)), strip_box_for(1.0, [0], [4]))
        base = service.locate_zeros(ExpSystem((F,)), strip_box_for(1.0, [y0], [4 + y0]))

        assert shifted.count == base.count == 12
        assert [r.z[0] + 1j * y0 for r in shifted.zeros] == pytest.approx([r.z[0] for r in base.zeros], abs=1e-8)

    def test_double_zeros(self, service, one_plus_e):
        """Test multiplicities of (1+e)²."""
        system = ExpSystem((one_plus_e * one_plus_e,))

        search = service.locate_zeros(system, strip_box_for(1.0, [0], [2]))

        assert [r.multiplicity for r in search.zeros] == [2, 2]
        assert search.count == 4

    def test_box_dimension_checked(self, service, one_plus_e_system):
        """Test the box must match the number of variables."""
        with pytest.raises(ValueError):
            service.locate_zeros(one_plus_e_system, strip_box_for(1.0, [0, 0], [1, 1]))

    def test_cache_round_trip(self, tmp_path, one_plus_e_system):
        """Test a second search is served from the cache."""
        cache = CacheService(cache_dir=str(tmp_path / "cache"))
        service = ZeroFinderService(cache=cache, threads=1)
        box = strip_box_for(1.0, [0], [2])

        first = service.locate_zeros(one_plus_e_system, box)
        second = service.locate_zeros(one_plus_e_system, box)

        assert not first.from_cache
        assert second.from_cache
        assert [r.z[0] for r in second.zeros] == pytest.approx([r.z[0] for r in first.zeros])
        cache.close()

    @pytest.mark.slow
    def test_decoupled_system(self, service, decoupled_system):
        """Test the four zeros (i(k+½), i(l+½)) in [0,2]²."""
        search = service.locate_zeros(decoupled_system, strip_box_for(1.0, [0, 0], [2, 2]))

        assert search.expected_count == pytest.approx(4)
        assert len(search.zeros) == 4
        imag = sorted(tuple(round(c.imag, 6) for c in r.z) for r in search.zeros)
        assert imag == [(0.5, 0.5), (0.5, 1.5), (1.5, 0.5), (1.5, 1.5)]
        assert all(r.multiplicity_unverified for r in search.zeros)

"""Tests for the torus service."""

import math

import pytest
import sympy

from expsum_lab.application.services.torus import TorusService
from expsum_lab.domain.errors import DimensionUnsupported, LatticeMismatch, OrbitDegenerate
from expsum_lab.domain.value_objects.exp_sum import TrigPoly, TrigTerm
from expsum_lab.domain.value_objects.frequency import Frequency
from expsum_lab.domain.value_objects.torus import SemiTrigClause, SemiTrigSet
from expsum_lab.domain.value_objects.window import WindowSpec


def trig(*terms):
    return TrigPoly(tuple(terms))


def cos(*alpha, c=1.0):
    return TrigTerm(Frequency.of(*alpha), c=c)


def sin(*alpha, d=1.0):
    return TrigTerm(Frequency.of(*alpha), c=0.0, d=d)


ONE = trig(TrigTerm(Frequency.zero(1), c=1.0))


class TestBuildLift:
    """Tests for orbit lifts."""

    @pytest.fixture
    def service(self):
        """Create torus service."""
        return TorusService(threads=1)

    def test_dense_real_lift(self, service, surd_lattice):
        """Test {1, √2} gives a dense line on 𝕋²."""
        lift = service.build_lift(surd_lattice)

        assert lift.N == 2
        assert lift.torus_dimension == 2
        assert lift.orbit_dimension == 1
        assert lift.dense
        assert not lift.periodic

    def test_periodic_lift(self, service, planar_lattice):
        """Test ℤ² lifts periodically."""
        lift = service.build_lift(planar_lattice)

        assert lift.periodic
        assert lift.dense

    def test_complex_lift(self, service, surd_lattice):
        """Test the complex lift adds one circle per real part."""
        lift = service.build_lift(surd_lattice, mode="complex", R=1.0)

        assert lift.torus_dimension == 3
        assert lift.orbit_dimension == 2
        assert lift.point([[-0.999, 0.0]])[0, 0] == pytest.approx(0.0005)

    def test_complex_lift_needs_radius(self, service, surd_lattice):
        """Test complex mode without R is rejected."""
        with pytest.raises(ValueError):
            service.build_lift(surd_lattice, mode="complex")

    def test_degenerate_orbit(self, service, lattice_service):
        """Test frequencies spanning a line in ℝ² are rejected."""
        lattice = lattice_service.find_basis([Frequency.of(1, 0), Frequency.of(2, 0)])

        with pytest.raises(OrbitDegenerate):
            service.build_lift(lattice)

    def test_base_point_length(self, service, surd_lattice):
        """Test the base point must live on the torus."""
        with pytest.raises(ValueError):
            service.build_lift(surd_lattice, base_point=[0.0])

    def test_lift_trig(self, service, surd_lattice):
        """Test cos 2π(1+√2)x lifts to cos 2π(φ₁+φ₂)."""
        T = trig(cos(1 + sympy.sqrt(2)))

        lifted = service.lift_trig(T, surd_lattice)
        lift = service.build_lift(surd_lattice)

        assert lifted.n == 2
        for x in (0.0, 0.37, 2.9):
            assert lifted.evaluate(lift.angles([[x]])[0]) == pytest.approx(T.evaluate([x]))

    def test_lift_trig_outside_lattice(self, service, surd_lattice):
        """Test √3 cannot be lifted to the {1, √2} torus."""
        with pytest.raises(LatticeMismatch):
            service.lift_trig(trig(cos(sympy.sqrt(3))), surd_lattice)


class TestWeylAverages:
    """Tests for orbit averages."""

    @pytest.fixture
    def service(self):
        """Create torus service."""
        return TorusService(threads=2)

    def test_constant(self, service, surd_lattice):
        """Test f = 1 averages to 1."""
        lift = service.build_lift(surd_lattice)
        f = trig(TrigTerm(Frequency.zero(2), c=1.0))

        assert service.orbit_average(f, lift, WindowSpec.box([0], [1]), 7.0) == pytest.approx(1)

    def test_converges_to_torus_integral(self, service, surd_lattice):
        """Test cos 2π(φ₁−φ₂) averages to 0 along a dense line."""
        lift = service.build_lift(surd_lattice)
        f = trig(cos(1, -1))

        averages = service.weyl_averages(f, lift, WindowSpec.box([0], [1], lambda0=10, ratio=2, steps=4))

        assert len(averages) == 5
        assert averages[-1].exact == 0
        assert averages[-1].abs_err < 1 / (math.pi * (2**0.5 - 1) * 160) + 1e-9

    def test_exact_integral(self, service, surd_lattice):
        """Test the quadrature against the closed form sin(2πcλ)/(2πcλ)."""
        lift = service.build_lift(surd_lattice)
        f = trig(cos(1, -1))
        c = 1 - 2**0.5
        lam = 3.7

        expected = math.sin(2 * math.pi * c * lam) / (2 * math.pi * c * lam)

        assert service.orbit_average(f, lift, WindowSpec.box([0], [1]), lam) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "terms,exact",
        [
            ((TrigTerm(Frequency.zero(3), c=1.0),), 1.0),
            ((cos(1, 0, 0),), 0.0),
            ((cos(1, -1, 0),), 0.0),
            ((cos(1, 1, 0, c=0.5), cos(1, -1, 0, c=0.5)), 0.0),
        ],
    )
    def test_weyl_law_on_three_torus(self, service, lattice_service, terms, exact):
        """Test monomials along x ↦ (x, √2x, √3x) average to their torus integral at λ = 1e4."""
        lattice = lattice_service.find_basis(
            [Frequency.of(1), Frequency.of(sympy.sqrt(2)), Frequency.of(sympy.sqrt(3))]
        )
        lift = service.build_lift(lattice)
        f = trig(*terms)

        averages = service.weyl_averages(f, lift, WindowSpec.box([0], [1], lambda0=625, ratio=2, steps=4))

        assert lift.N == 3
        assert averages[-1].lam == pytest.approx(1e4)
        assert averages[-1].exact == pytest.approx(exact)
        assert averages[-1].abs_err <= 1e-2

    def test_disk_window(self, service, planar_lattice):
        """Test a ball window in ℝ² integrates by the polar rule."""
        lift = service.build_lift(planar_lattice)
        f = trig(TrigTerm(Frequency.zero(2), c=2.0))

        assert service.orbit_average(f, lift, WindowSpec.ball([0, 0], 1.0), 3.0) == pytest.approx(2)

    def test_wrong_torus_dimension(self, service, surd_lattice):
        """Test f must live on the lift's torus."""
        lift = service.build_lift(surd_lattice)

        with pytest.raises(LatticeMismatch):
            service.orbit_average(ONE, lift, WindowSpec.box([0], [1]), 1.0)

    def test_complex_lift_rejected(self, service, surd_lattice):
        """Test averages need a real lift."""
        lift = service.build_lift(surd_lattice, mode="complex", R=1.0)

        with pytest.raises(ValueError):
            service.orbit_average(trig(cos(0, 0, 0)), lift, WindowSpec.box([0], [1]), 1.0)


class TestIsolatedPoints:
    """Tests for isolated-point enumeration."""

    @pytest.fixture
    def service(self):
        """Create torus service."""
        return TorusService(threads=1)

    def test_integers(self, service):
        """Test sin 2πx = 0, cos 2πx > 0 picks the integers."""
        V = SemiTrigSet((SemiTrigClause(equations=(trig(sin(1)),), inequalities=(trig(cos(1)),)),))

        search = service.isolated_points(V, WindowSpec.box([0], [10.5]), 1.0)

        assert len(search.points) == 11
        assert [p.x[0] for p in search.points] == pytest.approx(list(range(11)), abs=1e-9)
        assert search.total == pytest.approx(11)

    @pytest.mark.parametrize(
        "lo,hi,lam,expected",
        [([0], [1], 64.0, 65), ([-0.5], [0.5], 128.0, 129), ([-1], [1], 3.0, 7)],
    )
    def test_roots_on_window_edges(self, service, lo, hi, lam, expected):
        """Test integers on both ends of the closed window are counted."""
        V = SemiTrigSet((SemiTrigClause(equations=(trig(sin(1)),), inequalities=(trig(cos(1)),)),))

        search = service.isolated_points(V, WindowSpec.box(lo, hi), lam)

        assert len(search.points) == expected
        assert search.points[0].x[0] == pytest.approx(lo[0] * lam, abs=1e-9)
        assert search.points[-1].x[0] == pytest.approx(hi[0] * lam, abs=1e-9)

    def test_half_integers_up_to_edge(self, service):
        """Test sin 2πx = 0 on [0, 64] has 129 roots including both ends."""
        search = service.isolated_points(SemiTrigSet.zero_set(trig(sin(1))), WindowSpec.box([0], [1]), 64.0)

        assert len(search.points) == 129
        assert [p.x[0] for p in search.points] == pytest.approx([k / 2 for k in range(129)], abs=1e-9)

    def test_values_of_t(self, service):
        """Test T is evaluated at every point."""
        V = SemiTrigSet.zero_set(trig(sin(1)))
        T = trig(cos(1))

        search = service.isolated_points(V, WindowSpec.box([0.1], [2.9]), 1.0, T)

        assert [p.value for p in search.points] == pytest.approx([-1, 1, -1, 1, -1])

    def test_tangential_root(self, service):
        """Test cos 2πx + cos 2π√2x = 2 only at the origin."""
        h = trig(cos(1), cos(sympy.sqrt(2)), TrigTerm(Frequency.of(0), c=-2.0))

        search = service.isolated_points(SemiTrigSet.zero_set(h), WindowSpec.box([-5], [5]), 1.0)

        assert len(search.points) == 1
        assert search.points[0].x[0] == pytest.approx(0, abs=1e-6)

    def test_planar_grid(self, service):
        """Test sin 2πx = sin 2πy = 0 gives the half-integer grid."""
        V = SemiTrigSet.zero_set(trig(sin(1, 0)), trig(sin(0, 1)))

        search = service.isolated_points(V, WindowSpec.box([-0.3, -0.3], [1.2, 1.2]), 1.0)

        assert sorted((round(2 * p.x[0]), round(2 * p.x[1])) for p in search.points) == [
            (i, j) for i in range(3) for j in range(3)
        ]

    def test_lines_have_no_isolated_points(self, service):
        """Test a single equation with regular zeros in ℝ² has none."""
        V = SemiTrigSet.zero_set(trig(sin(1, 0)))

        assert service.isolated_points(V, WindowSpec.box([0, 0], [1, 1]), 1.0).points == ()

    def test_open_condition_is_not_isolated(self, service):
        """Test a clause with only inequalities contributes no points."""
        V = SemiTrigSet((SemiTrigClause(inequalities=(trig(cos(1)),)),))

        assert service.isolated_points(V, WindowSpec.box([0], [3]), 1.0).points == ()

    def test_three_dimensions(self, service):
        """Test n = 3 is unsupported."""
        V = SemiTrigSet.zero_set(trig(sin(1, 0, 0)))

        with pytest.raises(DimensionUnsupported):
            service.isolated_points(V, WindowSpec.box([0, 0, 0], [1, 1, 1]), 1.0)


class TestTransversalVolume:
    """Tests for transversal volumes of level curves."""

    @pytest.fixture
    def service(self):
        """Create torus service."""
        return TorusService(threads=1)

    @pytest.fixture
    def lift(self, service, surd_lattice):
        """Dense line with directions (1, √2)."""
        return service.build_lift(surd_lattice)

    def test_vertical_curve(self, service, lift):
        """Test {φ₁ = 1/4} has transversal volume 1."""
        V = SemiTrigSet((SemiTrigClause(equations=(trig(cos(1, 0)),), inequalities=(trig(sin(1, 0)),)),))

        result = service.transversal_volume_curve(V, lift)

        assert result.value == pytest.approx(1, abs=1e-6)
        assert result.components == 2
        assert result.length == pytest.approx(2, abs=1e-6)

    def test_horizontal_curve(self, service, lift):
        """Test {φ₂ = 1/4} has transversal volume √2."""
        V = SemiTrigSet((SemiTrigClause(equations=(trig(cos(0, 1)),), inequalities=(trig(sin(0, 1)),)),))

        assert service.transversal_volume_curve(V, lift).value == pytest.approx(2**0.5, abs=1e-6)

    def test_weighted_by_t(self, service, lift):
        """Test T̃ = cos 2πφ₂ integrates to 0 along {φ₁ = 1/4}."""
        V = SemiTrigSet((SemiTrigClause(equations=(trig(cos(1, 0)),), inequalities=(trig(sin(1, 0)),)),))

        result = service.transversal_volume_curve(V, lift, trig(cos(0, 1)))

        assert result.value == pytest.approx(0, abs=1e-6)

    @pytest.mark.parametrize(
        "c,T,T_tilde,tolerance",
        [
            (1.2, None, None, 0.02),
            pytest.param(-0.5, None, None, 0.02, marks=pytest.mark.slow),
            pytest.param(1.2, trig(cos(1)), trig(cos(1, 0)), 0.05, marks=pytest.mark.slow),
            pytest.param(-0.5, trig(cos(1)), trig(cos(1, 0)), 0.05, marks=pytest.mark.slow),
            pytest.param(
                1.2,
                trig(sin(sympy.sqrt(2)), TrigTerm(Frequency.of(0), c=0.3)),
                trig(sin(0, 1), TrigTerm(Frequency.zero(2), c=0.3)),
                0.05,
                marks=pytest.mark.slow,
            ),
            pytest.param(
                -0.5,
                trig(sin(sympy.sqrt(2)), TrigTerm(Frequency.of(0), c=0.3)),
                trig(sin(0, 1), TrigTerm(Frequency.zero(2), c=0.3)),
                0.05,
                marks=pytest.mark.slow,
            ),
        ],
    )
    def test_matches_direct_counting(self, service, lift, c, T, T_tilde, tolerance):
        """Test the curve integral against T summed over roots of cos 2πx + cos 2π√2x = c in [−λ, λ]."""
        V_tilde = SemiTrigSet.zero_set(trig(cos(1, 0), cos(0, 1), TrigTerm(Frequency.zero(2), c=-c)))
        V = SemiTrigSet.zero_set(trig(cos(1), cos(sympy.sqrt(2)), TrigTerm(Frequency.of(0), c=-c)))
        lam = 500.0

        volume = service.transversal_volume_curve(V_tilde, lift, T_tilde)
        search = service.isolated_points(V, WindowSpec.box([-1], [1]), lam, T)
        direct = search.total / (2 * lam)

        assert search.undecided == ()
        assert len(search.points) > 100
        assert abs(direct - volume.value) <= tolerance * max(abs(volume.value), 0.5)

    def test_periodic_lift_rejected(self, service, planar_lattice):
        """Test N = n lifts have no transversal curves."""
        lift = service.build_lift(planar_lattice)
        V = SemiTrigSet.zero_set(trig(cos(1, 0)))

        with pytest.raises(DimensionUnsupported):
            service.transversal_volume_curve(V, lift)

    def test_equation_count(self, service, lift):
        """Test a curve on 𝕋² needs exactly one equation."""
        V = SemiTrigSet.zero_set(trig(cos(1, 0)), trig(cos(0, 1)))

        with pytest.raises(ValueError):
            service.transversal_volume_curve(V, lift)

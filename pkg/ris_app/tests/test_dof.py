import math
from fractions import Fraction
from itertools import product

from django.test import SimpleTestCase

from ris_app.dof import (
    KIND_CONSTANT_ENVELOPE,
    KIND_NONCOHERENT,
    SHAPE_PENTAGON,
    SHAPE_RECTANGLE,
    SHAPE_SIMPLEX,
    DofSpec,
    binding_constraint,
    binding_constraint_phase_only,
    dof_joint,
    dof_phase_only,
    dof_region,
    effective_transmit_dimension,
    expected_transition,
    format_dof,
    region_shape,
    siso_rate_approx,
)
from ris_app.exceptions import ArgumentError

F = Fraction


class DofSpecTests(SimpleTestCase):
    def test_positive_dimensions(self):
        with self.assertRaises(ArgumentError):
            DofSpec(m=0, n=1, k=1)

    def test_rank_bounded_by_m_and_k(self):
        with self.assertRaises(ArgumentError):
            DofSpec(m=2, n=4, k=1, r=2)
        with self.assertRaises(ArgumentError):
            DofSpec(m=2, n=4, k=4, r=-1)


class DofJointTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(dof_joint(DofSpec(2, 5, 4)), 4)
        self.assertEqual(dof_joint(DofSpec(1, 1, 1)), 1)
        self.assertEqual(dof_joint(DofSpec(2, 4, 4, r=1)), 4)

    def test_half_integer(self):
        self.assertEqual(dof_joint(DofSpec(1, 2, 10)), F(3, 2))

    def test_binding_labels(self):
        self.assertEqual(binding_constraint(DofSpec(2, 5, 4)), "receiver-limited: K")
        self.assertEqual(binding_constraint(DofSpec(8, 3, 10)), "RIS-limited: N")
        self.assertEqual(binding_constraint(DofSpec(1, 2, 10)), "transmit-limited: M+N/2-1/2")
        self.assertEqual(binding_constraint(DofSpec(1, 2, 10, r=1)), "transmit-limited: M+N/2")
        self.assertEqual(binding_constraint(DofSpec(8, 3, 10, r=1)), "RIS-limited: N+r")

    def test_direct_path_gain_is_bounded(self):
        for m, n, k in product(range(1, 17), repeat=3):
            gain = dof_joint(DofSpec(m, n, k, r=1)) - dof_joint(DofSpec(m, n, k))
            self.assertIn(gain, {F(0), F(1, 2), F(1)}, msg=f"M={m} N={n} K={k}")

    def test_format(self):
        self.assertEqual(format_dof(F(4)), "4")
        self.assertEqual(format_dof(F(1, 2)), "0.5")

    def test_effective_transmit_dimension(self):
        self.assertEqual(effective_transmit_dimension(2, 5), 4)
        self.assertEqual(effective_transmit_dimension(2, 5, r=1), F(9, 2))


class DofPhaseOnlyTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(dof_phase_only(DofSpec(1, 8, 4)), 4)
        self.assertEqual(dof_phase_only(DofSpec(1, 1, 1)), F(1, 2))
        self.assertEqual(dof_phase_only(DofSpec(1, 6, 4)), 3)

    def test_labels(self):
        self.assertEqual(binding_constraint_phase_only(DofSpec(1, 8, 4)), "receiver-limited: K")
        self.assertEqual(binding_constraint_phase_only(DofSpec(1, 6, 4)), "RIS-limited: N/2")

    def test_never_exceeds_joint(self):
        for m, n, k in product(range(1, 9), repeat=3):
            for r in range(min(m, k) + 1):
                spec = DofSpec(m, n, k, r)
                self.assertLessEqual(dof_phase_only(spec), dof_joint(spec))


class DofRegionTests(SimpleTestCase):
    def test_pentagon(self):
        region = dof_region(DofSpec(2, 8, 10))
        self.assertEqual((region.x_bound, region.theta_bound, region.sum_bound), (2, 4, F(11, 2)))
        self.assertEqual(
            region.vertices,
            ((0, 0), (2, 0), (2, F(7, 2)), (F(3, 2), 4), (0, 4)),
        )
        self.assertEqual(region_shape(region), SHAPE_PENTAGON)

    def test_direct_path_rectangle(self):
        region = dof_region(DofSpec(2, 8, 10, r=1))
        self.assertEqual(region.sum_bound, 6)
        self.assertIn((2, 4), region.vertices)
        self.assertEqual(region.vertices, ((0, 0), (2, 0), (2, 4), (0, 4)))
        self.assertEqual(region_shape(region), SHAPE_RECTANGLE)

    def test_receiver_limited_simplex(self):
        region = dof_region(DofSpec(4, 8, 3))
        self.assertEqual((region.x_bound, region.theta_bound, region.sum_bound), (3, 3, 3))
        self.assertEqual(region.vertices, ((0, 0), (3, 0), (0, 3)))
        self.assertEqual(region_shape(region), SHAPE_SIMPLEX)

    def test_properties_over_small_specs(self):
        for m, n, k in product(range(1, 7), repeat=3):
            for r in range(min(m, k) + 1):
                spec = DofSpec(m, n, k, r)
                region = dof_region(spec)
                self.assertEqual(region.sum_bound, dof_joint(spec))
                self.assertEqual(region.vertices[0], (0, 0))
                for x, y in region.vertices:
                    self.assertTrue(all(c.holds(x, y) for c in region.constraints))
                    self.assertGreaterEqual(sum(c.tight(x, y) for c in region.constraints), 2)
                rectangle = region.sum_bound >= region.x_bound + region.theta_bound
                self.assertEqual(region_shape(region) == SHAPE_RECTANGLE, rectangle)
                if rectangle:
                    self.assertIn((region.x_bound, region.theta_bound), region.vertices)

    def test_vertices_counterclockwise(self):
        region = dof_region(DofSpec(2, 8, 10))
        angles = [math.atan2(float(y), float(x)) for x, y in region.vertices[1:]]
        self.assertEqual(angles, sorted(angles))

    def test_exports(self):
        region = dof_region(DofSpec(2, 8, 10))
        self.assertEqual(
            region.to_csv(),
            "dof_x,dof_theta\n0,0\n2,0\n2,3.5\n1.5,4\n0,4\n",
        )
        data = region.to_dict()
        self.assertEqual(data["vertices"][-1], [0.0, 4.0])
        self.assertEqual(data["constraints"][2], {"a": 1.0, "b": 1.0, "c": 5.5})


class SisoRateTests(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(siso_rate_approx(KIND_NONCOHERENT, 4.0), 1.0 - 0.69)
        self.assertAlmostEqual(siso_rate_approx(KIND_CONSTANT_ENVELOPE, 1.0, 1.0), 1.1)

    def test_half_slope(self):
        for kind in (KIND_NONCOHERENT, KIND_CONSTANT_ENVELOPE):
            low, high = siso_rate_approx(kind, 100.0), siso_rate_approx(kind, 1000.0)
            self.assertAlmostEqual((high - low) / math.log2(10.0), 0.5)

    def test_errors(self):
        with self.assertRaises(ArgumentError):
            siso_rate_approx(KIND_NONCOHERENT, 0.0)
        with self.assertRaises(ArgumentError):
            siso_rate_approx(KIND_CONSTANT_ENVELOPE, 1.0, 0.0)
        with self.assertRaises(ArgumentError):
            siso_rate_approx("other", 1.0)


class ExpectedTransitionTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(expected_transition(2, 4, direct=False), 5)
        self.assertEqual(expected_transition(2, 4, direct=True), 4)
        self.assertEqual(expected_transition(2, 8, direct=False), 13)

    def test_full_rank_channel(self):
        with self.assertRaises(ArgumentError):
            expected_transition(4, 2, direct=False)

import numpy as np
from django.test import SimpleTestCase

from ris_app.channel import (
    PhaseVector,
    RisChannel,
    absorb_direct_path,
    apply,
    channel_from_dict,
    channel_to_dict,
    effective_channel,
    sample_channel,
    sample_noise,
)
from ris_app.exceptions import ArgumentError, DimensionError
from ris_app.numerics import Rng

from .factories import random_channel, random_phase, random_x, scalar_channel


class RisChannelTests(SimpleTestCase):
    def test_dimensions(self):
        ch = random_channel(0, 2, 5, 4)
        self.assertEqual((ch.m, ch.n, ch.k), (2, 5, 4))
        self.assertFalse(ch.has_direct_path)

    def test_nonconforming_matrices(self):
        with self.assertRaises(DimensionError):
            RisChannel(h=np.ones((2, 3)), g=np.ones((4, 1)), f=np.zeros((2, 1)))
        with self.assertRaises(DimensionError):
            RisChannel(h=np.ones((2, 3)), g=np.ones((3, 1)), f=np.zeros((3, 1)))

    def test_negative_power_or_noise(self):
        with self.assertRaises(ArgumentError):
            RisChannel(h=[[1.0]], g=[[1.0]], f=[[0.0]], power=-1.0)
        with self.assertRaises(ArgumentError):
            RisChannel(h=[[1.0]], g=[[1.0]], f=[[0.0]], noise_variance=-0.5)

    def test_matrices_are_read_only(self):
        ch = random_channel(1, 1, 2, 2)
        with self.assertRaises(ValueError):
            ch.h[0, 0] = 0


class ApplyTests(SimpleTestCase):
    def test_identity_phases(self):
        ch = random_channel(2, 2, 3, 4, power=4.0)
        x = random_x(Rng(5), 2)
        expected = 2.0 * ch.h @ ch.g @ x
        np.testing.assert_allclose(apply(ch, PhaseVector.ones(3), x), expected, atol=1e-12)

    def test_zero_power_returns_noise(self):
        ch = random_channel(3, 2, 3, 4, power=0.0)
        noise = sample_noise(Rng(6), 4, 1.0)
        np.testing.assert_array_equal(apply(ch, random_phase(Rng(7), 3), random_x(Rng(8), 2), noise), noise)

    def test_scalar_quarter_turn(self):
        y = apply(scalar_channel(), PhaseVector.from_angles([np.pi / 2]), [1.0])
        self.assertAlmostEqual(complex(y[0]), 1j, places=12)

    def test_dimension_mismatch(self):
        ch = random_channel(4, 2, 3, 4)
        with self.assertRaises(DimensionError):
            apply(ch, PhaseVector.ones(3), np.ones(3))
        with self.assertRaises(DimensionError):
            apply(ch, PhaseVector.ones(2), np.ones(2))

    def test_cascaded_matches_apply(self):
        ch = random_channel(5, 2, 4, 3, direct_path=True, power=2.0)
        phase = random_phase(Rng(1), 4)
        x = random_x(Rng(2), 2)
        np.testing.assert_allclose(ch.amplitude * ch.cascaded(phase) @ x, apply(ch, phase, x), atol=1e-12)


    def test_product_is_associative(self):
        for i in range(20):
            ch = random_channel(30 + i, 3, 6, 4, direct_path=True)
            phase = random_phase(Rng(40, (i,)), 6)
            x = random_x(Rng(41, (i,)), 3)
            grouped_left = ch.cascaded(phase) @ x
            grouped_right = ch.h @ (phase.phi * (ch.g @ x)) + ch.f @ x
            self.assertLess(np.max(np.abs(grouped_left - grouped_right)), 1e-12)


class PhaseVectorTests(SimpleTestCase):
    def test_angle_round_trip_modulo_two_pi(self):
        theta = Rng(17).uniform(-10.0, 10.0, 200)
        back = PhaseVector.from_unit(PhaseVector.from_angles(theta).phi).theta
        wrapped = np.angle(np.exp(1j * (back - theta)))
        self.assertLess(np.max(np.abs(wrapped)), 1e-12)
        self.assertTrue(np.all(np.abs(back) <= np.pi))

    def test_fixed_tail(self):
        phase = PhaseVector.from_angles([0.3, -1.2]).with_fixed_tail(2)
        np.testing.assert_allclose(phase.phi[2:], [1.0, 1.0])
        self.assertEqual(phase.n, 4)


class EffectiveChannelTests(SimpleTestCase):
    def test_zero_x(self):
        ch = random_channel(6, 2, 3, 4)
        np.testing.assert_array_equal(effective_channel(ch, np.zeros(2)), np.zeros((4, 3)))

    def test_scalar(self):
        ch = RisChannel(h=[[2.0]], g=[[3.0]], f=[[0.0]])
        np.testing.assert_allclose(effective_channel(ch, [1.0]), [[6.0]])

    def test_linear_in_phases(self):
        ch = random_channel(7, 3, 5, 4)
        x = random_x(Rng(3), 3)
        phase = random_phase(Rng(4), 5)
        np.testing.assert_allclose(
            ch.amplitude * effective_channel(ch, x) @ phase.phi, apply(ch, phase, x), atol=1e-12
        )


class AbsorbDirectPathTests(SimpleTestCase):
    def test_no_direct_path(self):
        ch = random_channel(8, 2, 3, 4)
        absorbed, r = absorb_direct_path(ch)
        self.assertIs(absorbed, ch)
        self.assertEqual(r, 0)

    def test_full_rank_bookkeeping(self):
        ch = random_channel(9, 2, 3, 2, direct_path=True)
        absorbed, r = absorb_direct_path(ch)
        self.assertEqual(r, 2)
        self.assertEqual(absorbed.n, 5)
        self.assertFalse(absorbed.has_direct_path)

    def test_reformulation_reproduces_output(self):
        for instance in range(100):
            rng = Rng(21, (instance,))
            r = 1 + instance % 2
            m, n, k = 3, 4, 3
            ch = random_channel(instance, m, n, k)
            u = rng.child(0).normal((k, r)) + 1j * rng.child(1).normal((k, r))
            v = rng.child(2).normal((r, m)) + 1j * rng.child(3).normal((r, m))
            ch = RisChannel(h=ch.h, g=ch.g, f=u @ v, power=ch.power)
            absorbed, rank = absorb_direct_path(ch)
            self.assertEqual(rank, r)
            for point in range(50):
                phase = random_phase(rng.child(4, point), n)
                x = random_x(rng.child(5, point), m)
                original = apply(ch, phase, x)
                reformulated = apply(absorbed, phase.with_fixed_tail(rank), x)
                self.assertLessEqual(
                    np.linalg.norm(original - reformulated), 1e-10 * (1 + np.linalg.norm(x))
                )


class SampleChannelTests(SimpleTestCase):
    def test_no_direct_path_is_exact_zero(self):
        ch = sample_channel(Rng(1), 2, 3, 4, direct_path=False)
        self.assertFalse(np.any(ch.f))

    def test_reproducible(self):
        a = sample_channel(Rng(5, (1, 2)), 2, 3, 4, direct_path=True)
        b = sample_channel(Rng(5, (1, 2)), 2, 3, 4, direct_path=True)
        np.testing.assert_array_equal(a.h, b.h)
        np.testing.assert_array_equal(a.f, b.f)

    def test_entry_power(self):
        ch = sample_channel(Rng(13), 1, 100, 100)
        power = float(np.mean(np.abs(ch.h) ** 2))
        self.assertGreaterEqual(power, 0.97)
        self.assertLessEqual(power, 1.03)


class ChannelJsonTests(SimpleTestCase):
    def test_round_trip(self):
        ch = random_channel(14, 2, 3, 4, direct_path=True, power=10.0)
        back = channel_from_dict(channel_to_dict(ch))
        np.testing.assert_array_equal(back.h, ch.h)
        np.testing.assert_array_equal(back.g, ch.g)
        np.testing.assert_array_equal(back.f, ch.f)
        self.assertEqual(back.power, 10.0)

    def test_wrong_entry_count(self):
        data = channel_to_dict(random_channel(15, 1, 2, 2))
        data["h"] = data["h"][:-1]
        with self.assertRaises(DimensionError):
            channel_from_dict(data)

    def test_missing_dimensions(self):
        with self.assertRaises(DimensionError):
            channel_from_dict({"h": []})

import math

import numpy as np
import pytest

from pencilcrt.errors import (
    DegenerateBasisError,
    InsufficientSamplesError,
    OrderDeficientError,
)
from pencilcrt.matrix_pencil import (
    PencilConfig,
    build_pencil,
    estimate_amplitudes,
    solve_pencil,
)
from pencilcrt.signal_model import SampledStream, SignalSpec, Tone, add_awgn, synthesize


def make_stream(samples, rate=1.0):
    return SampledStream(rate_hz=rate, samples=np.asarray(samples, dtype=complex))


class TestBuildPencil:
    def test_definitional_layout(self):
        pencil = build_pencil(make_stream([1, 2, 3, 4, 5, 6]), 2)
        np.testing.assert_array_equal(pencil.x_left, [[1, 2], [2, 3], [3, 4], [4, 5]])
        np.testing.assert_array_equal(pencil.x_right, [[2, 3], [3, 4], [4, 5], [5, 6]])

    def test_constant_samples_are_rank_one(self):
        pencil = build_pencil(make_stream([3.0, 3.0, 3.0, 3.0]), 1)
        assert np.linalg.matrix_rank(pencil.x_left) == 1
        assert np.linalg.matrix_rank(pencil.x_right) == 1

    def test_single_exponential_is_numerically_rank_one(self):
        z = np.exp(1j * math.pi / 4)
        pencil = build_pencil(make_stream(z ** np.arange(16)), 5)
        s = np.linalg.svd(pencil.x_left, compute_uv=False)
        assert s[1] < 1e-10 * s[0]

    def test_hankel_antidiagonal_constancy_exact(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        pencil = build_pencil(make_stream(x), 13)
        rows, cols = pencil.x_left.shape
        for r in range(rows):
            for c in range(cols):
                assert pencil.x_left[r, c] == x[r + c]
                assert pencil.x_right[r, c] == x[r + c + 1]

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamplesError):
            build_pencil(make_stream([1, 2, 3]), 3)


class TestSolvePencil:
    def test_single_tone_exact_recovery(self):
        spec = SignalSpec([Tone(20.0, 2.0, math.pi / 4)])
        stream = synthesize(spec, 100.0, 64)
        (comp,) = solve_pencil(stream, PencilConfig(model_order=1))
        assert abs(comp.alias_freq_hz - 20.0) < 1e-9
        assert abs(comp.amplitude - 2.0) < 1e-9
        assert abs(comp.phase_rad - math.pi / 4) < 1e-9
        assert abs(abs(comp.pole) - 1.0) < 1e-9

    def test_all_zero_stream_auto_order(self):
        stream = make_stream(np.zeros(32), rate=100.0)
        assert solve_pencil(stream, PencilConfig()) == []

    def test_all_zero_stream_explicit_order_is_order_deficient(self):
        stream = make_stream(np.zeros(32), rate=100.0)
        with pytest.raises(OrderDeficientError) as err:
            solve_pencil(stream, PencilConfig(model_order=2))
        assert err.value.achieved == 0

    def test_order_deficiency_reports_achieved_rank(self):
        stream = synthesize(SignalSpec([Tone(10.0, 1.0)]), 100.0, 64)
        with pytest.raises(OrderDeficientError) as err:
            solve_pencil(stream, PencilConfig(model_order=3))
        assert err.value.achieved == 1
        assert err.value.requested == 3

    def test_super_resolution_below_fft_bin(self):
        # 128-point record at 100 Hz: bin width 0.78 Hz; tones 0.5 Hz apart
        spec = SignalSpec([Tone(10.0, 1.0, 0.3), Tone(10.5, 0.8, -1.0)])
        stream = synthesize(spec, 100.0, 128)
        comps = solve_pencil(stream, PencilConfig(model_order=2))
        assert len(comps) == 2
        assert abs(comps[0].alias_freq_hz - 10.0) < 1e-6
        assert abs(comps[1].alias_freq_hz - 10.5) < 1e-6

    def test_auto_order_via_svd_threshold(self):
        spec = SignalSpec([Tone(11.0, 1.0, 0.1), Tone(37.0, 0.9, 1.0), Tone(61.0, 1.2, -2.0)])
        stream = synthesize(spec, 100.0, 96)
        comps = solve_pencil(stream, PencilConfig())
        assert len(comps) == 3

    def test_aliased_tone_observed_at_fold(self):
        stream = synthesize(SignalSpec([Tone(250.0, 1.0, 0.0)]), 100.0, 64)
        (comp,) = solve_pencil(stream, PencilConfig(model_order=1))
        assert abs(comp.alias_freq_hz - 50.0) < 1e-9

    def test_output_sorted_by_alias(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            freqs = np.sort(rng.uniform(1, 95, 4))
            if np.min(np.diff(freqs)) < 2.0:
                continue
            spec = SignalSpec([Tone(f, 1.0 + 0.1 * i, 0.1 * i) for i, f in enumerate(freqs)])
            comps = solve_pencil(synthesize(spec, 100.0, 128), PencilConfig(model_order=4))
            aliases = [c.alias_freq_hz for c in comps]
            assert aliases == sorted(aliases)

    def test_too_few_samples_for_order(self):
        stream = synthesize(SignalSpec([Tone(10.0, 1.0)]), 100.0, 5)
        with pytest.raises(InsufficientSamplesError):
            solve_pencil(stream, PencilConfig(model_order=2))


class TestPencilProperties:
    def rand_spec(self, rng, m):
        freqs = np.sort(rng.uniform(2, 95, m))
        while np.min(np.diff(freqs), initial=np.inf) < 2.0:
            freqs = np.sort(rng.uniform(2, 95, m))
        return SignalSpec(
            [Tone(f, rng.uniform(0.5, 2.0), rng.uniform(-3.1, 3.1)) for f in freqs]
        )

    def test_noiseless_poles_on_unit_circle(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            m = int(rng.integers(1, 5))
            spec = self.rand_spec(rng, m)
            stream = synthesize(spec, 100.0, 96)
            comps = solve_pencil(stream, PencilConfig(model_order=m))
            assert len(comps) == m
            for c in comps:
                assert abs(abs(c.pole) - 1.0) < 1e-9

    def test_conjugation_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            m = int(rng.integers(1, 4))
            spec = self.rand_spec(rng, m)
            stream = synthesize(spec, 100.0, 96)
            conj_stream = SampledStream(100.0, np.conj(stream.samples))
            comps = solve_pencil(stream, PencilConfig(model_order=m))
            conj_comps = solve_pencil(conj_stream, PencilConfig(model_order=m))
            poles = sorted((c.pole for c in comps), key=lambda z: (z.real, z.imag))
            conj_poles = sorted(
                (np.conj(c.pole) for c in conj_comps), key=lambda z: (z.real, z.imag)
            )
            for z, zc in zip(poles, conj_poles):
                assert abs(z - zc) < 1e-9
            by_amp = sorted(comps, key=lambda c: c.amplitude)
            conj_by_amp = sorted(conj_comps, key=lambda c: c.amplitude)
            for a, b in zip(by_amp, conj_by_amp):
                assert abs(a.amplitude - b.amplitude) < 1e-9
                assert abs(math.cos(a.phase_rad) - math.cos(-b.phase_rad)) < 1e-9
                assert abs(math.sin(a.phase_rad) - math.sin(-b.phase_rad)) < 1e-9

    def test_rank_sanity_m_singular_values(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            m = int(rng.integers(1, 6))
            spec = self.rand_spec(rng, m)
            stream = synthesize(spec, 100.0, 120)
            pencil = build_pencil(stream, 40)
            s = np.linalg.svd(pencil.x_left, compute_uv=False)
            assert int(np.count_nonzero(s > 1e-8 * s[0])) == m

    def test_noisy_order_still_recovered_with_gate(self):
        spec = SignalSpec([Tone(20.0, 1.0, 0.0), Tone(60.0, 1.5, 1.0)])
        stream = synthesize(spec, 100.0, 256)
        noisy = add_awgn(stream, 40.0, seed=0)
        comps = solve_pencil(noisy, PencilConfig(model_order=2, unit_circle_tol=0.1))
        assert len(comps) == 2


class TestEstimateAmplitudes:
    def test_known_tone(self):
        n = np.arange(64)
        samples = 3.0 * np.exp(1j * (2 * math.pi * 0.25 * n + math.pi / 3))
        stream = make_stream(samples, rate=1.0)
        ((amp, phase),) = estimate_amplitudes(stream, [0.25])
        assert abs(amp - 3.0) < 1e-10
        assert abs(phase - math.pi / 3) < 1e-10

    def test_zero_stream_reports_zero_amplitude(self):
        stream = make_stream(np.zeros(16), rate=1.0)
        ((amp, phase),) = estimate_amplitudes(stream, [0.1])
        assert amp == 0.0
        assert phase == 0.0

    def test_two_tone_round_trip(self):
        spec = SignalSpec([Tone(12.0, 1.3, 0.7), Tone(43.0, 0.4, -2.1)])
        stream = synthesize(spec, 100.0, 80)
        fits = estimate_amplitudes(stream, [12.0, 43.0])
        assert abs(fits[0][0] - 1.3) < 1e-9
        assert abs(fits[0][1] - 0.7) < 1e-9
        assert abs(fits[1][0] - 0.4) < 1e-9
        assert abs(fits[1][1] + 2.1) < 1e-9

    def test_duplicate_frequencies_rejected(self):
        stream = make_stream(np.ones(16), rate=100.0)
        with pytest.raises(DegenerateBasisError):
            estimate_amplitudes(stream, [10.0, 10.0 + 1e-12])

    def test_phase_referenced_to_absolute_index_zero(self):
        spec = SignalSpec([Tone(5.0, 1.0, 1.1)])
        tail = synthesize(spec, 100.0, 64, start_index=32)
        ((amp, phase),) = estimate_amplitudes(tail, [5.0])
        assert abs(amp - 1.0) < 1e-9
        assert abs(phase - 1.1) < 1e-9

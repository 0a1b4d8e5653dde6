import itertools
import math

import numpy as np
import pytest

from pencilcrt.dealias import (
    DealiasConfig,
    PairedComponent,
    crt_integer,
    pair_components,
    resolve_frequency,
    unambiguous_range,
)
from pencilcrt.errors import (
    AmbiguousFrequencyError,
    InvalidComponentError,
    NoCandidateError,
    PairingSizeError,
)
from pencilcrt.matrix_pencil import AliasedComponent
from pencilcrt.signal_model import alias_of, phase_distance


def comp(alias, amp, phase):
    pole = np.exp(1j * 2 * math.pi * alias)
    return AliasedComponent(alias_freq_hz=alias, amplitude=amp, phase_rad=phase, pole=pole)


def brute_force_matching(set1, set2, cfg):
    """Oracle: exhaustive search over all m! assignments."""
    m = len(set1)
    best_cost, best_perm = math.inf, None
    for perm in itertools.permutations(range(m)):
        cost = sum(
            cfg.amp_weight * abs(math.log(set1[i].amplitude / set2[j].amplitude))
            + cfg.phase_weight * phase_distance(set1[i].phase_rad, set2[j].phase_rad)
            for i, j in enumerate(perm)
        )
        if cost < best_cost:
            best_cost, best_perm = cost, perm
    return best_cost, best_perm


class TestPairing:
    cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=10)

    def test_identical_sets_pair_at_zero_cost(self):
        set1 = [comp(1.0, 1.5, 0.3), comp(2.0, 0.7, -1.0), comp(3.0, 2.0, 2.0)]
        pairs = pair_components(set1, list(set1), self.cfg)
        assert sum(p.match_cost for p in pairs) == pytest.approx(0.0)
        for p in pairs:
            assert p.chan1.alias_freq_hz == p.chan2.alias_freq_hz

    def test_permuted_sets_recover_inverse_permutation(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            m = int(rng.integers(2, 7))
            amps = rng.uniform(0.5, 2.0, m)
            phases = rng.uniform(-3.1, 3.1, m)
            set1 = [comp(float(i), float(a), float(p)) for i, (a, p) in enumerate(zip(amps, phases))]
            perm = rng.permutation(m)
            set2 = [comp(float(10 + j), set1[i].amplitude, set1[i].phase_rad)
                    for j, i in enumerate(perm)]
            pairs = pair_components(set1, set2, self.cfg)
            for p in pairs:
                i = int(p.chan1.alias_freq_hz)
                j = int(p.chan2.alias_freq_hz) - 10
                assert perm[j] == i

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            m = int(rng.integers(1, 7))
            set1 = [comp(float(i), float(rng.uniform(0.5, 2)), float(rng.uniform(-3, 3)))
                    for i in range(m)]
            set2 = [comp(float(i), float(rng.uniform(0.5, 2)), float(rng.uniform(-3, 3)))
                    for i in range(m)]
            pairs = pair_components(set1, set2, self.cfg)
            total = sum(p.match_cost for p in pairs)
            oracle_cost, _ = brute_force_matching(set1, set2, self.cfg)
            assert total <= oracle_cost + 1e-12

    def test_equal_amplitudes_pair_by_phase(self):
        set1 = [comp(1.0, 1.0, -2.0), comp(2.0, 1.0, 0.0), comp(3.0, 1.0, 2.0)]
        set2 = [comp(4.0, 1.0, 2.1), comp(5.0, 1.0, -1.9), comp(6.0, 1.0, 0.2)]
        pairs = pair_components(set1, set2, self.cfg)
        matching = {p.chan1.alias_freq_hz: p.chan2.alias_freq_hz for p in pairs}
        assert matching == {1.0: 5.0, 2.0: 6.0, 3.0: 4.0}

    def test_size_mismatch_raises(self):
        set1 = [comp(1.0, 1.0, 0.0)]
        set2 = [comp(1.0, 1.0, 0.0), comp(2.0, 1.0, 0.0)]
        with pytest.raises(PairingSizeError):
            pair_components(set1, set2, self.cfg)

    def test_empty_sets_raise(self):
        with pytest.raises(PairingSizeError):
            pair_components([], [], self.cfg)

    def test_nonfinite_cost_raises(self):
        bad = AliasedComponent(alias_freq_hz=1.0, amplitude=1.0, phase_rad=math.nan, pole=1 + 0j)
        with pytest.raises(InvalidComponentError):
            pair_components([bad], [comp(1.0, 1.0, 0.0)], self.cfg)


class TestResolveFrequency:
    cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=10)

    @staticmethod
    def brute_force_candidates(alias1, alias2, r1, r2, n, tol):
        """Oracle: scan every (k1, k2) pair."""
        out = []
        for k1 in range(n + 1):
            for k2 in range(n + 1):
                v1, v2 = k1 * r1 + alias1, k2 * r2 + alias2
                if abs(v1 - v2) <= tol:
                    out.append((k1, k2, (v1 + v2) / 2))
        return out

    def pair(self, alias1, alias2, amp=1.0, phase=0.5):
        return PairedComponent(
            chan1=comp(alias1, amp, phase), chan2=comp(alias2, amp, phase), match_cost=0.0
        )

    def test_true_frequency_30(self):
        cands = self.brute_force_candidates(2.0, 6.0, 7.0, 8.0, 10, 1e-9)
        assert cands == [(4, 3, 30.0)]
        tone = resolve_frequency(self.pair(2.0, 6.0), self.cfg)
        assert tone.freq_hz == pytest.approx(30.0)
        assert (tone.k1, tone.k2) == (4, 3)
        assert tone.residual_hz == pytest.approx(0.0)

    def test_k_zero_zone(self):
        # n = 7 keeps the search window [0, 56) inside the unambiguous range
        cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=7)
        tone = resolve_frequency(self.pair(3.0, 3.0), cfg)
        assert tone.freq_hz == pytest.approx(3.0)
        assert (tone.k1, tone.k2) == (0, 0)

    def test_window_past_unambiguous_range_is_flagged(self):
        # with n = 10 the window reaches 77 > lcm(7, 8): 3 and 3 + 56 = 59
        # are both consistent, so resolution must report the ambiguity
        with pytest.raises(AmbiguousFrequencyError) as err:
            resolve_frequency(self.pair(3.0, 3.0), self.cfg)
        assert err.value.candidates == (3.0, 59.0)

    def test_ambiguity_beyond_unambiguous_range(self):
        cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=12)
        cands = self.brute_force_candidates(2.0, 6.0, 7.0, 8.0, 12, 1e-9)
        assert [c[2] for c in cands] == [30.0, 86.0]
        with pytest.raises(AmbiguousFrequencyError) as err:
            resolve_frequency(self.pair(2.0, 6.0), cfg)
        assert err.value.candidates == (30.0, 86.0)

    def test_no_candidate_when_tolerance_too_tight(self):
        pair = self.pair(2.0, 6.3)
        with pytest.raises(NoCandidateError):
            resolve_frequency(pair, self.cfg)

    def test_noisy_aliases_resolve_within_tolerance(self):
        cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=10,
                            freq_match_tol_hz=0.1)
        tone = resolve_frequency(self.pair(2.03, 5.98), cfg)
        assert (tone.k1, tone.k2) == (4, 3)
        assert tone.freq_hz == pytest.approx((30.03 + 29.98) / 2)
        assert tone.residual_hz == pytest.approx(0.05)

    def test_channel_swap_symmetry(self):
        fwd = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=10,
                            freq_match_tol_hz=0.1)
        rev = DealiasConfig(rate1_hz=8.0, rate2_hz=7.0, max_fold_index_n=10,
                            freq_match_tol_hz=0.1)
        a = resolve_frequency(self.pair(2.02, 6.01), fwd)
        b = resolve_frequency(
            PairedComponent(chan1=comp(6.01, 1.0, 0.5), chan2=comp(2.02, 1.0, 0.5),
                            match_cost=0.0),
            rev,
        )
        assert abs(a.freq_hz - b.freq_hz) < 1e-12
        assert (a.k1, a.k2) == (b.k2, b.k1)

    def test_amplitude_and_phase_are_cross_channel_means(self):
        pair = PairedComponent(
            chan1=comp(2.0, 1.0, 0.4), chan2=comp(6.0, 2.0, 0.6), match_cost=0.0
        )
        tone = resolve_frequency(pair, self.cfg)
        assert tone.amplitude == pytest.approx(1.5)
        assert tone.phase_rad == pytest.approx(0.5)

    def test_phase_mean_respects_wraparound(self):
        pair = PairedComponent(
            chan1=comp(2.0, 1.0, math.pi - 0.05),
            chan2=comp(6.0, 1.0, -math.pi + 0.05),
            match_cost=0.0,
        )
        tone = resolve_frequency(pair, self.cfg)
        # circular mean of pi-0.05 and -pi+0.05 is pi (wrapped to -pi), not 0
        assert phase_distance(tone.phase_rad, math.pi) < 1e-12

    def test_exhaustive_crt_equivalence_rates_7_8(self):
        cfg = DealiasConfig(rate1_hz=7.0, rate2_hz=8.0, max_fold_index_n=7,
                            freq_match_tol_hz=1e-6)
        for f in range(56):
            pair = self.pair(alias_of(f, 7.0), alias_of(f, 8.0))
            tone = resolve_frequency(pair, cfg)
            assert tone.freq_hz == pytest.approx(float(f), abs=1e-9)
            assert crt_integer([f % 7, f % 8], [7, 8]) == f


class TestCrtInteger:
    def test_examples(self):
        assert crt_integer([2, 3], [3, 5]) == 8
        assert crt_integer([0, 0], [7, 9]) == 0
        assert crt_integer([1, 3], [2, 5]) == 3

    def test_brute_force_oracle_random_instances(self):
        rng = np.random.default_rng(99)
        primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
        for _ in range(1000):
            count = int(rng.integers(2, 5))
            moduli = list(rng.choice(primes, size=count, replace=False))
            moduli = [int(m) for m in moduli]
            residues = [int(rng.integers(0, m)) for m in moduli]
            x = crt_integer(residues, moduli)
            prod = math.prod(moduli)
            assert 0 <= x < prod
            # oracle: every congruence satisfied by direct reduction
            for r, m in zip(residues, moduli):
                assert x % m == r

    def test_uniqueness_against_full_scan(self):
        rng = np.random.default_rng(100)
        for _ in range(50):
            m1, m2 = 4, 9
            r1, r2 = int(rng.integers(0, m1)), int(rng.integers(0, m2))
            x = crt_integer([r1, r2], [m1, m2])
            scan = [v for v in range(m1 * m2) if v % m1 == r1 and v % m2 == r2]
            assert scan == [x]

    def test_non_coprime_moduli_rejected(self):
        with pytest.raises(ValueError):
            crt_integer([1, 2], [4, 6])

    def test_residue_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            crt_integer([3, 0], [3, 5])


class TestUnambiguousRange:
    def test_examples(self):
        assert unambiguous_range(7.0, 8.0) == pytest.approx(56.0)
        assert unambiguous_range(100.0, 100.0) == pytest.approx(100.0)
        assert unambiguous_range(101.0, 103.0) == pytest.approx(10403.0)

    def test_non_integer_rates_on_declared_grid(self):
        assert unambiguous_range(0.7, 0.8, grid_hz=0.1) == pytest.approx(5.6)

    def test_off_grid_rate_rejected(self):
        with pytest.raises(ValueError):
            unambiguous_range(7.05, 8.0, grid_hz=1.0)

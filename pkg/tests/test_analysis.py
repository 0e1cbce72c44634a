import math
import random
from fractions import Fraction

import numpy as np
import pytest

from dmac import analysis
from dmac.errors import ParameterError
from dmac.field import PrimeModulus
from dmac.graph import Vertex, VertexKind
from dmac.mac import (
    MacKey,
    MacParams,
    Tag,
    TagMode,
    Variant,
    default_profile,
    girth_formula,
    keygen,
)


def tiny_profile(variant=Variant.DMAC2) -> MacParams:
    return MacParams(
        q=5,
        block_bits=3,
        n=3,
        modulus=PrimeModulus(5),
        tag_bits=9,
        variant=variant,
        allow_small_modulus=True,
    )


def tiny_key(params, coords=(1, 2, 3), password=()):
    return MacKey(Vertex(VertexKind.POINT, coords, params.modulus), password)


class TestOracle:
    def test_d2_3_counts(self):
        oracle = analysis.build_oracle(2, 3)
        assert oracle.vertex_count == 18
        assert oracle.edge_count == 27

    def test_d3_3_counts(self):
        oracle = analysis.build_oracle(3, 3)
        assert oracle.vertex_count == 54
        assert oracle.edge_count == 81

    def test_d6_2_counts(self):
        assert analysis.build_oracle(6, 2).vertex_count == 128

    def test_guardrail(self):
        with pytest.raises(ParameterError):
            analysis.build_oracle(8, 7, guardrail=1000)


class TestGirth:
    @pytest.mark.parametrize(
        "n,q,expected",
        [(2, 3, 6), (3, 3, 8), (2, 5, 6), (2, 2, 8), (4, 3, 12)],
    )
    def test_exact_values(self, n, q, expected):
        girth = analysis.measure_girth(analysis.build_oracle(n, q))
        assert girth == expected
        assert girth >= girth_formula(n)

    def test_forest_reports_infinite(self):
        # path on 4 vertices
        adjacency = [[1], [0, 2], [1, 3], [2]]
        assert analysis._girth_of_adjacency(adjacency) == math.inf

    def test_triangle(self):
        adjacency = [[1, 2], [0, 2], [0, 1]]
        assert analysis._girth_of_adjacency(adjacency) == 3

    def test_two_cycles(self):
        # a 4-cycle and a 6-cycle sharing nothing
        adjacency = [
            [1, 3], [0, 2], [1, 3], [2, 0],
            [5, 9], [4, 6], [5, 7], [6, 8], [7, 9], [8, 4],
        ]
        assert analysis._girth_of_adjacency(adjacency) == 4


class TestStructure:
    @pytest.mark.parametrize("n,q", [(2, 3), (3, 3), (2, 5), (3, 5), (4, 3)])
    def test_regular_bipartite(self, n, q):
        report = analysis.structure_checks(analysis.build_oracle(n, q))
        assert report.regular and report.degree == q
        assert report.bipartite
        assert report.vertex_count == 2 * q**n
        assert report.edge_count == q ** (n + 1)

    def test_small_dimensions_connected(self):
        for n, q in [(2, 3), (3, 3), (2, 5), (3, 5), (4, 3)]:
            assert analysis.structure_checks(analysis.build_oracle(n, q)).components == 1

    def test_d6_2_disconnected(self):
        report = analysis.structure_checks(analysis.build_oracle(6, 2))
        assert report.components > 1
        assert report.components == 8  # observed count, reported not asserted upstream


class TestSpectrum:
    @pytest.mark.parametrize("q", [3, 5, 7])
    def test_second_eigenvalue_bound(self, q):
        report = analysis.spectrum(analysis.build_oracle(2, q))
        assert report.top == pytest.approx(q, abs=1e-9)
        assert abs(report.second) <= 2 * math.sqrt(q) + 1e-6
        assert report.within_bound

    def test_bipartite_symmetry(self):
        report = analysis.spectrum(analysis.build_oracle(2, 5))
        assert report.symmetric

    def test_eigenpair_residual(self):
        # residual check on the reported second eigenvalue
        oracle = analysis.build_oracle(2, 5)
        count = oracle.vertex_count
        matrix = np.zeros((count, count))
        for i, nbrs in enumerate(oracle.adjacency):
            for j in nbrs:
                matrix[i, j] = 1.0
        values, vectors = np.linalg.eigh(matrix)
        report = analysis.spectrum(oracle)
        k = int(np.argmin(np.abs(values - report.second)))
        v = vectors[:, k]
        residual = np.linalg.norm(matrix @ v - values[k] * v)
        assert residual <= 1e-6 * np.linalg.norm(v)

    def test_known_small_values(self):
        # regression for the dense solve
        assert analysis.spectrum(analysis.build_oracle(2, 3)).second == pytest.approx(
            math.sqrt(3), abs=1e-9
        )
        assert analysis.spectrum(analysis.build_oracle(2, 5)).second == pytest.approx(
            math.sqrt(5), abs=1e-9
        )

    def test_guardrail(self):
        with pytest.raises(ParameterError):
            analysis.spectrum(analysis.build_oracle(3, 5), guardrail=100)

    def test_disconnected_top_multiplicity(self):
        report = analysis.spectrum(analysis.build_oracle(6, 2))
        # eight components, so eigenvalue q appears eight times
        assert int(np.sum(report.eigenvalues > 2 - 1e-6)) == 8
        assert report.second <= 2 - 1e-6


class TestCollisions:
    def test_d3_5_only_mirror_pairs(self):
        params = tiny_profile()
        report = analysis.brute_force_collisions(params, tiny_key(params), 2)
        assert report.messages_hashed == 30
        assert report.mirror_count == 30
        assert report.structural_count == 0

    def test_one_block_mirror_pairs_explicit(self):
        params = tiny_profile()
        key = tiny_key(params)
        report = analysis.brute_force_collisions(params, key, 1)
        # from iv[0] = 1 the reflection is t' = -2 - t mod 5: {0,3} and {1,2}
        pairs = {
            tuple(sorted((p.message_a[0], p.message_b[0]))) for p in report.pairs
        }
        assert pairs == {(0, 3), (1, 2)}
        assert all(p.kind == "mirror" for p in report.pairs)

    def test_dmac1_backtracking_shows_structural(self):
        # with a quadratic-residue first coordinate, two-step walks can
        # return to the start along different lines; DMAC-1 cannot tell
        # those apart, DMAC-2's accumulation can
        params = tiny_profile(variant=Variant.DMAC1)
        report = analysis.brute_force_collisions(params, tiny_key(params), 2)
        assert report.structural_count > 0
        params2 = tiny_profile(variant=Variant.DMAC2)
        report2 = analysis.brute_force_collisions(params2, tiny_key(params2), 2)
        assert report2.structural_count == 0

    def test_guardrail(self):
        params = default_profile()
        key = keygen(params, 1, entropy=random.Random(0).randbytes)
        with pytest.raises(ParameterError):
            analysis.brute_force_collisions(params, key, 2)

    def test_password_steps_preserved(self):
        params = tiny_profile()
        report = analysis.brute_force_collisions(
            params, tiny_key(params, password=(3,)), 1
        )
        assert all(p.kind == "mirror" for p in report.pairs)


class TestMirrorMessage:
    def test_reflection_changes_block(self):
        params = default_profile()
        rng = random.Random(42)
        key = keygen(params, 4, entropy=rng.randbytes)
        msg = list(rng.randbytes(16))
        mirrored = analysis.mirror_message(msg, key, params, 2)
        assert mirrored is not None
        assert len(mirrored) == len(msg)
        assert mirrored[:8] == msg[:8]
        assert mirrored[12:] == msg[12:]

    def test_requires_positional_encoding(self):
        from dmac.mac import Encoding

        params = default_profile().with_overrides(encoding=Encoding.DECIMAL_CONCAT)
        key = keygen(params, 4, entropy=random.Random(1).randbytes)
        with pytest.raises(ParameterError):
            analysis.mirror_message([1, 2, 3, 4], key, params, 0)


class TestAvalanche:
    def test_default_profile_band(self):
        params = default_profile()
        rng = random.Random(7)
        key = keygen(params, 10, entropy=rng.randbytes)
        report = analysis.avalanche(params, key, trials=300, rng=rng)
        assert report.tag_bits == 256
        assert report.within_binomial_band()

    def test_identical_messages_distance_zero(self):
        from dmac.mac import dmac_bytes

        params = default_profile()
        rng = random.Random(8)
        key = keygen(params, 10, entropy=rng.randbytes)
        data = rng.randbytes(64)
        assert dmac_bytes(data, key, params).hamming(dmac_bytes(data, key, params)) == 0

    def test_requires_trials(self):
        params = default_profile()
        key = keygen(params, 10, entropy=random.Random(9).randbytes)
        with pytest.raises(ParameterError):
            analysis.avalanche(params, key, trials=0)


class TestBitStatistics:
    def test_random_tags_pass(self):
        params = default_profile().with_overrides(tag_mode=TagMode.MOD_POW2)
        rng = random.Random(10)
        key = keygen(params, 10, entropy=rng.randbytes)
        tags = analysis.generate_tags(params, key, 400, rng=rng)
        report = analysis.bit_statistics(params, tags)
        assert report.total_bits == 400 * 256
        assert report.ok
        assert not report.warnings

    def test_all_zero_stream_fails(self):
        params = default_profile().with_overrides(tag_mode=TagMode.MOD_POW2)
        tags = [Tag(0, 256)] * 400
        report = analysis.bit_statistics(params, tags)
        assert not report.monobit_pass
        assert not report.serial_pass
        assert not report.ok

    def test_alternating_stream_fails_serial(self):
        # perfect 0101... balance passes monobit but never produces the
        # pairs 00 and 11
        params = default_profile().with_overrides(tag_mode=TagMode.MOD_POW2)
        value = int("01" * 128, 2)
        tags = [Tag(value, 256)] * 400
        report = analysis.bit_statistics(params, tags)
        assert report.monobit_pass
        assert not report.serial_pass

    def test_biased_mode_warns(self):
        params = MacParams(
            q=257,
            block_bits=9,
            n=29,
            modulus=PrimeModulus(521),
            tag_bits=256,
            tag_mode=TagMode.MOD_Q,
        )
        tags = [Tag(0, 256)] * 100
        report = analysis.bit_statistics(params, tags)
        assert any("modq" in w or "biases" in w for w in report.warnings)

    def test_minimum_sample(self):
        params = default_profile()
        with pytest.raises(ParameterError):
            analysis.bit_statistics(params, [Tag(0, 256)] * 99)

    def test_bit_stream_packing(self):
        tags = [Tag(0b10110001, 8), Tag(0b0101, 4)]
        assert analysis.tag_bit_stream(tags) == bytes([0b10110001, 0b01010000])


class TestOpCounts:
    def test_matches_formula_for_both_variants(self):
        rng = random.Random(11)
        for _ in range(25):
            n = rng.randrange(2, 40)
            lq = rng.choice([1, 2, 4, 8])
            c = rng.randrange(1, 4)
            block_bits = lq * c
            modulus = PrimeModulus(
                {1: 2, 2: 5, 4: 17, 8: 257}[lq] if c == 1 else 65537
            )
            params = MacParams(
                q=1 << lq,
                block_bits=block_bits,
                n=n,
                modulus=modulus,
                tag_bits=n * lq,
                variant=rng.choice(list(Variant)),
                allow_small_modulus=True,
            )
            s = rng.randrange(0, min(5, params.max_password_length) + 1)
            key = MacKey(
                Vertex(
                    VertexKind.POINT,
                    tuple(rng.randrange(modulus.value) for _ in range(n)),
                    modulus,
                ),
                tuple(rng.randrange(params.q) for _ in range(s)),
            )
            blocks = rng.randrange(1, 30)
            message = [rng.randrange(params.q) for _ in range(blocks * c)]
            report = analysis.count_ops(message, key, params)
            numerator = 2 * n + 2 if params.variant is Variant.DMAC1 else 3 * n + 2
            assert report.measured_ops == numerator * (blocks + s)
            assert report.matches_formula
            assert report.per_bit_measured == Fraction(numerator, block_bits) * (
                1 + Fraction(s, blocks)
            )

    def test_single_block_small_walk(self):
        # one block, no password, three coordinates: 2*3+2 = 8 operations
        params = MacParams(
            q=32,
            block_bits=25,
            n=3,
            modulus=PrimeModulus(33554467),
            tag_bits=15,
            variant=Variant.DMAC1,
        )
        key = MacKey(Vertex(VertexKind.POINT, (5, 10, 27), params.modulus), ())
        report = analysis.count_ops([1, 2, 3, 4, 5], key, params)
        assert report.measured_ops == 8

    def test_per_bit_decreases_with_length(self):
        values = [
            analysis.per_bit_formula(32, 32, blocks, 10, Variant.DMAC2)
            for blocks in (10, 20, 40, 80)
        ]
        assert values == sorted(values, reverse=True)
        assert values[1] < values[0]

    def test_large_example_figure(self):
        # 2000-character message in 8-bit symbols, 32-bit blocks, 64-wide
        # walk, 10-symbol password: the classic per-bit estimate
        per_bit = analysis.per_bit_formula(64, 32, 500, 10, Variant.DMAC1)
        total = per_bit + analysis.final_reduction_per_bit(64, 2000 * 8)
        assert abs(float(total) - 4.14775) < 1e-3
        dmac2 = analysis.per_bit_formula(64, 32, 500, 10, Variant.DMAC2)
        assert abs(float(dmac2) - 6.18375) < 1e-3

    def test_report_surfaces_both_variants(self):
        params = tiny_profile()
        key = tiny_key(params)
        report = analysis.count_ops([1, 2, 3], key, params)
        assert report.per_bit_formula != report.per_bit_other_variant

    def test_short_password_correction_factor(self):
        # s=1 over 32768 blocks: factor 1 + 1/32768, exact to 6 decimals
        value = analysis.per_bit_formula(32, 32, 32768, 1, Variant.DMAC1)
        expected = (2 * 32 + 2) / 32 * (1 + 1 / 32768)
        assert abs(float(value) - expected) < 1e-6
        assert value == Fraction(66, 32) * (Fraction(32769, 32768))

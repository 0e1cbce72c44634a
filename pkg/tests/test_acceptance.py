"""Acceptance criteria, one test per criterion, one printed verdict each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
"""

import random
import time

from dmac import analysis
from dmac.field import PrimeModulus
from dmac.graph import Vertex, VertexKind, neighbor
from dmac.mac import (
    MacKey,
    MacParams,
    Tag,
    TagMode,
    Variant,
    default_profile,
    dmac,
    dmac_bytes,
    girth_formula,
    keygen,
    verify,
    walk_trace,
)


def report(number: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number:02d} {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, detail


def test_criterion_01_neighbor_vector():
    m = PrimeModulus(11)
    w = Vertex(VertexKind.POINT, (1, 8, 4, 2, 7, 0), m)
    got = neighbor(w, 3, 1)
    ok = got.coords == (5, 2, 6, 9, 5, 9) and got.kind is VertexKind.LINE
    report(1, ok, f"neighbor N_3 in D(6,11) -> {got.serialize()}")


def test_criterion_02_toy_walk_vector():
    q = PrimeModulus(33554467)
    params = MacParams(
        q=29, block_bits=25, n=3, modulus=q, tag_bits=15,
        variant=Variant.DMAC2,
    )
    key = MacKey(Vertex(VertexKind.POINT, (5, 10, 27), q), (26, 0, 24))
    trace = walk_trace([28140, 20198520, 112830240], key, params)
    expected = [
        (VertexKind.LINE, (20388289, 1278039, 6390199)),
        (VertexKind.POINT, (17802608, 23169852, 2257462)),
        (VertexKind.LINE, (31812583, 28043200, 12949176)),
    ]
    ok = all(
        trace[i + 1].vertex.kind is kind and trace[i + 1].vertex.coords == coords
        for i, (kind, coords) in enumerate(expected)
    )
    report(2, ok, "DMAC-2 walk over D(3,33554467) reproduces v_1, v_2, v_3 exactly")


def test_criterion_03_girth_floor():
    results = {}
    ok = True
    for n, q in ((2, 3), (3, 3), (2, 5)):
        girth = analysis.measure_girth(analysis.build_oracle(n, q))
        results[(n, q)] = girth
        ok = ok and girth >= girth_formula(n)
    detail = ", ".join(
        f"girth(D({n},{q})) = {g} >= {girth_formula(n)}" for (n, q), g in results.items()
    )
    report(3, ok, detail)


def test_criterion_04_structure():
    ok = True
    details = []
    for n, q in ((2, 3), (3, 3), (2, 5), (3, 5), (4, 3)):
        s = analysis.structure_checks(analysis.build_oracle(n, q))
        good = s.regular and s.degree == q and s.bipartite and s.vertex_count == 2 * q**n
        ok = ok and good
        details.append(f"D({n},{q}) ok" if good else f"D({n},{q}) BAD")
    s62 = analysis.structure_checks(analysis.build_oracle(6, 2))
    ok = ok and s62.components > 1
    details.append(f"D(6,2) components = {s62.components} > 1")
    report(4, ok, "; ".join(details))


def test_criterion_05_spectral_bound():
    ok = True
    details = []
    for q in (3, 5, 7):
        spec = analysis.spectrum(analysis.build_oracle(2, q))
        good = abs(spec.second) <= spec.bound + 1e-6 and spec.symmetric
        ok = ok and good
        details.append(f"lambda1(D(2,{q})) = {spec.second:.4f} <= {spec.bound:.4f}")
    report(5, ok, "; ".join(details))


def test_criterion_06_avalanche():
    rng = random.Random(60)
    ok = True
    details = []
    for variant in (Variant.DMAC1, Variant.DMAC2):
        params = default_profile().with_overrides(variant=variant)
        key = keygen(params, 10, entropy=rng.randbytes)
        rep = analysis.avalanche(params, key, trials=1000, rng=rng)
        good = 96 <= rep.mean_hamming <= 160
        ok = ok and good
        details.append(f"{variant.value}: mean {rep.mean_hamming:.2f} in [96, 160]")
    report(6, ok, "; ".join(details))


def test_criterion_07_bit_statistics():
    params = default_profile().with_overrides(tag_mode=TagMode.MOD_POW2)
    rng = random.Random(70)
    key = keygen(params, 10, entropy=rng.randbytes)
    count = -(-1_000_000 // params.tag_bits)
    tags = analysis.generate_tags(params, key, count, rng=rng)
    rep = analysis.bit_statistics(params, tags)
    ok = rep.total_bits >= 1_000_000 and rep.monobit_pass and rep.serial_pass
    report(
        7,
        ok,
        f"{rep.total_bits} bits: monobit z = {rep.monobit_z:.3f} <= 2.576, "
        f"serial chi2 = {rep.serial_chi2:.3f} <= 11.3449",
    )


def test_criterion_08_timing_formulas():
    rng = random.Random(80)
    ok = True
    checked = 0
    for _ in range(22):
        n = rng.randrange(2, 48)
        lq = rng.choice([2, 4, 8])
        c = rng.randrange(1, 4)
        params = MacParams(
            q=1 << lq,
            block_bits=lq * c,
            n=n,
            modulus=PrimeModulus(65537),
            tag_bits=n * lq,
            variant=rng.choice(list(Variant)),
            allow_small_modulus=True,
        )
        s = rng.randrange(0, min(6, params.max_password_length) + 1)
        key = MacKey(
            Vertex(
                VertexKind.POINT,
                tuple(rng.randrange(65537) for _ in range(n)),
                params.modulus,
            ),
            tuple(rng.randrange(params.q) for _ in range(s)),
        )
        blocks = rng.randrange(1, 25)
        message = [rng.randrange(params.q) for _ in range(blocks * c)]
        rep = analysis.count_ops(message, key, params)
        numerator = 2 * n + 2 if params.variant is Variant.DMAC1 else 3 * n + 2
        ok = ok and rep.measured_ops == numerator * (blocks + s) and rep.matches_formula
        checked += 1
    per_bit = analysis.per_bit_formula(64, 32, 500, 10, Variant.DMAC1)
    figure = float(per_bit + analysis.final_reduction_per_bit(64, 2000 * 8))
    ok = ok and abs(figure - 4.14775) < 1e-3
    report(
        8,
        ok,
        f"{checked} random profiles match (2n+2)(l+s) / (3n+2)(l+s); "
        f"large-message estimate {figure:.5f} within 1e-3 of 4.14775",
    )


def test_criterion_09_collision_oracle():
    params = MacParams(
        q=5, block_bits=3, n=3, modulus=PrimeModulus(5), tag_bits=9,
        variant=Variant.DMAC2, allow_small_modulus=True,
    )
    key = MacKey(Vertex(VertexKind.POINT, (1, 2, 3), params.modulus), ())
    rep = analysis.brute_force_collisions(params, key, 2)
    ok = rep.structural_count == 0 and rep.mirror_count > 0

    # constructive mirror collisions at the default profile
    rng = random.Random(90)
    for variant in (Variant.DMAC1, Variant.DMAC2):
        d = default_profile().with_overrides(variant=variant)
        k = keygen(d, 5, entropy=rng.randbytes)
        msg = list(rng.randbytes(32))
        mirrored = analysis.mirror_message(msg, k, d, 3)
        ok = ok and mirrored is not None and dmac(msg, k, d) == dmac(mirrored, k, d)
    report(
        9,
        ok,
        f"D(3,5) census: {rep.mirror_count} mirror pairs, "
        f"{rep.structural_count} structural; mirrors reproduced at default profile",
    )


def test_criterion_10_round_trip():
    rng = random.Random(100)
    ok = True
    for variant in (Variant.DMAC1, Variant.DMAC2):
        params = default_profile().with_overrides(variant=variant)
        for _ in range(100):
            key = keygen(params, rng.randrange(1, 19), entropy=rng.randbytes)
            msg = list(rng.randbytes(rng.randrange(0, 80)))
            tag = dmac(msg, key, params)
            ok = ok and verify(msg, key, params, tag)
            corrupted = Tag(tag.value ^ (1 << rng.randrange(params.tag_bits)), 256)
            ok = ok and not verify(msg, key, params, corrupted)
    report(10, ok, "verify(m, k, dmac(m, k)) holds and 1-bit corruption fails, 100x per variant")


def test_criterion_11_throughput():
    from dmac import _kernel

    _kernel.warm_up()
    params = default_profile()
    rng = random.Random(110)
    key = keygen(params, 10, entropy=rng.randbytes)
    data = rng.randbytes(8 * (1 << 20))
    dmac_bytes(data[:65536], key, params)  # finish any lazy setup
    elapsed = []
    for _ in range(3):  # repeat and keep the best, timeit-style
        start = time.perf_counter()
        dmac_bytes(data, key, params)
        elapsed.append(time.perf_counter() - start)
    throughput = len(data) / min(elapsed) / (1 << 20)
    report(11, throughput >= 10.0, f"default profile: {throughput:.1f} MiB/s >= 10 MiB/s")

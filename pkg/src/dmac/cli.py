"""Command-line surface: keygen, mac, verify, analyze, bench, kat.

Exit codes are uniform across commands: 0 success / match, 1 verification
or property failure, 2 usage or parameter error.  All state flows through
flags and files; there are no environment variables.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import analysis, katfile
from .errors import InputError, ParameterError
from .field import PrimeModulus
from .files import load_key, load_params, save_key
from .graph import Vertex, VertexKind
from .mac import (
    Encoding,
    MacKey,
    MacParams,
    Padding,
    Tag,
    TagMode,
    Variant,
    default_profile,
    dmac_bytes,
    girth_formula,
    keygen,
    verify_bytes,
)


def _load_profile(args) -> MacParams:
    params = load_params(args.params) if args.params else default_profile()
    overrides = {}
    if getattr(args, "variant", None):
        overrides["variant"] = Variant(args.variant)
    if getattr(args, "encoding", None):
        overrides["encoding"] = Encoding(args.encoding)
    if getattr(args, "padding", None):
        overrides["padding"] = Padding(args.padding)
    if getattr(args, "tag_mode", None):
        overrides["tag_mode"] = TagMode(args.tag_mode)
    return params.with_overrides(**overrides) if overrides else params


def _read_message(args) -> bytes:
    if args.infile in (None, "-"):
        return sys.stdin.buffer.read()
    try:
        return Path(args.infile).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read message from {args.infile}: {exc}") from exc


def _format_tag(tag: Tag) -> str:
    return tag.to_hex() if tag.bit_length % 4 == 0 else tag.to_bits()


def _parse_tag(text: str, bits: int) -> Tag:
    if bits % 4 == 0:
        return Tag.from_hex(text, bits)
    return Tag.from_bits(text, bits)


def _emit(args, payload: dict) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(payload, indent=2, default=str) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_keygen(args) -> int:
    params = _load_profile(args)
    key = keygen(params, args.password_length)
    save_key(key, args.out_key)
    bound = params.max_password_length
    print(
        f"wrote key to {args.out_key}: {params.n} coordinates mod {params.modulus.value}, "
        f"password of {args.password_length} symbols "
        f"(bound s <= (1/2) g(D(n,Q)) = {bound})"
    )
    return 0


def cmd_mac(args) -> int:
    params = _load_profile(args)
    key = load_key(args.key, params)
    tag = dmac_bytes(_read_message(args), key, params)
    line = _format_tag(tag)
    print(line)
    if args.out:
        Path(args.out).write_text(line + "\n")
    return 0


def cmd_verify(args) -> int:
    params = _load_profile(args)
    key = load_key(args.key, params)
    candidate = _parse_tag(args.tag, params.tag_bits)
    if verify_bytes(_read_message(args), key, params, candidate):
        print("ok")
        return 0
    print("verification failed", file=sys.stderr)
    return 1


def _analysis_key(params: MacParams, key_path: str | None) -> MacKey:
    if key_path:
        return load_key(key_path, params)
    q = params.modulus.value
    coords = tuple((i + 1) % q for i in range(params.n))
    return MacKey(Vertex(VertexKind.POINT, coords, params.modulus), ())


def cmd_analyze_graph(args) -> int:
    oracle = analysis.build_oracle(args.n, args.q)
    girth = analysis.measure_girth(oracle)
    floor = girth_formula(args.n)
    structure = analysis.structure_checks(oracle)
    report = {
        "n": args.n,
        "q": args.q,
        "vertices": structure.vertex_count,
        "edges": structure.edge_count,
        "girth": girth,
        "girth_floor": floor,
        "regular": structure.regular,
        "degree": structure.degree,
        "bipartite": structure.bipartite,
        "components": structure.components,
    }
    ok = structure.ok and girth >= floor
    if structure.vertex_count <= analysis.SPECTRUM_VERTEX_GUARDRAIL:
        sp = analysis.spectrum(oracle)
        report["lambda0"] = sp.top
        report["lambda1"] = sp.second
        report["spectral_bound"] = sp.bound
        report["spectrum_symmetric"] = sp.symmetric
        ok = ok and sp.symmetric
        if not sp.within_bound:
            print(
                f"finding: lambda1 = {sp.second:.6f} exceeds 2*sqrt(q) = {sp.bound:.6f}",
                file=sys.stderr,
            )
    print(
        f"D({args.n},{args.q}): {report['vertices']} vertices, girth {girth} "
        f"(floor {floor}), degree {report['degree']}, "
        f"bipartite={report['bipartite']}, components={report['components']}"
    )
    if "lambda1" in report:
        print(
            f"lambda0 = {report['lambda0']:.6f}, lambda1 = {report['lambda1']:.6f}, "
            f"bound 2*sqrt(q) = {report['spectral_bound']:.6f}"
        )
    _emit(args, report)
    return 0 if ok else 1


def cmd_analyze_avalanche(args) -> int:
    params = _load_profile(args)
    rng = random.Random(args.seed)
    key = (
        load_key(args.key, params)
        if args.key
        else keygen(params, 10, entropy=rng.randbytes)
    )
    report = analysis.avalanche(params, key, args.trials, rng=rng)
    ok = report.within_binomial_band()
    print(
        f"avalanche ({params.variant.value}): mean Hamming distance "
        f"{report.mean_hamming:.2f} of {report.tag_bits} bits over {report.trials} trials "
        f"(std {report.std_hamming:.2f}) -> {'ok' if ok else 'OUT OF BAND'}"
    )
    _emit(
        args,
        {
            "variant": params.variant.value,
            "trials": report.trials,
            "mean_hamming": report.mean_hamming,
            "std_hamming": report.std_hamming,
            "tag_bits": report.tag_bits,
            "pass": ok,
        },
    )
    return 0 if ok else 1


def cmd_analyze_bits(args) -> int:
    params = _load_profile(args)
    if params.tag_mode is not TagMode.MOD_POW2:
        params = params.with_overrides(tag_mode=TagMode.MOD_POW2)
        print("note: switching tag mode to modpow2 for unbiased bits", file=sys.stderr)
    rng = random.Random(args.seed)
    key = (
        load_key(args.key, params)
        if args.key
        else keygen(params, 10, entropy=rng.randbytes)
    )
    tags = analysis.generate_tags(params, key, args.tags, rng=rng)
    report = analysis.bit_statistics(params, tags)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"bit statistics over {report.total_bits} bits: monobit z = {report.monobit_z:.3f} "
        f"(limit {analysis.NORMAL_Q995}), serial chi2 = {report.serial_chi2:.3f} "
        f"(limit {analysis.CHI2_3_Q99}) -> {'ok' if report.ok else 'FAIL'}"
    )
    if args.emit_bits:
        Path(args.emit_bits).write_bytes(analysis.tag_bit_stream(tags))
        print(f"wrote raw bit stream to {args.emit_bits}")
    _emit(
        args,
        {
            "total_bits": report.total_bits,
            "ones": report.ones,
            "monobit_z": report.monobit_z,
            "serial_chi2": report.serial_chi2,
            "pass": report.ok,
        },
    )
    return 0 if report.ok else 1


def cmd_analyze_collisions(args) -> int:
    q = args.q
    lq = (q - 1).bit_length()
    params = MacParams(
        q=q,
        block_bits=lq,
        n=args.n,
        modulus=PrimeModulus(q),
        tag_bits=args.n * lq,
        variant=Variant(args.variant) if args.variant else Variant.DMAC2,
        allow_small_modulus=True,
    )
    key = _analysis_key(params, args.key)
    report = analysis.brute_force_collisions(params, key, args.max_blocks)
    print(
        f"hashed {report.messages_hashed} messages of <= {args.max_blocks} blocks on "
        f"D({args.n},{q}): {report.mirror_count} mirror pairs, "
        f"{report.structural_count} structural pairs"
    )
    for pair in report.structural_pairs()[:20]:
        print(f"  structural: {pair.message_a} vs {pair.message_b}")
    _emit(
        args,
        {
            "messages": report.messages_hashed,
            "mirror_pairs": report.mirror_count,
            "structural_pairs": report.structural_count,
        },
    )
    return 0 if report.structural_count == 0 else 1


def cmd_bench(args) -> int:
    params = _load_profile(args)
    rng = random.Random(args.seed)
    key = keygen(params, args.password_length, entropy=rng.randbytes)
    size = int(args.size_mib * (1 << 20))
    data = rng.randbytes(size)

    from . import _kernel

    _kernel.warm_up()
    dmac_bytes(data[:4096], key, params)  # compile/caches outside the timing
    start = time.perf_counter()
    dmac_bytes(data, key, params)
    elapsed = time.perf_counter() - start
    throughput = size / elapsed / (1 << 20)

    sample_blocks = min(args.count_blocks, max(1, size // (params.block_bits // 8)))
    sample_symbols = [0] * (sample_blocks * params.symbols_per_block)
    ops = analysis.count_ops(sample_symbols, key, params)
    other = (
        Variant.DMAC1 if params.variant is Variant.DMAC2 else Variant.DMAC2
    )
    print(
        f"throughput ({params.variant.value}): {size} bytes in {elapsed:.3f} s "
        f"-> {throughput:.1f} MiB/s"
    )
    print(
        f"instrumented ops/bit over {ops.block_count} blocks (s={ops.password_length}): "
        f"{float(ops.per_bit_measured):.6f}; formula {float(ops.per_bit_formula):.6f}; "
        f"{other.value} formula {float(ops.per_bit_other_variant):.6f}"
    )
    _emit(
        args,
        {
            "variant": params.variant.value,
            "bytes": size,
            "seconds": elapsed,
            "mib_per_s": throughput,
            "ops_per_bit_measured": float(ops.per_bit_measured),
            "ops_per_bit_formula": float(ops.per_bit_formula),
        },
    )
    return 0


def cmd_kat(args) -> int:
    results = katfile.run_kat_file(args.file)
    failures = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}")
        for detail in result.details:
            print(f"  {detail}")
        failures += 0 if result.passed else 1
    print(f"{len(results) - failures}/{len(results)} records passed")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# argument wiring


def _add_profile_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", help="parameter file (default: built-in profile)")
    parser.add_argument("--variant", choices=[v.value for v in Variant])
    parser.add_argument("--encoding", choices=[e.value for e in Encoding])
    parser.add_argument("--padding", choices=[p.value for p in Padding])
    parser.add_argument("--tag-mode", dest="tag_mode", choices=[t.value for t in TagMode])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmac",
        description="Keyed hashing by walking the bipartite graphs D(n,Q), "
        "plus analysis tools for the underlying graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key file")
    _add_profile_flags(p)
    p.add_argument("--out", dest="out_key", required=True, help="key file to write")
    p.add_argument("--password-length", type=int, default=10)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("mac", help="tag a message")
    _add_profile_flags(p)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", help="message file, or - for stdin")
    p.add_argument("--out", help="also write the tag here")
    p.set_defaults(func=cmd_mac)

    p = sub.add_parser("verify", help="check a message against a tag")
    _add_profile_flags(p)
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", help="message file, or - for stdin")
    p.add_argument("--tag", required=True, help="candidate tag (hex, h/4 digits)")
    p.set_defaults(func=cmd_verify)

    analyze = sub.add_parser("analyze", help="graph and randomness analysis")
    asub = analyze.add_subparsers(dest="analysis", required=True)

    p = asub.add_parser("graph", help="girth, regularity, spectrum of D(n,q)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze_graph)

    p = asub.add_parser("avalanche", help="single-bit-flip diffusion test")
    _add_profile_flags(p)
    p.add_argument("--key")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze_avalanche)

    p = asub.add_parser("bits", help="monobit and serial tests over tag bits")
    _add_profile_flags(p)
    p.add_argument("--key")
    p.add_argument("--tags", type=int, default=4000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--emit-bits", dest="emit_bits", help="write the raw bit stream here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze_bits)

    p = asub.add_parser("collisions", help="exhaustive collision census on a tiny graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--max-blocks", dest="max_blocks", type=int, default=2)
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p.add_argument("--key")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze_collisions)

    p = sub.add_parser("bench", help="throughput and operation counts")
    _add_profile_flags(p)
    p.add_argument("--size-mib", dest="size_mib", type=float, default=1.0)
    p.add_argument("--count-blocks", dest="count_blocks", type=int, default=2048)
    p.add_argument("--password-length", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("kat", help="run a known-answer test file")
    p.add_argument("file", help="JSON KAT file")
    p.set_defaults(func=cmd_kat)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

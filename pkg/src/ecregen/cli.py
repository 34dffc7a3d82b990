"""ecregen command line: encode, reconstruct, regenerate, inspect, simulate.

Exit codes: 0 success, 1 reconstruction/regeneration failure, 2 bad
parameters or malformed shards.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from collections import Counter
from pathlib import Path

from .container import (
    ShardFile,
    make_checker,
    payload_to_symbols,
    read_shard,
    shard_path,
    symbols_to_payload,
    write_shard,
)
from .errors import (
    CodeError,
    InsufficientHelpers,
    IntegrityFailure,
    InvalidParameter,
    ReconstructionFailure,
    RegenerationFailure,
    ShardFormatError,
)
from .codes import make_code
from .sim import SimConfig, parse_grid, rows_to_csv, rows_to_json, run_sweep

log = logging.getLogger("ecregen")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SHARD_RE = re.compile(r"^node_(\d+)\.ecrg$")


class UsageError(Exception):
    pass


def _code_from_shard(sh: ShardFile):
    return make_code(sh.scheme, sh.n, sh.k, sh.d, sh.m, sh.gamma)


def _load_shards(directory):
    """Shards keyed by node index; filename and header must agree and headers must match."""
    directory = Path(directory)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    shards = {}
    for path in sorted(directory.iterdir()):
        mt = SHARD_RE.match(path.name)
        if not mt:
            continue
        try:
            sh = read_shard(path, strict=False)
        except ShardFormatError as exc:
            raise UsageError(f"{path.name}: {exc}") from exc
        if sh.node_index != int(mt.group(1)):
            raise UsageError(f"{path.name}: header says node {sh.node_index}")
        shards[sh.node_index] = sh
    if not shards:
        raise UsageError(f"no node_<i>.ecrg files in {directory}")
    keys = Counter(sh.header_key() for sh in shards.values())
    if len(keys) > 1:
        raise UsageError("shard headers disagree; mixed or damaged shard set")
    return shards


def cmd_encode(args):
    code = make_code(args.scheme, args.n, args.k, args.d, args.m, args.gamma)
    p = code.params
    data = Path(args.input).read_bytes()
    symbols = payload_to_symbols(data, p.m, p.B)
    blocks = len(symbols) // p.B
    shares = code.encode_blocks(symbols)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = p.d
    gamma = getattr(p, "gamma", 1)
    for sh in shares:
        write_shard(shard_path(out, sh.node_index), ShardFile(
            args.scheme, p.m, p.n, p.k, d, sh.node_index, gamma, blocks, p.alpha,
            len(data), sh.symbols))
    weight, eta = code.update_complexity()
    print(f"scheme={args.scheme} n={p.n} k={p.k} d={d} m={p.m} B={p.B} alpha={p.alpha} "
          f"blocks={blocks} update_complexity={weight} eta={float(eta):.4f}")
    return EXIT_OK


def cmd_reconstruct(args):
    shards = _load_shards(args.shard_dir)
    first = next(iter(shards.values()))
    code = _code_from_shard(first)
    p = code.params
    if len(shards) < p.k:
        print(f"only {len(shards)} shards present, need at least k={p.k}", file=sys.stderr)
        return EXIT_FAIL

    def fetch(node):
        sh = shards.get(node)
        return None if sh is None else sh.symbols

    try:
        result = code.reconstruct(fetch, check=make_checker(p.m))
        data = symbols_to_payload(result.message, p.m)
    except (ReconstructionFailure, IntegrityFailure) as exc:
        print(f"reconstruction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if len(data) != first.original_byte_len:
        print("reconstructed length disagrees with shard header", file=sys.stderr)
        return EXIT_FAIL
    Path(args.out).write_bytes(data)
    print(f"nodes_accessed={result.nodes_accessed} accessed={result.accessed} "
          f"corrected={result.bad_nodes}")
    return EXIT_OK


def cmd_regenerate(args):
    shards = _load_shards(args.shard_dir)
    f = args.node
    first = next(iter(shards.values()))
    code = _code_from_shard(first)
    p = code.params
    if not 0 <= f < p.n:
        raise UsageError(f"node {f} outside [0, {p.n})")
    target = shard_path(args.shard_dir, f)
    if target.exists() and not args.force:
        raise UsageError(f"{target} exists; pass --force to overwrite")
    helpers = {j: sh for j, sh in shards.items() if j != f}
    if len(helpers) < p.d:
        print(f"need d={p.d} helper shards, found {len(helpers)}", file=sys.stderr)
        return EXIT_FAIL
    per = first.symbols_per_block
    symbols = []
    try:
        for b in range(first.block_count):
            pairs = [(j, code.helper_symbol(code.Share(j, sh.block(b)), f)) for j, sh in helpers.items()]
            symbols.extend(code.regenerate(f, pairs).symbols)
    except (InsufficientHelpers, RegenerationFailure) as exc:
        print(f"regeneration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    assert len(symbols) == per * first.block_count
    write_shard(target, ShardFile(first.scheme, first.m, first.n, first.k, first.d, f,
                                  first.gamma, first.block_count, per,
                                  first.original_byte_len, symbols))
    print(f"regenerated node {f} from {len(helpers)} helpers -> {target}")
    return EXIT_OK


def cmd_inspect(args):
    code = make_code(args.scheme, args.n, args.k, args.d, args.m, args.gamma)
    p = code.params
    weight, eta = code.update_complexity()
    print(f"scheme={args.scheme} n={p.n} k={p.k} d={p.d} m={p.m} alpha={p.alpha} B={p.B} beta=1")
    print(f"update_complexity={weight} eta={eta} ({float(eta):.4f})")
    if args.scheme == "msr":
        rep = code.verify_generator()
        print(f"distinct_diagonal={rep.distinct_diagonal} coset_membership={rep.coset_membership} "
              f"full_rank={rep.full_rank} product_rows_in_code={rep.product_rows_in_code}")
        print(f"delta={code.delta}")
    else:
        print(f"rank={code.g_full.rank()} g(x)={code.g_poly} f(x)={code.f_poly}")
    if args.matrices:
        print("G =")
        for row in code.g_full.tolist():
            print(" ".join(f"{x:>{len(str(p.field.order))}}" for x in row))
    return EXIT_OK


def cmd_simulate(args):
    cfg = SimConfig(scheme=args.scheme, n=args.n, k=args.k, d=args.d, m=args.m,
                    gamma=args.gamma, p_grid=parse_grid(args.p), runs=args.runs,
                    seed=args.seed, mode=args.mode, symbol_rate=args.symbol_rate)
    rows = run_sweep(cfg, jobs=args.jobs)
    text = rows_to_json(rows) if args.json else rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_code_flags(sp, defaults=False):
    sp.add_argument("--scheme", choices=["msr", "mbr"], default="msr" if defaults else None,
                    required=not defaults)
    sp.add_argument("--n", type=int, default=20 if defaults else None, required=not defaults)
    sp.add_argument("--k", type=int, default=10 if defaults else None, required=not defaults)
    sp.add_argument("--d", type=int, default=None, help="required for MBR; MSR uses 2k-2")
    sp.add_argument("--m", type=int, default=5 if defaults else None, required=not defaults)
    sp.add_argument("--gamma", type=int, default=1)


def make_parser():
    ap = argparse.ArgumentParser(prog="ecregen", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("encode", help="encode a file into node_<i>.ecrg shards")
    _add_code_flags(sp)
    sp.add_argument("input")
    sp.add_argument("--out", required=True, help="output shard directory")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("reconstruct", help="rebuild the file from shards")
    sp.add_argument("shard_dir")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("regenerate", help="rebuild one node's shard from the others")
    sp.add_argument("shard_dir")
    sp.add_argument("--node", type=int, required=True)
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(func=cmd_regenerate)

    sp = sub.add_parser("inspect", help="print generator properties")
    _add_code_flags(sp)
    sp.add_argument("--matrices", action="store_true", help="print the full generator matrix")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("simulate", help="Monte Carlo failure-rate sweep (CSV)")
    _add_code_flags(sp, defaults=True)
    sp.add_argument("--p", default="0:0.5:0.05", help="'0.1', '0,0.1' or 'start:stop:step'")
    sp.add_argument("--runs", type=int, default=1000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--mode", choices=["full", "symbol"], default="full")
    sp.add_argument("--symbol-rate", type=float, default=0.5)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidParameter, ShardFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

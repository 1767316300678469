"""Command line: verify, count, bench, sos, skew, syrk, quat-syrk."""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import bench as B
from .errors import FsyrkError, NoSkewUnitary
from .field import PrimeFieldCtx, sos_decompose
from .matrix import Matrix, read_matrix, write_matrix
from .rings import AdjointKind, QuatRing, make_ring
from .skew import build_skew_unitary


def parse_sizes(spec: str) -> List[int]:
    """'1..33', '4,8,16' or a mix such as '1..4,64'."""
    out: List[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_seeds(spec: str) -> List[int]:
    """A bare count 'k' means seeds 0..k-1; ranges and lists as for sizes."""
    if spec.isdigit():
        return list(range(int(spec)))
    return parse_sizes(spec)


def _ring_kind(args):
    ring = make_ring(args.ring)
    kind = AdjointKind.parse(args.phi)
    return ring, kind


def cmd_verify(args) -> int:
    ring, kind = _ring_kind(args)
    algo = args.algo
    sizes = parse_sizes(args.n)
    seeds = parse_seeds(args.seeds)
    out = B.verify(ring, kind, algo, sizes, seeds, args.threshold, args.skew)
    for f in out.failures:
        print(f"FAIL {algo} {ring.tag} phi={kind.value} {f}")
    status = "pass" if out.ok else "FAIL"
    print(f"{status}: {algo} over {ring.tag} phi={kind.value}, {out.cases} cases")
    return 0 if out.ok else 1


def cmd_count(args) -> int:
    ring, kind = _ring_kind(args)
    if not ring.is_exact:
        print("error: counting needs an exact ring", file=sys.stderr)
        return 2
    print("n,threshold,quantity,measured,predicted,rel_dev")
    for n in parse_sizes(args.n):
        c, pred = B.count(ring, kind, args.algo, n, args.threshold, args.seed, args.skew)
        snap = c.snapshot()
        for q in ("mults", "ymults", "base_mults", "adds", "halvings", "products",
                  "peak_workspace"):
            want = pred.get(q)
            got = snap[q]
            if want is None:
                print(f"{n},{args.threshold},{q},{got},-,-")
            else:
                dev = abs(got - want) / want if want else float(got != want)
                print(f"{n},{args.threshold},{q},{got},{want},{dev:.3g}")
    return 0


def cmd_bench(args) -> int:
    ring, kind = _ring_kind(args)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    sizes = parse_sizes(args.n)
    thr = args.threshold
    if args.tune:
        thr = B.tune_threshold(ring, kind, max(sizes))
        print(f"# tuned threshold {thr}", file=sys.stderr)
    recs = B.bench(ring, kind, algos, sizes, parse_seeds(args.seeds), args.reps, thr)
    if args.output:
        with open(args.output, "w") as fh:
            B.write_csv(recs, fh)
    else:
        B.write_csv(recs, sys.stdout)
    return 0


def cmd_sos(args) -> int:
    ctx = PrimeFieldCtx(args.p)
    a, b = sos_decompose(args.k, ctx)
    ok = (a * a + b * b - args.k) % args.p == 0
    print(f"({a}, {b})")
    print(f"check: {a}^2 + {b}^2 = {(a * a + b * b) % args.p} = {args.k % args.p} mod {args.p}: "
          f"{'ok' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def cmd_skew(args) -> int:
    ring, kind = _ring_kind(args)
    Y = build_skew_unitary(ring, kind, args.n, args.skew)
    ok = Y.verify()
    print(Y.describe())
    print(f"Y phi(Y) = -I: {'ok' if ok else 'FAILED'}")
    return 0 if ok else 1


def _load_or_random(args, ring):
    if args.input:
        with open(args.input) as fh:
            return read_matrix(fh)
    cols = args.cols if args.cols else args.n
    return B.random_input(ring, args.n, cols, args.seed)


def _emit(M: Matrix, path: Optional[str]):
    if path:
        with open(path, "w") as fh:
            write_matrix(M, fh)
    else:
        write_matrix(M, sys.stdout)


def cmd_syrk(args) -> int:
    ring, kind = _ring_kind(args)
    A = _load_or_random(args, ring)
    data = B.run_algo(args.algo, A, kind, args.threshold, skew=args.skew)
    _emit(Matrix(data, A.ring), args.output)
    return 0


def cmd_quat_syrk(args) -> int:
    ring = make_ring(args.ring)
    if not isinstance(ring, QuatRing):
        print("error: quat-syrk needs a quat:fp:P ring", file=sys.stderr)
        return 2
    # 7m and rec-t are transpose kernels, 6m and rec-h conjugate ones
    phi = {"7m": "t", "rec-t": "t", "6m": "h", "rec-h": "h"}.get(args.algo, args.phi)
    kind = AdjointKind.parse(phi)
    A = _load_or_random(args, ring)
    data = B.run_algo(args.algo, A, kind, args.threshold)
    _emit(Matrix(data, A.ring), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fsyrk",
        description="Products of a matrix by its transpose or conjugate transpose.",
        epilog=("rings: fp:P, fp2:P, c64, quat:fp:P.  algorithms: "
                "fast, fast-acc, classic, naive, strassen; 2m, 3m, naive4 (fp2, c64); "
                "baseline, 7m (phi=t), 6m (phi=h), rec-t, rec-h (quat)."))
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, algo_default="fast"):
        p.add_argument("--ring", default="fp:131071")
        p.add_argument("--phi", default="t", choices=["t", "h"])
        p.add_argument("--algo", default=algo_default)
        p.add_argument("--threshold", type=int, default=4)
        p.add_argument("--skew", default="auto", choices=["auto", "scalar", "rot2"],
                       help="skew-unitary construction for the fast algorithm")

    p = sub.add_parser("verify", help="compare a kernel with the classical oracle")
    common(p)
    p.add_argument("--n", default="1..33")
    p.add_argument("--seeds", default="3")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("count", help="operation counts against closed forms")
    common(p)
    p.add_argument("--n", default="4")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("bench", help="timing sweep as CSV")
    p.add_argument("--ring", default="fp:131071")
    p.add_argument("--phi", default="t", choices=["t", "h"])
    p.add_argument("--algos", default="fast,classic")
    p.add_argument("--n", default="256,512,1024")
    p.add_argument("--seeds", default="1")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--threshold", type=int, default=64)
    p.add_argument("--tune", action="store_true", help="pick the threshold by timing first")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("sos", help="a, b with a^2 + b^2 = k mod p")
    p.add_argument("p", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(fn=cmd_sos)

    p = sub.add_parser("skew", help="show the skew-unitary chosen for a ring")
    p.add_argument("--ring", default="fp:7")
    p.add_argument("--phi", default="t", choices=["t", "h"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--skew", default="auto", choices=["auto", "scalar", "rot2"])
    p.set_defaults(fn=cmd_skew)

    for name, fn, default in (("syrk", cmd_syrk, "fast"), ("quat-syrk", cmd_quat_syrk, "6m")):
        p = sub.add_parser(name, help="run one kernel on a file or a random matrix")
        common(p, default)
        if name == "quat-syrk":
            p.set_defaults(ring="quat:fp:7", phi="h")
        p.add_argument("--n", type=int, default=8)
        p.add_argument("--cols", type=int, default=0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--input")
        p.add_argument("--output")
        p.set_defaults(fn=fn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NoSkewUnitary as e:
        print(f"error: NoSkewUnitary: {e}", file=sys.stderr)
        return 2
    except (FsyrkError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

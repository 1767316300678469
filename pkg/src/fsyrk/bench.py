"""Verification, counting and timing harness behind the command line."""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, fields
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .counter import OpCounter
from .errors import FsyrkError, NoSkewUnitary
from .ext2m import ExtensionSplit, adjoint_product_2m, adjoint_product_naive4, gemm_3m, to_extension
from .matrix import (Matrix, _sym_from_low, adjoint, gemm_naive, gemm_strassen,
                     syrk_classic_dnc, syrk_naive)
from .quaternion import (QuatMatrix, quat_gemm_baseline, quat_gemm_naive16, quat_syrk_conj_6m,
                         quat_syrk_conj_recursive, quat_syrk_transpose_7m,
                         quat_syrk_transpose_recursive)
from .rings import (AdjointKind, ArrayRing, ComplexRing, ConjugateTranspose, Fq2Ring,
                    QuatRing, Transpose)
from .skew import SCALAR, build_skew_unitary
from .syrk import ACC, FastSyrkPlan, syrk_fast

CSV_HEADER = ("algo", "ring", "phi", "n", "p", "seed", "seconds", "gflops_eff",
              "mults", "adds", "workspace")


class UnsupportedCombination(FsyrkError):
    """Raised for a (ring, phi, algo) cell that no kernel covers."""


@dataclass
class BenchRecord:
    algo: str
    ring: str
    phi: str
    n: int
    p: int
    seed: int
    seconds: float
    gflops_eff: float
    mults: int
    adds: int
    workspace: int

    def row(self):
        return [getattr(self, f.name) for f in fields(self)]


def gflops_eff(n: int, seconds: float) -> float:
    """Effective speed n^3 / (1e9 t)."""
    return n ** 3 / (1e9 * seconds) if seconds > 0 else float("inf")


# ---------------------------------------------------------------------------
# algorithm table

SYRK_ALGOS = ("fast", "fast-acc", "classic", "naive", "strassen")
EXT_ALGOS = ("2m", "3m", "naive4")
QUAT_ALGOS = ("baseline", "7m", "6m", "rec-t", "rec-h")


def supported(ring: ArrayRing, kind: AdjointKind) -> Tuple[str, ...]:
    """Algorithms advertised for a ring and adjoint kind."""
    if isinstance(ring, QuatRing):
        if kind is Transpose:
            return ("baseline", "7m", "rec-t") if ring.p != 2 else ("7m", "rec-t")
        base = ("6m", "rec-h", "fast", "fast-acc", "classic", "naive")
        return (("baseline",) if ring.p != 2 else ()) + base
    if isinstance(ring, ComplexRing):
        if kind is ConjugateTranspose:
            return ("classic", "naive", "strassen") + EXT_ALGOS
        return SYRK_ALGOS + EXT_ALGOS
    if isinstance(ring, Fq2Ring):
        # i = t works for 2M when eps = i phi(i) is in F_p; 3M needs t^2 in F_p
        ext = ("2m", "naive4") if (kind is ConjugateTranspose or ring.s == 0) else ()
        return SYRK_ALGOS + ext + (("3m",) if ring.s == 0 else ())
    return SYRK_ALGOS


def check_combination(ring, kind, algo):
    if algo == "fast" and isinstance(ring, ComplexRing) and kind is ConjugateTranspose:
        raise NoSkewUnitary("no skew-unitary matrix exists for the complex conjugate transpose")
    if algo not in supported(ring, kind):
        raise UnsupportedCombination(
            f"algorithm {algo!r} is not available for ring {ring.tag} with phi={kind.value}")


def random_input(ring: ArrayRing, m: int, n: int, seed: int) -> Matrix:
    rng = np.random.default_rng(seed)
    return Matrix.random(ring, m, n, rng)


def oracle(A: Matrix, kind: AdjointKind):
    """Full A phi(A) (raw transpose for quaternions with kind t), classical."""
    R = A.ring
    if isinstance(R, QuatRing):
        Q = QuatMatrix.from_matrix(A)
        other = Q.raw_transpose() if kind is Transpose else Q.conj_transpose()
        return quat_gemm_naive16(Q, other).to_matrix().data
    return gemm_naive(A, adjoint(A, kind)).data


def run_algo(algo: str, A: Matrix, kind: AdjointKind, threshold: int = 64,
             counter: Optional[OpCounter] = None, skew: str = "auto"):
    """Full m x m result of the selected kernel."""
    R = A.ring
    check_combination(R, kind, algo)
    c = counter
    if algo in ("fast", "fast-acc"):
        plan = FastSyrkPlan(threshold=threshold, skew=skew,
                            schedule=ACC if algo == "fast-acc" else "pure")
        C = syrk_fast(A, kind, plan, c)
        _sym_from_low(R, kind, C.data)
        return C.data
    if algo == "classic":
        C = syrk_classic_dnc(A, kind, threshold, c)
        _sym_from_low(R, kind, C.data)
        return C.data
    if algo == "naive":
        C = syrk_naive(A, kind, counter=c)
        _sym_from_low(R, kind, C.data)
        return C.data
    if algo == "strassen":
        return gemm_strassen(A, adjoint(A, kind), threshold, c).data
    if algo in EXT_ALGOS:
        sp = ExtensionSplit.of(A, kind)
        if algo == "2m":
            pair = adjoint_product_2m(sp, kind, c)
        elif algo == "naive4":
            pair = adjoint_product_naive4(sp, c)
        else:
            sq = ExtensionSplit.of(adjoint(A, kind), Transpose if isinstance(R, ComplexRing)
                                   else kind)
            i2 = -1.0 if isinstance(R, ComplexRing) else R.n
            pair = gemm_3m(sp, sq, i2, c)
        return to_extension(sp, pair).data
    Q = QuatMatrix.from_matrix(A)
    if algo == "baseline":
        other = Q.raw_transpose() if kind is Transpose else Q.conj_transpose()
        out = quat_gemm_baseline(Q, other, c)
    elif algo == "7m":
        out = quat_syrk_transpose_7m(Q, c)
    elif algo == "6m":
        out = quat_syrk_conj_6m(Q, c, threshold=threshold)
    elif algo == "rec-t":
        out = quat_syrk_transpose_recursive(Q, None, threshold, c)
    else:
        out = quat_syrk_conj_recursive(Q, threshold, c)
    return out.to_matrix().data


# ---------------------------------------------------------------------------
# verification

@dataclass
class VerifyOutcome:
    ok: bool
    cases: int
    failures: List[str]


def first_difference(R: ArrayRing, x, y) -> Optional[Tuple[int, int]]:
    if R.is_exact:
        diff = np.argwhere(x != y)
        if diff.size == 0:
            return None
        return int(diff[0][0]), int(diff[0][1])
    if R.equal(x, y):
        return None
    err = np.abs(x - y)
    i, j = np.unravel_index(int(np.argmax(err)), err.shape)
    return int(i), int(j)


def verify(ring: ArrayRing, kind: AdjointKind, algo: str, sizes: Iterable[int],
           seeds: Iterable[int], threshold: int = 4, skew: str = "auto",
           cols: Optional[Callable[[int], int]] = None) -> VerifyOutcome:
    check_combination(ring, kind, algo)
    fails = []
    cases = 0
    for n in sizes:
        for seed in seeds:
            A = random_input(ring, n, cols(n) if cols else n, seed)
            got = run_algo(algo, A, kind, threshold, skew=skew)
            ref = oracle(A, kind)
            cases += 1
            d = first_difference(ring, got, ref)
            if d is not None:
                fails.append(f"n={n} seed={seed}: first difference at {d}")
    return VerifyOutcome(not fails, cases, fails)


# ---------------------------------------------------------------------------
# closed-form counts

def fast_mults(n: int, t: int) -> int:
    """T(n) = 3 T(n/2) + 2 (n/2)^3, T(n) = n^3 for n <= t."""
    if n <= t or n < 2:
        return n ** 3
    return 3 * fast_mults(n // 2, t) + 2 * (n // 2) ** 3


def fast_ymults(n: int, t: int) -> int:
    """Scalar skew-unitary cost: two (n/2) x (n/2) scalings per node."""
    if n <= t or n < 2:
        return 0
    return 3 * fast_ymults(n // 2, t) + 2 * (n // 2) ** 2


def classic_mults(n: int, t: int) -> int:
    if n <= t or n < 2:
        return n ** 3
    return 4 * classic_mults(n // 2, t) + 2 * (n // 2) ** 3


def strassen_mults(n: int, t: int) -> int:
    if n < max(2, 2 * t):
        return n ** 3
    return 7 * strassen_mults(n // 2, t)


def quat_rec_mults(n: int, t: int) -> int:
    """P(n) = 3 P(n/2) + 4 (n/2)^3 quaternion multiplications."""
    if n <= t or n < 2:
        return n ** 3
    return 3 * quat_rec_mults(n // 2, t) + 4 * (n // 2) ** 3


def _exact_recursion(n, t):
    k = n
    while k > t and k % 2 == 0:
        k //= 2
    return k <= t


def predicted(algo: str, ring: ArrayRing, n: int, t: int) -> Dict[str, Optional[int]]:
    """Closed-form values for the quantities the counter reports."""
    out: Dict[str, Optional[int]] = {}
    exact = _exact_recursion(n, t)
    if algo == "fast":
        out["mults"] = fast_mults(n, t) if exact else None
    elif algo == "classic":
        out["mults"] = classic_mults(n, t) if exact else None
    elif algo == "naive":
        out["mults"] = n ** 3
    elif algo == "strassen":
        out["mults"] = strassen_mults(n, t) if (n & (n - 1)) == 0 else None
    elif algo == "rec-t":
        out["mults"] = quat_rec_mults(n, t) if exact else None
    elif algo in ("7m", "6m", "baseline", "2m", "3m", "naive4"):
        out["products"] = {"7m": 7, "6m": 6, "baseline": 8, "2m": 2, "3m": 3, "naive4": 4}[algo]
    return out


def count(ring: ArrayRing, kind: AdjointKind, algo: str, n: int, threshold: int,
          seed: int = 0, skew: str = "auto"):
    """Run once with a fresh counter; return (counter, predictions)."""
    A = random_input(ring, n, n, seed)
    c = OpCounter()
    run_algo(algo, A, kind, threshold, c, skew)
    pred = predicted(algo, ring, n, threshold)
    # the Y-application law holds for the scalar multiple of the identity only
    if algo == "fast" and pred.get("mults") is not None:
        if build_skew_unitary(ring, kind, 2, skew).form == SCALAR:
            pred["ymults"] = fast_ymults(n, threshold)
    return c, pred


# ---------------------------------------------------------------------------
# timing

def time_algo(algo, A, kind, threshold, reps=3):
    """Best-of-reps wall time plus the counter of the last run."""
    best = math.inf
    c = OpCounter()
    for _ in range(max(1, reps)):
        c = OpCounter()
        t0 = time.perf_counter()
        run_algo(algo, A, kind, threshold, c)
        best = min(best, time.perf_counter() - t0)
    return best, c


def bench(ring: ArrayRing, kind: AdjointKind, algos: Sequence[str], sizes: Sequence[int],
          seeds: Sequence[int] = (0,), reps: int = 3, threshold: int = 64) -> List[BenchRecord]:
    recs = []
    for algo in algos:
        check_combination(ring, kind, algo)
    for n in sizes:
        for seed in seeds:
            A = random_input(ring, n, n, seed)
            for algo in algos:
                t, c = time_algo(algo, A, kind, threshold, reps)
                recs.append(BenchRecord(algo, ring.tag, kind.value, n, ring.modulus, seed,
                                        t, gflops_eff(n, t), c.mults, c.adds,
                                        c.peak_workspace))
    return recs


def tune_threshold(ring: ArrayRing, kind: AdjointKind, n: int, algo: str = "fast",
                   candidates: Optional[Sequence[int]] = None, reps: int = 2,
                   seed: int = 0) -> int:
    """Threshold with the smallest measured time at size n."""
    if candidates is None:
        candidates = [c for c in (32, 64, 128, 256, 512, 1024, 2048) if c < n] or [n]
    A = random_input(ring, n, n, seed)
    best, best_t = candidates[0], math.inf
    for t in candidates:
        sec, _ = time_algo(algo, A, kind, t, reps)
        if sec < best_t:
            best, best_t = t, sec
    return best


def write_csv(records: Iterable[BenchRecord], fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())

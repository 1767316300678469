"""Fast products of a matrix by its adjoint over finite fields, their
quadratic extensions, the complex numbers and quaternion algebras."""

from .counter import OpCounter
from .errors import DimensionMismatch, NoSkewUnitary, NotASquare, OddDimension, UnsupportedRing
from .ext2m import ExtensionSplit, adjoint_product_2m, to_extension
from .field import (Fq2Ctx, PrimeFieldCtx, frobenius_conj, legendre, mod_sqrt, sos_decompose,
                    sqrt_minus_one)
from .matrix import (Lower, Matrix, TriangularHalf, Upper, adjoint, gemm_naive, gemm_strassen,
                     raw_transpose, read_matrix, symmetrize_from_lower, syrk_classic_dnc,
                     syrk_naive, write_matrix)
from .quaternion import (QuatMatrix, quat_gemm_baseline, quat_syrk_conj_6m,
                         quat_syrk_conj_recursive, quat_syrk_transpose_7m,
                         quat_syrk_transpose_recursive)
from .rings import (AdjointKind, ComplexRing, ConjugateTranspose, Fq2Ring, PrimeRing, QuatRing,
                    Quaternion, RealRing, Transpose, make_ring, quat_conj, quat_mul_howell_lafon,
                    quat_mul_naive)
from .skew import (SkewUnitary, apply_right, apply_right_adjoint, build_skew_unitary,
                   materialize)
from .syrk import FastSyrkPlan, peel_to_even, syrk_fast, syrk_fast_acc

__version__ = "0.1.0"

__all__ = [
    "OpCounter", "DimensionMismatch", "NoSkewUnitary", "NotASquare", "OddDimension",
    "UnsupportedRing", "ExtensionSplit", "adjoint_product_2m", "to_extension", "Fq2Ctx",
    "PrimeFieldCtx", "frobenius_conj", "legendre", "mod_sqrt", "sos_decompose",
    "sqrt_minus_one", "Lower", "Matrix", "TriangularHalf", "Upper", "adjoint", "gemm_naive",
    "gemm_strassen", "raw_transpose", "read_matrix", "symmetrize_from_lower",
    "syrk_classic_dnc", "syrk_naive", "write_matrix", "QuatMatrix", "quat_gemm_baseline",
    "quat_syrk_conj_6m", "quat_syrk_conj_recursive", "quat_syrk_transpose_7m",
    "quat_syrk_transpose_recursive", "AdjointKind", "ComplexRing", "ConjugateTranspose",
    "Fq2Ring", "PrimeRing", "QuatRing", "Quaternion", "RealRing", "Transpose", "make_ring",
    "quat_conj", "quat_mul_howell_lafon", "quat_mul_naive", "SkewUnitary", "apply_right",
    "apply_right_adjoint", "build_skew_unitary", "materialize", "FastSyrkPlan", "peel_to_even",
    "syrk_fast", "syrk_fast_acc",
]

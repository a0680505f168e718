"""Full-utilization sub-byte packing and mixed-precision GEMV kernels."""

from .errors import (
    BadMagicError,
    ConfigError,
    CorruptLayoutError,
    DomainError,
    PackedFormatError,
    ShapeError,
    StridepackError,
    TruncatedPayloadError,
    UnsupportedKernelError,
    UnsupportedWidthError,
    ValueRangeError,
    VerificationError,
)
from .fileformat import read_packed, write_packed
from .kernels_ref import (
    FULLPACK_PAIRS,
    GemvProblem,
    KernelId,
    Variant,
    gemv_baseline_w8a8,
    gemv_naive_w4a8,
    gemv_ref,
    make_problem,
    pack_naive_w4,
    random_problem,
)
from .kernels_vec import gemv_vec, gemv_vec_dispatch, hw_available
from .packing import (
    BitWidth,
    PackedMatrix,
    SubByteTensor,
    extract_group,
    pack,
    packed_nbytes,
    unpack,
)
from .quant import QuantParams, choose_scale, quantize, requantize

__version__ = "0.1.0"

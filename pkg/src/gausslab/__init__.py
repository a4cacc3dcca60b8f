"""Short incomplete Gauss sums and their limiting distributions."""

__version__ = "0.1.0"

from .expsums import (  # noqa: E402
    SumValue,
    classical_gauss_sum_closed,
    classical_gauss_sum_direct,
    incomplete_gauss_sum,
    kloosterman,
    salie,
    theta_sum,
    twisted_kloosterman,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "SumValue",
    "classical_gauss_sum_closed",
    "classical_gauss_sum_direct",
    "incomplete_gauss_sum",
    "kloosterman",
    "salie",
    "theta_sum",
    "twisted_kloosterman",
]

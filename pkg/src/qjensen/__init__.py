"""Jensen formulas and Riesz measures for quaternionic slice functions."""

import os

# QJ_THREADS caps the BLAS/OpenMP pools; it must be applied before numpy loads.
_threads = os.environ.get("QJ_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from .blaschke import BlaschkeSpec  # noqa: E402
from .diffops import FDConfig, bilaplacian_fd, laplacian_fd  # noqa: E402
from .errors import POLE  # noqa: E402
from .jensen import JensenReport, jensen_report  # noqa: E402
from .mixed import MixedProduct  # noqa: E402
from .pql import PQLFunction  # noqa: E402
from .quadrature import BumpFunction, S3Grid, mean_on_s3  # noqa: E402
from .quaternion import Quaternion  # noqa: E402
from .riesz import GAMMA, RieszReport, riesz_residual  # noqa: E402
from .slicefn import FactoredSlicePreserving, RealCoeffSeries  # noqa: E402

__version__ = "0.1.0"

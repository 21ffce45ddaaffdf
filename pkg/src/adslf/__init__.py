"""Lorentz harmonic maps into H^2 and spacelike constant curvature surfaces in AdS3."""

__version__ = "0.1.0"

from .algebra import bracket, exp_sl, gl_inner, sl_inner  # noqa: E402
from .errors import AdslfError, NumericFailure  # noqa: E402
from .grid import Domain, GridField  # noqa: E402
from .harmonic import CauchyData1D, characteristic_oracle, dalembert_solve  # noqa: E402
from .surfaces import fundamental_forms, reconstruct_case1, reconstruct_case2  # noqa: E402

__all__ = [
    "AdslfError",
    "CauchyData1D",
    "Domain",
    "GridField",
    "NumericFailure",
    "bracket",
    "characteristic_oracle",
    "dalembert_solve",
    "exp_sl",
    "fundamental_forms",
    "gl_inner",
    "reconstruct_case1",
    "reconstruct_case2",
    "sl_inner",
]

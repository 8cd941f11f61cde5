"""Equal-strength cavities in an infinite elastic plate."""
from .cases import build_map, zero_reports
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _errors
from .loading import LoadingParams, derive_loading
from .radicals import SlitConfig

__version__ = "0.1.0"

__all__ = ["build_map", "zero_reports", "LoadingParams", "derive_loading", "SlitConfig",
           *_errors]

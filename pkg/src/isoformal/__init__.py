"""isoformal: decide isotropy formality of corank-one homogeneous spaces."""

__version__ = "0.1.0"

from .classifier import Branch, Verdict, classify, cross_validate, onishchik_screen  # noqa: E402
from .config import EngineConfig  # noqa: E402

__all__ = [
    "Branch",
    "EngineConfig",
    "Verdict",
    "classify",
    "cross_validate",
    "onishchik_screen",
    "__version__",
]

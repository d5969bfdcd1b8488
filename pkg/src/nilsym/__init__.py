"""Symmetry of 2-step nilpotent metric Lie groups built from data sets (g, v, pi).

Submodules: numkernel, liealg, dataset, geometry, natred, repdecomp,
isotropy, symmetry, gallery, document, pipeline, cli.
"""
__version__ = "0.1.0"

from .dataset import DataSet, Representation, build_nilpotent, validate_data_set  # noqa: E402
from .gallery import get_example  # noqa: E402
from .liealg import MetricLieAlgebra, StructureTensor  # noqa: E402
from .numkernel import BilinearForm, Subspace, TolerancePolicy  # noqa: E402
from .symmetry import verify_main_theorem  # noqa: E402

__all__ = [
    "__version__",
    "BilinearForm",
    "DataSet",
    "MetricLieAlgebra",
    "Representation",
    "StructureTensor",
    "Subspace",
    "TolerancePolicy",
    "build_nilpotent",
    "get_example",
    "validate_data_set",
    "verify_main_theorem",
]

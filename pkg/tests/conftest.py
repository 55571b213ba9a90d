import numpy as np
from hypothesis import settings

from spherical_ensembles.matrix import SelfAdjointMatrix

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_matrix(beta: int, dim: int, gen: np.random.Generator, scale: float = 1.0) -> SelfAdjointMatrix:
    m = dim * (dim - 1) // 2
    return SelfAdjointMatrix(beta, scale * gen.standard_normal(dim), scale * gen.standard_normal((m, beta)))

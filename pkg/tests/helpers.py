import numpy as np

from walkergeom.expr import parse
from walkergeom.metric import WalkerMetric


def random_poly(rng: np.random.Generator, variables=(1, 2, 3, 4), terms: int = 5, degree: int = 3) -> str:
    """Random polynomial with small integer coefficients, as expression text."""
    out = []
    for _ in range(terms):
        coef = int(rng.integers(-3, 4)) or 1
        powers = [f"x{v}^{int(rng.integers(0, degree + 1))}" for v in variables if rng.random() < 0.6]
        out.append("*".join([str(coef)] + powers))
    return " + ".join(out)


def random_metric(rng: np.random.Generator, terms: int = 5, degree: int = 3) -> WalkerMetric:
    return WalkerMetric(*(parse(random_poly(rng, terms=terms, degree=degree)) for _ in range(3)))


def random_coefficient(rng: np.random.Generator, terms: int = 3, degree: int = 2):
    return parse(random_poly(rng, variables=(3, 4), terms=terms, degree=degree))

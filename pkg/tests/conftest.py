import random
from fractions import Fraction as F

import pytest

from gpade.denom import ThetaMode, make_cert
from gpade.pade import ApproxShape, build_family
from gpade.params import derive_params

# Rationals used to draw parameter tuples; pairwise-distinct fractional parts
# are enforced at draw time for the upper parameters.
ALPHA_POOL = [
    F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 5), F(2, 5), F(3, 5),
    F(4, 5), F(1, 7), F(3, 7), F(1), F(2), F(3, 2), F(5, 3), F(7, 4),
    F(9, 5), F(5, 2), F(8, 3), F(11, 4),
]


def pick_alphas(rng: random.Random, m: int) -> list[F]:
    chosen: list[F] = []
    while len(chosen) < m:
        c = rng.choice(ALPHA_POOL)
        if all((c - x).denominator != 1 for x in chosen):
            chosen.append(c)
    return [rng.choice(ALPHA_POOL)] + chosen


def make_configs(seed: int, count: int, m_choices=(1, 2, 3), n_max=5, n0_max=6):
    rng = random.Random(seed)
    configs = []
    for _ in range(count):
        m = rng.choice(m_choices)
        gp = derive_params(pick_alphas(rng, m))
        n = tuple(rng.randint(1, n_max) for _ in range(m))
        n0 = rng.randint(max(n), n0_max)
        configs.append((gp, ApproxShape(n=n, n0=n0)))
    return configs


@pytest.fixture(scope="session")
def acc_configs():
    return make_configs(20260808, 200)


@pytest.fixture(scope="session")
def acc_families(acc_configs):
    return [(gp, sh, build_family(gp, sh)) for gp, sh in acc_configs]


@pytest.fixture(scope="session")
def acc_certs(acc_families):
    mode = ThetaMode.paper()
    return [make_cert(gp, sh, mode) for gp, sh, _ in acc_families]


@pytest.fixture()
def params_file(tmp_path):
    def write(text: str, name: str = "p.params") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write

import pytest

from orbitlab.arith import QpModZp
from orbitlab.lazard import catalog
from orbitlab.metric import MetricGroup


@pytest.fixture(scope="session")
def rings():
    return catalog()


def hyperbolic_metric(p, k, r, name=None):
    """Evaluation pairing on b + b^ with b = (Z/p^k)^r: q = 0 on generators,
    B(e_i, e_{r+i}) = 1/p^k.  The first r coordinates span a Lagrangian."""
    rank = 2 * r
    zero = QpModZp(p, 0, 1)
    q_gens = [zero] * rank
    gram = [[zero] * rank for _ in range(rank)]
    val = QpModZp(p, 1, k)
    for i in range(r):
        gram[i][r + i] = gram[r + i][i] = val
    return MetricGroup(p, [k] * rank, q_gens, gram,
                       name=name or f"hyp({p}^{k})x{r}")


def quadratic_metric(p):
    """Z/p with q(x) = x^2/p, the rank-one nondegenerate example."""
    return MetricGroup(p, (1,), [f"1/{p}"], [[f"2/{p}"]], name=f"x^2/{p}")

import random
import time
from itertools import product as iproduct

from wrescalc.covariant import CovCalc, cov_jet, cov_check_selfadjoint
from wrescalc.geometry import random_metric_model, substitute_gens
from wrescalc.polyring import MultiPoly, poly_sum
from fractions import Fraction

t0 = time.time()
n = 4
calc = CovCalc(n)

def lap_power(calc, name, k):
    acc = []
    for idx in iproduct(range(calc.n), repeat=k):
        string = []
        for i in idx:
            string.extend([i, i])
        acc.append(calc.canonical_gen(cov_jet(name, tuple(string))))
    return poly_sum(calc.n, acc)

lap2 = lap_power(calc, "h", 2)
ok, wit, defect = cov_check_selfadjoint(calc, lap2)
print("defect terms:", len(defect.terms), flush=True)

rng = random.Random(3)
model = random_metric_model(n, rng, degree=3)
rv = model.riemann_cov_jets(2)

def rand_scalar(nn, rg, degree):
    from wrescalc.multiindex import enumerate_up_to
    acc = []
    for b in enumerate_up_to(nn, degree):
        acc.append(MultiPoly.monomial(nn, tuple(b), (),
                                      Fraction(rg.randint(-5, 5), rg.randint(1, 3))))
    return poly_sum(nn, acc)

hj = model.scalar_cov_jets(rand_scalar(n, rng, 5), 4)

def ev(p):
    def fn(g):
        if g[0] == "crv":
            return rv[g]
        if g[0] == "cjet" and g[1] == "h":
            return hj[g[2]]
        return None
    out = substitute_gens(p, fn)
    assert not out.gens_used(), out.gens_used()
    return out.coefficient((0,) * n)

val = ev(defect)
print("defect numeric value:", val, flush=True)
print("took", time.time() - t0, flush=True)

import random
import time
from fractions import Fraction
from itertools import product as iproduct

from wrescalc.covariant import (CovCalc, cov_check_selfadjoint, cov_derivative,
                                cov_jet, cov_rename, cov_strip_slot, curv_gen)
from wrescalc.geometry import random_metric_model, substitute_gens
from wrescalc.multiindex import enumerate_up_to
from wrescalc.polyring import MultiPoly, poly_sum

t0 = time.time()
n = 4
calc = CovCalc(n)
rng = random.Random(3)
model = random_metric_model(n, rng, degree=3)

def rand_scalar(nn, rg, degree):
    acc = []
    for b in enumerate_up_to(nn, degree):
        acc.append(MultiPoly.monomial(nn, tuple(b), (),
                                      Fraction(rg.randint(-5, 5), rg.randint(1, 3))))
    return poly_sum(nn, acc)

hpoly = rand_scalar(n, rng, 6)
fpoly = rand_scalar(n, rng, 6)
at0 = lambda p: p.set_positions_zero(range(n)).coefficient((0,) * n).real_fraction()

rv = model.riemann_cov_jets(2)
hj = model.scalar_cov_jets(hpoly, 4)
fj = model.scalar_cov_jets(fpoly, 4)

def ev(p):
    def fn(g):
        if g[0] == "crv":
            return rv[g]
        if g[0] == "cjet" and g[1] == "h":
            return hj[g[2]]
        if g[0] == "cjet" and g[1] == "f":
            return fj[g[2]]
        return None
    out = substitute_gens(p, fn)
    assert not any(gg[0] in ("crv", "cjet") for gg in out.gens_used())
    return at0(out)

def rc_raw(i, j):
    return poly_sum(n, [MultiPoly.from_gen(n, curv_gen((k, i, k, j)))
                        for k in range(n)])

# raw bi-laplacian: certificate core must vanish before canonicalization
P_raw = poly_sum(n, [MultiPoly.from_gen(n, cov_jet("h", (i, i, j, j)))
                     for i in range(n) for j in range(n)])
f0 = MultiPoly.from_gen(n, cov_jet("f"))
h0 = MultiPoly.from_gen(n, cov_jet("h"))
expr = f0 * P_raw - h0 * cov_rename(P_raw, "h", "f")
core, _ = cov_strip_slot(expr, n, "f")
print("bi-laplacian raw core literally zero:", core.is_zero(), flush=True)

# divergence of the Ricci contraction against the gradient: selfadjoint
parts = []
for j in range(n):
    inner = poly_sum(n, [rc_raw(i, j) * MultiPoly.from_gen(n, cov_jet("h", (i,)))
                         for i in range(n)])
    parts.append(cov_derivative(inner, j))
P1 = poly_sum(n, parts)
ok, wit, defect = cov_check_selfadjoint(calc, P1)
print("ricci divergence form selfadjoint:", ok,
      " defect terms:", len(defect.terms_sorted()),
      " ev(defect):", ev(defect), flush=True)

# control: scalar curvature times the laplacian, not selfadjoint
J_raw = poly_sum(n, [MultiPoly.from_gen(n, curv_gen((k, i, k, i)))
                     for k in range(n) for i in range(n)]) * Fraction(
                         1, 2 * (n - 1))
P3 = J_raw * poly_sum(n, [MultiPoly.from_gen(n, cov_jet("h", (i, i)))
                          for i in range(n)])
ok3, _w3, defect3 = cov_check_selfadjoint(calc, P3)
print("control selfadjoint claim:", ok3, " ev(defect):", ev(defect3), flush=True)
print("took", time.time() - t0, flush=True)

import random
import time
from fractions import Fraction

from wrescalc.covariant import CovCalc, cov_jet, cov_strip_slot
from wrescalc.geometry import random_metric_model, substitute_gens
from wrescalc.multiindex import enumerate_up_to
from wrescalc.polyring import MultiPoly, poly_sum

t0 = time.time()
n = 2
calc = CovCalc(n)
rng = random.Random(11)
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

h0 = MultiPoly.from_gen(n, cov_jet("h"))
g = cov_jet("f", (1, 1, 0, 0))
can = calc.canonical_gen(g)
r = can - MultiPoly.from_gen(n, g)
print("canonical form of string (1,1,0,0):", flush=True)
for (e, gens), co in can.terms_sorted():
    print("  ", co, gens, flush=True)
print("residual ev:", ev(r), flush=True)

piece = -(h0 * r)
core, wit = cov_strip_slot(piece, n, "f")
print("core:", flush=True)
for (e, gens), co in core.terms_sorted():
    print("  ", co, gens, flush=True)
print("core ev:", ev(core), flush=True)
cc = calc.canonicalize(core)
print("canonical core:", flush=True)
for (e, gens), co in cc.terms_sorted():
    print("  ", co, gens, flush=True)
print("canonical core ev:", ev(cc), flush=True)
print("witness entries:", flush=True)
for j in range(n):
    print(" -- slot", j, flush=True)
    for (e, gens), co in wit[j].terms_sorted():
        print("   ", co, gens, flush=True)
print("took", time.time() - t0, flush=True)

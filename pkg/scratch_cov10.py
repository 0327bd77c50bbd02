import random
import time
from fractions import Fraction

from wrescalc.covariant import CovCalc, cov_jet, cov_strip_slot
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

h0 = MultiPoly.from_gen(n, cov_jet("h"))

def probe(s):
    g = cov_jet("f", s)
    r = calc.canonical_gen(g) - MultiPoly.from_gen(n, g)
    print("== string", s, " residual ev:", ev(r), flush=True)
    piece = -(h0 * r)
    c, wit = cov_strip_slot(piece, n, "f")
    cc = calc.canonicalize(c)
    print("   core ev:", ev(c), " canonical core ev:", ev(cc), flush=True)
    return r, c, cc

# order-2 and order-3 micro cases
probe((1, 0))
r3, c3, cc3 = probe((0, 1, 0))
print()
print("order-3 residual:", flush=True)
for (e, gens), co in r3.terms_sorted():
    print("  ", co, gens, flush=True)
print("order-3 core:", flush=True)
for (e, gens), co in c3.terms_sorted():
    print("  ", co, gens, flush=True)
print("order-3 canonical core:", flush=True)
for (e, gens), co in cc3.terms_sorted():
    print("  ", co, gens, flush=True)
print("took", time.time() - t0, flush=True)

import random
import time
from fractions import Fraction
from itertools import product as iproduct

from wrescalc.covariant import CovCalc, cov_jet, cov_rename, cov_strip_slot
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
f0 = MultiPoly.from_gen(n, cov_jet("f"))

# 1. raw operator: strip must give a literally zero core
P_raw = poly_sum(n, [MultiPoly.from_gen(n, cov_jet("h", (i, i, j, j)))
                     for i in range(n) for j in range(n)])
expr_raw = f0 * P_raw - h0 * cov_rename(P_raw, "h", "f")
core_raw, _ = cov_strip_slot(expr_raw, n, "f")
print("raw core is literally zero:", core_raw.is_zero(), flush=True)

# 2. exhaustively validate canonical_gen on all length-4 f strings
bad = 0
for s in iproduct(range(n), repeat=4):
    d = ev(calc.canonical_gen(cov_jet("h", s))) - at0(hj[s])
    if d != 0:
        bad += 1
        if bad < 5:
            print("canonical_gen mismatch", s, d, flush=True)
print("canonical_gen mismatches over all 256 strings:", bad, flush=True)

# 3. per-string core of h0 * (canonical - raw) residual on the f side
total = Fraction(0)
for i in range(n):
    for j in range(n):
        s = (i, i, j, j)
        r = calc.canonical_gen(cov_jet("f", s)) - MultiPoly.from_gen(
            n, cov_jet("f", s))
        if r.is_zero():
            continue
        piece = -(h0 * r)
        c, _ = cov_strip_slot(piece, n, "f")
        v = ev(c)
        print("string", s, "residual terms", len(r.terms_sorted()),
              "core terms", len(c.terms_sorted()), "ev(core)", v, flush=True)
        total += v
print("sum of per-string cores:", total, flush=True)
print("took", time.time() - t0, flush=True)

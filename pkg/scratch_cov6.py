import random
import time
from fractions import Fraction
from itertools import product as iproduct

from wrescalc.covariant import (CovCalc, cov_jet, cov_rename, cov_strip_slot,
                                cov_derivative)
from wrescalc.geometry import random_metric_model, substitute_gens
from wrescalc.polyring import MultiPoly, poly_sum

t0 = time.time()
n = 4
calc = CovCalc(n)
rng = random.Random(3)
model = random_metric_model(n, rng, degree=3)

def rand_scalar(nn, rg, degree):
    from wrescalc.multiindex import enumerate_up_to
    acc = []
    for b in enumerate_up_to(nn, degree):
        acc.append(MultiPoly.monomial(nn, tuple(b), (),
                                      Fraction(rg.randint(-5, 5), rg.randint(1, 3))))
    return poly_sum(nn, acc)

hpoly = rand_scalar(n, rng, 6)
fpoly = rand_scalar(n, rng, 6)

# x-dependent component fields, exact to order 1 at least
def scalar_fields(model, f, max_len, keep_order):
    comps = {(): model._trunc(f, keep_order + max_len)}
    out = {(): comps[()]}
    for r in range(max_len):
        comps = model.cov_extend(comps, r, keep_order + max_len - r - 1)
        out.update(comps)
    return out

hf = scalar_fields(model, hpoly, 4, 1)
ff = scalar_fields(model, fpoly, 4, 1)

rf = {c: model._trunc(model.riemann_low(*c), 2)
      for c in iproduct(range(n), repeat=4)}
rfields = {("crv", c, ()): p for c, p in rf.items()}
comps = dict(rf)
for r in range(2):
    comps = model.cov_extend(comps, 4 + r, 1 - r)
    for c, val in comps.items():
        rfields[("crv", c[:4], c[4:])] = val

def field_of(p):
    def fn(g):
        if g[0] == "crv":
            return rfields[g]
        if g[0] == "cjet" and g[1] == "h":
            return hf[g[2]]
        if g[0] == "cjet" and g[1] == "f":
            return ff[g[2]]
        return None
    out = substitute_gens(p, fn)
    assert not any(gg[0] in ("crv", "cjet") for gg in out.gens_used())
    return out

def at0(p):
    return p.set_positions_zero(range(n)).coefficient((0,) * n).real_fraction()

def ev(p):
    return at0(field_of(p))

def lap_power(calc, name, k):
    acc = []
    for idx in iproduct(range(calc.n), repeat=k):
        string = []
        for i in idx:
            string.extend([i, i])
        acc.append(calc.canonical_gen(cov_jet(name, tuple(string))))
    return poly_sum(calc.n, acc)

P = lap_power(calc, "h", 2)
f0 = MultiPoly.from_gen(n, cov_jet("f"))
h0 = MultiPoly.from_gen(n, cov_jet("h"))
expr = f0 * P - h0 * cov_rename(P, "h", "f")
core, wit = cov_strip_slot(expr, n, "f")
print("strip done", time.time() - t0, flush=True)

# (a) formal divergence evaluated at the origin
div_formal = poly_sum(n, [cov_derivative(wj, j) for j, wj in enumerate(wit)])
a = ev(div_formal)

# (b) true divergence of the witness field at the origin
wit_fields = [field_of(wj) for wj in wit]
b = Fraction(0)
for j in range(n):
    b += at0(wit_fields[j].diff_var(j))
for j in range(n):
    for m in range(n):
        gzero = at0(model.christoffel(m, j, j))
        if gzero:
            b -= gzero * at0(wit_fields[m])
print("formal divergence value:", a, flush=True)
print("model divergence value :", b, flush=True)
print("difference:", a - b, flush=True)
print("f(0)*core :", at0(field_of(f0)) * ev(core), flush=True)
print("expr value:", ev(expr), flush=True)
print("identity check (expr = f0*core + div):", ev(expr) - at0(field_of(f0)) * ev(core) - a, flush=True)
print("took", time.time() - t0, flush=True)

import random
import time
from fractions import Fraction
from itertools import product as iproduct

from wrescalc.covariant import CovCalc, cov_jet
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
hj = model.scalar_cov_jets(hpoly, 4)

def hess_field(model, f, out_order):
    # (grad f)_a then (hess f)_{ab}, exact to out_order
    comps = {(): model._trunc(f, out_order + 2)}
    comps = model.cov_extend(comps, 0, out_order + 1)
    comps = model.cov_extend(comps, 1, out_order)
    return comps

def trace_lap_field(model, f, out_order):
    nn = model.n
    comps = hess_field(model, f, out_order)
    acc = MultiPoly.zero(nn)
    for a in range(nn):
        for b in range(nn):
            acc = acc + model._trunc(model.inverse(a, b), out_order) * comps[(a, b)]
    return model._trunc(acc, out_order)

u_h = trace_lap_field(model, hpoly, 2)
u2_h = trace_lap_field(model, u_h, 0)
direct = u2_h.coefficient((0,) * n).real_fraction()

sum_jets = Fraction(0)
for a in range(n):
    for j in range(n):
        sum_jets += hj[(a, a, j, j)].coefficient((0,) * n).real_fraction()

print("direct bi-laplacian:", direct, flush=True)
print("sum of (a,a,j,j) jets:", sum_jets, flush=True)
print("match:", direct == sum_jets, flush=True)

# pure-geometry check that the integrand is the divergence of the usual flux
u_f = trace_lap_field(model, fpoly, 2)
lap2_h = trace_lap_field(model, u_h, 0)
lap2_f = trace_lap_field(model, u_f, 0)
f0v = fpoly.coefficient((0,) * n).real_fraction()
h0v = hpoly.coefficient((0,) * n).real_fraction()
integrand = f0v * lap2_h.coefficient((0,) * n).real_fraction() - h0v * lap2_f.coefficient((0,) * n).real_fraction()

# V_j = f u_h^{;j} - u_h f^{;j} + u_f h^{;j} - h u_f^{;j}, divergence at 0
def grad_field(model, f, out_order):
    comps = {(): model._trunc(f, out_order + 1)}
    return model.cov_extend(comps, 0, out_order)

gh = grad_field(model, hpoly, 1)
gf = grad_field(model, fpoly, 1)
guh = grad_field(model, u_h, 1)
guf = grad_field(model, u_f, 1)
ftr = model._trunc(fpoly, 1)
htr = model._trunc(hpoly, 1)

V = {}
for j in range(n):
    V[(j,)] = model._trunc(
        ftr * guh[(j,)] - model._trunc(u_h, 1) * gf[(j,)]
        + model._trunc(u_f, 1) * gh[(j,)] - htr * guf[(j,)], 1)
DV = model.cov_extend(V, 1, 0)
divv = Fraction(0)
for j in range(n):
    divv += DV[(j, j)].coefficient((0,) * n).real_fraction()
print("integrand:", integrand, flush=True)
print("div V    :", divv, flush=True)
print("integrand == divV:", integrand == divv, flush=True)
print("took", time.time() - t0, flush=True)

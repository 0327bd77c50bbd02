import time
from fractions import Fraction

from wrescalc.covariant import (CovCalc, cov_jet, curv_gen,
                                cov_check_selfadjoint, cov_strip_slot)
from wrescalc.polyring import MultiPoly, poly_sum

t0 = time.time()
n = 4
calc = CovCalc(n)

# Laplacian (trace of the Hessian) and its square, canonical components
def lap_power(calc, name, k):
    n = calc.n
    acc = []
    from itertools import product
    for idx in product(range(n), repeat=k):
        string = []
        for i in idx:
            string.extend([i, i])
        acc.append(calc.canonical_gen(cov_jet(name, tuple(string))))
    return poly_sum(n, acc)

lap = lap_power(calc, "h", 1)
ok, wit, defect = cov_check_selfadjoint(calc, lap)
print("lap selfadjoint:", ok, "defect terms", len(defect.terms), flush=True)

lap2 = lap_power(calc, "h", 2)
print("lap2 built", time.time() - t0, "terms", len(lap2.terms), flush=True)
ok, wit, defect = cov_check_selfadjoint(calc, lap2)
print("lap2 selfadjoint:", ok, "defect terms", len(defect.terms), time.time() - t0, flush=True)
if not ok:
    for t, c in defect.terms_sorted()[:12]:
        print("   ", c, t[1], flush=True)

# Weyl filtration identity in six dimensions
t1 = time.time()
m6 = CovCalc(6)
W = {}
from itertools import product as iproduct
for idx in iproduct(range(6), repeat=4):
    W[idx] = m6.weyl_component(*idx)
print("weyl table", time.time() - t1, flush=True)

f1 = {i: MultiPoly.from_gen(6, cov_jet("f", (i,))) for i in range(6)}
h1 = {i: MultiPoly.from_gen(6, cov_jet("h", (i,))) for i in range(6)}

lhs_terms = []
for i, j, k, l in iproduct(range(6), repeat=4):
    w = W[(i, j, k, l)]
    if w.is_zero():
        continue
    lhs_terms.append(f1[i] * m6.canonical_gen(cov_jet("h", (j, k, l))) * w)
lhs = poly_sum(6, lhs_terms)
print("lhs built", time.time() - t1, "terms", len(lhs.terms), flush=True)

rhs_terms = []
for i, k, j, l in iproduct(range(6), repeat=4):
    w = W[(i, k, j, l)]
    if w.is_zero():
        continue
    rhs_terms.append(f1[i] * h1[j] * m6.schouten_component(k, l) * w)
print("rhs part1", time.time() - t1, flush=True)
for i, k, l, mm in iproduct(range(6), repeat=4):
    w = W[(i, k, l, mm)]
    if w.is_zero():
        continue
    for j in range(6):
        w2 = W[(j, k, l, mm)]
        if w2.is_zero():
            continue
        rhs_terms.append(f1[i] * h1[j] * w * w2 * Fraction(1, 2))
rhs = poly_sum(6, rhs_terms)
print("rhs built", time.time() - t1, "terms", len(rhs.terms), flush=True)

diff = m6.canonicalize(lhs - rhs)
print("filtration identity holds:", diff.is_zero(), "in", time.time() - t1, flush=True)
if not diff.is_zero():
    print("residual terms", len(diff.terms), flush=True)
    for t, c in diff.terms_sorted()[:10]:
        print("   ", c, t[1], flush=True)
print("total", time.time() - t0, flush=True)

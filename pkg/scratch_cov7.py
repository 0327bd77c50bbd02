import random
import time
from fractions import Fraction
from itertools import product as iproduct

from wrescalc.geometry import random_metric_model

t0 = time.time()
n = 4
rng = random.Random(3)
model = random_metric_model(n, rng, degree=3)

rv = model.riemann_cov_jets(2)
at0 = lambda p: p.set_positions_zero(range(n)).coefficient((0,) * n).real_fraction()

def val(body, string=()):
    return at0(rv[("crv", tuple(body), tuple(string))])

# raw vs symmetry-filled rank-4 components
bad = 0
for c in iproduct(range(n), repeat=4):
    a = at0(model._riemann_low_raw(*c))
    b = at0(model.riemann_low(*c))
    if a != b:
        bad += 1
        if bad < 5:
            print("raw/fill mismatch", c, a, b, flush=True)
print("rank-4 raw vs filled mismatches:", bad, flush=True)

# Bianchi 2 on rank-5 values
bad = 0
for (i, j, k, l, m) in iproduct(range(n), repeat=5):
    s = val((i, j, k, l), (m,)) + val((i, j, l, m), (k,)) + val((i, j, m, k), (l,))
    if s != 0:
        bad += 1
        if bad < 5:
            print("bianchi2 fail", (i, j, k, l, m), s, flush=True)
print("bianchi2 failures:", bad, flush=True)

# independent nabla-R at origin: dR(0) - Gamma(0) corrections
bad = 0
for (i, j, k, l, m) in iproduct(range(n), repeat=5):
    body = (i, j, k, l)
    acc = at0(model.riemann_low(*body).diff_var(m))
    for q in range(4):
        for p in range(n):
            g0 = at0(model.christoffel(p, min(m, body[q]), max(m, body[q])))
            if g0:
                nb = body[:q] + (p,) + body[q + 1:]
                acc -= g0 * at0(model.riemann_low(*nb))
    if acc != val(body, (m,)):
        bad += 1
        if bad < 5:
            print("nablaR mismatch", (i, j, k, l, m), acc, val(body, (m,)), flush=True)
print("independent nablaR mismatches:", bad, flush=True)

# Ricci commutator on rank-6: R_{ijkl;ab} - R_{ijkl;ba} = sum_slots sum_m R_{m s a b} R[s->m]
bad = 0
for (i, j, k, l) in iproduct(range(n), repeat=4):
    for a in range(n):
        for b in range(n):
            lhs = val((i, j, k, l), (a, b)) - val((i, j, k, l), (b, a))
            rhs = Fraction(0)
            body = (i, j, k, l)
            for q in range(4):
                for m in range(n):
                    f = val((m, body[q], a, b))
                    if f:
                        rhs += f * val(body[:q] + (m,) + body[q + 1:])
            if lhs != rhs:
                bad += 1
                if bad < 4:
                    print("commutator fail", (i, j, k, l, a, b), lhs, rhs, flush=True)
print("rank-6 commutator failures:", bad, flush=True)
print("took", time.time() - t0, flush=True)

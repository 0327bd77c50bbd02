"""Reflection symbol over a curved patch and its middle-degree residue.

The flat engine gets away with a single exact symbol; over a curved metric
the reflection is only known through the recursion that inverts the form
Laplacian degree by degree.  Everything here happens in one polynomial
ring holding both cotangent and position variables, with the metric given
as a truncated normal-chart model.  Division by the principal symbol is
exact because symbols are stored as numerator over a power of the squared
length, so no series inversion enters the recursion itself.

The codifferential is built as the integration-by-parts adjoint of the
exterior derivative for the weighted coefficient pairing of the model:
wedge matrices are constant, and all metric dependence sits in Gram
matrices of the inverse metric times the volume density.  That makes the
Clifford identity for the Laplacian principal symbol a computable exact
statement, asserted on construction.

Downstream, the residue of the double commutator is averaged over the
cosphere, decoded into covariant jets of the two scalar slots, and checked
against the closed four-dimensional form.  The conformally flat route
repeats the pipeline with a formal factor in the metric and exchanges the
factor's second jets for its curvature data, which must cancel every
remaining first jet of the factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .covariant import (CovCalc, audit_cov_homogeneity, cov_derivative,
                        cov_ibp_to_operator, cov_jet, curv_gen)
from .flat import RESIDUE_TABLE_SCALE, middle_degree
from .forms import FormMatrix, epsilon, form_basis, iota
from .geometry import (MetricModel, conformal_metric, curvature_normal_metric,
                       formal_scalar, partial_jets_in_cov, substitute_gens)
from .multiindex import enumerate_multiindices, mi_factorial, unit_index
from .polyring import MultiPoly, jet_gen, poly_sum
from .rationals import QI
from .sphere import integrate_residue_trace
from .symbols import (EXACT, GradedSymbol, HomogSymbol, SymbolContext,
                      compose, residue_component_of_product)

# Generator kind for scalar jets that must sit still under coordinate
# derivatives of symbols.  The conformal factor lives in the metric, so its
# jets are base-point constants for the symbol calculus even though the
# geometry layer treats them as jets; pinning avoids the double count.
_PINNED = "pinned"


def pin_scalar_jets(p: MultiPoly, name: str) -> MultiPoly:
    def fn(g):
        if g[0] == "jet" and g[1] == name:
            return MultiPoly.from_gen(p.nv, (_PINNED, g[1], g[2]))
        return None
    return substitute_gens(p, fn)


def unpin_scalar_jets(p: MultiPoly, name: str) -> MultiPoly:
    def fn(g):
        if g[0] == _PINNED and g[1] == name:
            return MultiPoly.from_gen(p.nv, jet_gen(g[1], g[2]))
        return None
    return substitute_gens(p, fn)


def flat_model(n: int, order: int = 2) -> MetricModel:
    """Identity metric as a model, for specialization checks."""
    entries = {(i, i): MultiPoly.const(n, 1) for i in range(n)}
    return MetricModel(n, entries, order)


# ---------------------------------------------------------------------------
# determinants and series needed for the weighted pairing


def _perm_sign(perm) -> int:
    inv = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                inv += 1
    return -1 if inv % 2 else 1


def _minor_det(entry, rows, cols, nv: int, order: int) -> MultiPoly:
    acc = []
    for perm in permutations(range(len(rows))):
        term = MultiPoly.const(nv, _perm_sign(perm))
        for a, b in enumerate(perm):
            term = term * entry(rows[a], cols[b])
            term = term.truncate_positions(range(nv), order)
        acc.append(term)
    return poly_sum(nv, acc)


def _sqrt_series(p: MultiPoly, nv: int, order: int) -> MultiPoly:
    # binomial series for (1 + s)^{1/2}; s has no constant term
    s = p - MultiPoly.const(nv, 1)
    acc = MultiPoly.const(nv, 1)
    pw = MultiPoly.const(nv, 1)
    coef = Fraction(1)
    for k in range(1, order + 1):
        pw = (pw * s).truncate_positions(range(nv), order)
        if pw.is_zero():
            break
        coef = coef * (Fraction(1, 2) - (k - 1)) / k
        acc = acc + pw * coef
    return acc


# ---------------------------------------------------------------------------
# the calculus over one metric model


class CurvedCalculus:
    """Symbols of d, its adjoint, the form Laplacian and the reflection
    over one normal-chart metric model.

    The context keeps the cotangent variables first and the positions
    after them, so the model's polynomials embed by an offset.  Scalar
    names listed in `pinned` have their jet generators rewritten to an
    inert kind before entering any symbol.
    """

    def __init__(self, model: MetricModel, pinned=()):
        n = model.n
        self.model = model
        self.n = n
        self.pinned = tuple(pinned)
        nv = 2 * n
        norm = MultiPoly.zero(nv)
        for j in range(n):
            for k in range(n):
                gjk = self._embed(model.inverse(j, k))
                if gjk.is_zero():
                    continue
                norm = norm + gjk * MultiPoly.var(nv, j) * MultiPoly.var(nv, k)
        self.ctx = SymbolContext(n=n, nv=nv, xi=tuple(range(n)),
                                 x=tuple(range(n, nv)), norm_sq=norm)
        self._weights: dict = {}
        self._weight_invs: dict = {}
        self._sqrt_det = None
        self._cache: dict = {}

    # -- embedding model polynomials into the symbol ring ---------------

    def _embed(self, p: MultiPoly) -> MultiPoly:
        for name in self.pinned:
            p = pin_scalar_jets(p, name)
        return p.extend_vars(2 * self.n, offset=self.n)

    # -- weighted coefficient pairing -----------------------------------

    def _volume_density(self) -> MultiPoly:
        if self._sqrt_det is None:
            n, order = self.n, self.model.order
            det = _minor_det(lambda a, b: self.model.g[(a, b)],
                             tuple(range(n)), tuple(range(n)), n, order)
            self._sqrt_det = _sqrt_series(det, n, order)
        return self._sqrt_det

    def pairing_matrix(self, m: int) -> FormMatrix:
        """Gram matrix of the degree-m coefficient pairing times the
        volume density, in the model's variables.  Identity at the origin."""
        got = self._weights.get(m)
        if got is not None:
            return got
        n, order = self.n, self.model.order
        basis = form_basis(n, m)
        vol = self._volume_density()
        out = FormMatrix(len(basis), len(basis), n)
        for r, I in enumerate(basis):
            for c, J in enumerate(basis):
                d = _minor_det(self.model.inverse, I, J, n, order)
                d = (d * vol).truncate_positions(range(n), order)
                if not d.is_zero():
                    out.put(r, c, d)
        self._weights[m] = out
        return out

    def pairing_inverse(self, m: int) -> FormMatrix:
        got = self._weight_invs.get(m)
        if got is not None:
            return got
        n, order = self.n, self.model.order
        w = self.pairing_matrix(m)
        dim = w.rows
        ident = FormMatrix.identity(dim, n)
        h = ident - w
        total = ident
        term = ident
        for _ in range(order):
            term = (term @ h).map_entries(
                lambda p: p.truncate_positions(range(n), order))
            if term.is_zero():
                break
            total = total + term
        self._weight_invs[m] = total
        return total

    def _embed_matrix(self, mat: FormMatrix) -> FormMatrix:
        return mat.map_entries(self._embed)

    # -- first-order symbols --------------------------------------------

    def d_symbol(self, m: int) -> GradedSymbol:
        """Exterior derivative from degree m, coordinate-exact."""
        key = ("d", m)
        got = self._cache.get(key)
        if got is None:
            ctx = self.ctx
            xi = [MultiPoly.var(ctx.nv, j) for j in range(self.n)]
            mat = epsilon(self.n, m, xi).scale(QI.minus_i_power(3))
            got = GradedSymbol(ctx, {1: HomogSymbol(ctx, mat, 0, 1, EXACT)},
                               1, 1, exact_below=True)
            self._cache[key] = got
        return got

    def codifferential_symbol(self, m: int) -> GradedSymbol:
        """Adjoint of d for the weighted pairing, from degree m."""
        key = ("delta", m)
        got = self._cache.get(key)
        if got is not None:
            return got
        n, ctx, order = self.n, self.ctx, self.model.order
        w = self.pairing_matrix(m)
        winv = self._embed_matrix(self.pairing_inverse(m - 1))
        wmat = self._embed_matrix(w)
        xi = [MultiPoly.var(ctx.nv, j) for j in range(n)]
        top = (winv @ iota(n, m, xi) @ wmat).scale(QI.minus_i_power(1))
        top = top.map_entries(lambda p: ctx.truncate(p, order))
        s1 = HomogSymbol(ctx, top, 0, 1, order)
        low = FormMatrix(winv.rows, wmat.cols, ctx.nv)
        for j in range(n):
            dw = w.map_entries(lambda p: p.diff_var(j))
            if dw.is_zero():
                continue
            ej = [MultiPoly.const(ctx.nv, 1 if k == j else 0)
                  for k in range(n)]
            low = low + (winv @ iota(n, m, ej) @ self._embed_matrix(dw))
        low = low.scale(-1).map_entries(lambda p: ctx.truncate(p, order - 1))
        s0 = HomogSymbol(ctx, low, 0, 0, order - 1)
        got = GradedSymbol(ctx, {1: s1, 0: s0}, 1, 0, exact_below=True)
        self._cache[key] = got
        return got

    # -- second-order compositions --------------------------------------

    @staticmethod
    def _as_diffop(g: GradedSymbol) -> GradedSymbol:
        comps = {d: c for d, c in g.comps.items() if not c.is_zero()}
        if comps and min(comps) < 0:
            raise AssertionError("differential symbol reached negative degree")
        return GradedSymbol(g.ctx, comps, g.top, 0, exact_below=True)

    @staticmethod
    def _graded_add(a: GradedSymbol, b: GradedSymbol) -> GradedSymbol:
        comps = dict(a.comps)
        for d, c in b.comps.items():
            comps[d] = c if d not in comps else comps[d].add(c)
        return GradedSymbol(a.ctx, comps, max(a.top, b.top),
                            min(a.floor, b.floor),
                            exact_below=a.exact_below and b.exact_below)

    def ddelta_symbol(self, m: int | None = None) -> GradedSymbol:
        """Composition d after its adjoint, on degree m."""
        if m is None:
            m = middle_degree(self.n)
        key = ("ddelta", m)
        got = self._cache.get(key)
        if got is None:
            got = self._as_diffop(compose(self.d_symbol(m - 1),
                                          self.codifferential_symbol(m), 0))
            self._cache[key] = got
        return got

    def laplacian_symbol(self, m: int | None = None) -> GradedSymbol:
        if m is None:
            m = middle_degree(self.n)
        key = ("lap", m)
        got = self._cache.get(key)
        if got is not None:
            return got
        lap = self._graded_add(
            self.ddelta_symbol(m),
            self._as_diffop(compose(self.codifferential_symbol(m + 1),
                                    self.d_symbol(m), 0)))
        dim = len(form_basis(self.n, m))
        want = HomogSymbol.identity(self.ctx, dim, jet_order=self.model.order)
        want = want.scale_poly(self.ctx.norm_sq, xi_deg=2)
        got2 = lap.component(2)
        if got2 is None or not got2.sub(want).is_zero():
            raise AssertionError("principal symbol is not the squared length")
        self._cache[key] = lap
        return lap

    # -- homogeneous inversion ------------------------------------------

    def projection_symbol(self, m: int | None = None,
                          floor: int = -2) -> GradedSymbol:
        """Symbol of the projection onto the image of d, degree by degree.

        Solves  laplacian o projection = ddelta  for the graded components,
        dividing by the principal symbol exactly through the stored
        denominator power.
        """
        if m is None:
            m = middle_degree(self.n)
        key = ("proj", m, floor)
        got = self._cache.get(key)
        if got is not None:
            return got
        lap = self.laplacian_symbol(m)
        target = self.ddelta_symbol(m)
        dim = len(form_basis(self.n, m))
        comps: dict = {}
        for r in range(0, 1 - floor):
            acc = target.component(2 - r)
            if acc is None:
                acc = HomogSymbol.zero(self.ctx, dim, dim, 2 - r)
            for s in range(r):
                known = comps[-s]
                for e in (2, 1, 0):
                    k = e + r - s - 2
                    if k < 0:
                        continue
                    le = lap.component(e)
                    if le is None or le.is_zero():
                        continue
                    for alpha in enumerate_multiindices(self.n, k):
                        term = le.dxi_multi(alpha).mul(known.d_coords(alpha))
                        if k:
                            term = term.scale(Fraction(1, mi_factorial(alpha)))
                        acc = acc.sub(term)
            part = acc.copy_with(denom_pow=acc.denom_pow + 1,
                                 degree=acc.degree - 2)
            part.check_homogeneity()
            comps[-r] = part
        got = GradedSymbol(self.ctx, comps, 0, floor, exact_below=False)
        self._cache[key] = got
        return got

    def reflection_symbol(self, m: int | None = None,
                          floor: int = -2) -> GradedSymbol:
        """Twice the projection minus the identity."""
        if m is None:
            m = middle_degree(self.n)
        proj = self.projection_symbol(m, floor)
        dim = len(form_basis(self.n, m))
        comps = {d: c.scale(2) for d, c in proj.comps.items()}
        comps[0] = comps[0].sub(HomogSymbol.identity(self.ctx, dim))
        return GradedSymbol(self.ctx, comps, 0, floor, exact_below=False)


def audit_projection(cc: CurvedCalculus, m: int | None = None,
                     floor: int = -2) -> None:
    """Re-check the defining equation and idempotence through the
    independent composition routine, at the retained jet orders."""
    if m is None:
        m = middle_degree(cc.n)
    proj = cc.projection_symbol(m, floor)
    lap = cc.laplacian_symbol(m)
    target = cc.ddelta_symbol(m)
    dim = len(form_basis(cc.n, m))
    back = compose(lap, proj, floor + 2)
    for d in range(2, floor + 1, -1):
        got = back.component(d)
        want = target.component(d)
        if want is None:
            want = HomogSymbol.zero(cc.ctx, dim, dim, d)
        if got is None:
            got = HomogSymbol.zero(cc.ctx, dim, dim, d)
        if not got.sub(want).is_zero():
            raise AssertionError(f"defining equation fails at degree {d}")
    again = compose(proj, proj, floor)
    for d in range(0, floor - 1, -1):
        got = again.component(d)
        want = proj.component(d)
        if got is None:
            got = HomogSymbol.zero(cc.ctx, dim, dim, d)
        if not got.sub(want).is_zero():
            raise AssertionError(f"idempotence fails at degree {d}")
    refl = cc.reflection_symbol(m, floor)
    sq = compose(refl, refl, floor)
    ident = HomogSymbol.identity(cc.ctx, dim)
    for d in range(0, floor - 1, -1):
        got = sq.component(d)
        if got is None:
            got = HomogSymbol.zero(cc.ctx, dim, dim, d)
        want = ident if d == 0 else HomogSymbol.zero(cc.ctx, dim, dim, d)
        if not got.sub(want).is_zero():
            raise AssertionError(f"involution fails at degree {d}")


# ---------------------------------------------------------------------------
# residue of the double commutator over the model


def curved_residue_density(cc: CurvedCalculus, fname: str = "f",
                           hname: str = "h") -> MultiPoly:
    """Cosphere average of the middle-degree residue, as a bilinear
    polynomial in the partial jets of the two scalars with the model's
    generators as coefficients.  Carries the table normalization."""
    n = cc.n
    res = residue_component_of_product(cc.reflection_symbol(), fname, hname, n)
    jp = integrate_residue_trace(res) * RESIDUE_TABLE_SCALE
    if jp.degree_in(range(jp.nv)) > 0:
        raise AssertionError("positions survived the cosphere average")
    out = {((0,) * n, gens): c for (_e, gens), c in jp.terms.items()}
    return MultiPoly(n, out)


def density_in_cov_jets(model: MetricModel, density: MultiPoly,
                        max_order: int, names=("f", "h")) -> MultiPoly:
    """Exchange partial jets of the named scalars for covariant ones."""
    tables = {name: partial_jets_in_cov(model, name, max_order)
              for name in names}
    def fn(g):
        if g[0] == "jet" and g[1] in tables:
            return tables[g[1]][g[2]]
        return None
    return substitute_gens(density, fn)


@dataclass(frozen=True)
class CurvedBilinear:
    n: int
    calc: CovCalc
    model: MetricModel
    density: MultiPoly        # partial jets, curvature coefficients
    raw: MultiPoly            # covariant jets, unreduced
    value: MultiPoly          # canonical form


def bn_curved(n: int = 4, calc: CovCalc | None = None) -> CurvedBilinear:
    """Four-dimensional bilinear table over a curvature normal chart.

    The chart keeps curvature only at the base point; deeper metric data
    would exceed what the degree budget of the residue can read, so other
    dimensions are refused rather than silently truncated.
    """
    if n != 4:
        raise ValueError("curved table is wired for dimension four only")
    if calc is None:
        calc = CovCalc(n)
    model = curvature_normal_metric(calc)
    cc = CurvedCalculus(model)
    density = curved_residue_density(cc)
    raw = density_in_cov_jets(model, density, n - 1)
    value = calc.canonicalize(raw)
    audit_cov_homogeneity(value, n)
    return CurvedBilinear(n, calc, model, density, raw, value)


# ---------------------------------------------------------------------------
# closed four-dimensional forms, written as complete contractions


def _cj(n: int, name: str, string) -> MultiPoly:
    return MultiPoly.from_gen(n, cov_jet(name, tuple(string)))


def gradient_pairing(n: int, fname: str = "f", hname: str = "h") -> MultiPoly:
    return poly_sum(n, [_cj(n, fname, (i,)) * _cj(n, hname, (i,))
                        for i in range(n)])


def trace_level_normalized(n: int) -> MultiPoly:
    """Scalar curvature over 2(n-1), as the full double trace."""
    acc = [MultiPoly.from_gen(n, curv_gen((k, i, k, i)))
           for k in range(n) for i in range(n)]
    return poly_sum(n, acc) * Fraction(1, 2 * (n - 1))


def b4_covariant(n: int = 4, fname: str = "f", hname: str = "h") -> MultiPoly:
    """The closed form of the four-dimensional table: flat part plus the
    trace term on the gradient pairing.  Every repeated index is summed
    over the whole range, so the expression strips soundly."""
    acc = []
    for i in range(n):
        for j in range(n):
            acc.append(_cj(n, fname, (i, j, j)) * _cj(n, hname, (i,)) * -4)
            acc.append(_cj(n, hname, (i, j, j)) * _cj(n, fname, (i,)) * -4)
            acc.append(_cj(n, fname, (i, j)) * _cj(n, hname, (i, j)) * -4)
            acc.append(_cj(n, fname, (i, i)) * _cj(n, hname, (j, j)) * -2)
    flat_part = poly_sum(n, acc)
    return flat_part + trace_level_normalized(n) * gradient_pairing(
        n, fname, hname) * 8


def paneitz_operator(calc: CovCalc, hname: str = "h") -> MultiPoly:
    """Fourth-order conformally covariant operator on scalars, in the
    positive-Laplacian convention: squared Laplacian, trace-level times
    the Laplacian, the trace-adjusted Ricci paired with the Hessian, and
    the gradient of the trace level paired with the gradient."""
    n = calc.n
    jlev = calc.normalized_scalar()
    acc = []
    for i in range(n):
        for j in range(n):
            acc.append(_cj(n, hname, (i, i, j, j)))
            acc.append(calc.schouten_component(i, j) * _cj(n, hname, (i, j)) * 4)
        acc.append(jlev * _cj(n, hname, (i, i)) * -2)
        acc.append(cov_derivative(jlev, i) * _cj(n, hname, (i,)) * 2)
    return poly_sum(n, acc)


@dataclass(frozen=True)
class CurvedOperator:
    n: int
    bilinear: CurvedBilinear
    reference: MultiPoly      # complete-contraction source that was stripped
    core: MultiPoly           # stripped operator, unreduced
    value: MultiPoly          # canonical form
    witness: tuple


def pn_curved(n: int = 4, calc: CovCalc | None = None) -> CurvedOperator:
    """Critical operator extracted from the curved table by stripping the
    first slot off the closed form.

    Stripping is only sound on a complete-contraction representative, so
    the pipeline first checks that the computed table agrees with the
    closed form and then strips the closed form itself.
    """
    bil = bn_curved(n, calc)
    calc = bil.calc
    reference = b4_covariant(n)
    if not (calc.canonicalize(reference) - bil.value).is_zero():
        raise AssertionError("curved table drifted from its closed form")
    core, witness = cov_ibp_to_operator(calc, reference)
    value = calc.canonicalize(core)
    return CurvedOperator(n, bil, reference, core, value, witness)


def cov_leading_coefficient(calc: CovCalc, P: MultiPoly, n: int,
                            hname: str = "h") -> Fraction:
    """Coefficient on the half-power of the Laplacian, sign convention
    matching the flat extractor.  Asserts the top order is exactly that
    power."""
    spike = P.coefficient((0,) * P.nv, ((cov_jet(hname, (0,) * n), 1),))
    acc = []
    half = n // 2
    for combo in _index_tuples(n, half):
        string = []
        for i in combo:
            string.extend((i, i))
        acc.append(_cj(n, hname, string))
    pattern = poly_sum(n, acc)
    diff = calc.canonicalize(P - pattern * spike)
    for (_e, gens), _c in diff.terms.items():
        for g, _k in gens:
            if g[0] == "cjet" and g[1] == hname and len(g[2]) == n:
                if all(gg[0] != "crv" and gg[0] != "rho" for gg, _ in gens):
                    raise AssertionError(
                        "top order is not a pure Laplacian power")
    lead = spike.real_fraction()
    return lead if half % 2 == 0 else -lead


def _index_tuples(n: int, length: int):
    if length == 0:
        yield ()
        return
    for head in range(n):
        for rest in _index_tuples(n, length - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# conformally flat route


def conformally_flat_riemann(n: int):
    """Curvature components of a conformally flat patch, expanded in the
    trace-adjusted rank-two generators.  Passed to the canonicalizer so
    no free four-index generator appears downstream."""
    def rho(a, b):
        pair = (a, b) if a <= b else (b, a)
        return MultiPoly.from_gen(n, ("rho", pair, ()))

    def fn(i, j, k, l):
        acc = MultiPoly.zero(n)
        if i == l:
            acc = acc - rho(j, k)
        if i == k:
            acc = acc + rho(j, l)
        if j == k:
            acc = acc - rho(i, l)
        if j == l:
            acc = acc + rho(i, k)
        return acc
    return fn


def conformal_hessian_exchange(model: MetricModel) -> dict:
    """Replacement table for the second partial jets of the conformal
    factor, validated against the model before use.

    The covariant Hessian of the factor equals minus its trace-adjusted
    Ricci, minus the squared first jets, plus half the gradient square
    times the metric; the identity is checked exactly in the factor's
    jets, then the rank-two data is renamed to formal generators."""
    n = model.n
    cov = model.scalar_cov_jets(formal_scalar(n, "eta", 2), 2)
    rc = {}
    for i in range(n):
        for j in range(n):
            rc[(i, j)] = poly_sum(n, [
                model.at_origin(model.riemann_low(k, i, k, j))
                for k in range(n)])
    jlev = poly_sum(n, [rc[(i, i)] for i in range(n)]) * Fraction(
        1, 2 * (n - 1))
    eta1 = [MultiPoly.from_gen(n, jet_gen("eta", unit_index(n, k)))
            for k in range(n)]
    grad_sq = poly_sum(n, [e * e for e in eta1])
    subs = {}
    for i in range(n):
        for j in range(i, n):
            rho_model = (rc[(i, j)] - (jlev if i == j else MultiPoly.zero(n))
                         ) * Fraction(1, n - 2)
            expected = rho_model * -1 - eta1[i] * eta1[j]
            if i == j:
                expected = expected + grad_sq * Fraction(1, 2)
            if not (cov[(i, j)] - expected).is_zero():
                raise AssertionError("factor Hessian identity failed")
            beta = tuple(a + b for a, b in zip(unit_index(n, i),
                                               unit_index(n, j)))
            shift = MultiPoly.from_gen(n, jet_gen("eta", beta)) - cov[(i, j)]
            for (_e, gens), _c in shift.terms.items():
                for g, _k in gens:
                    if g[0] == "jet" and g[1] == "eta" and sum(g[2]) > 1:
                        raise AssertionError("displacement kept a second jet")
            rep = shift - MultiPoly.from_gen(n, ("rho", (i, j), ())) \
                - eta1[i] * eta1[j]
            if i == j:
                rep = rep + grad_sq * Fraction(1, 2)
            subs[beta] = rep
    return subs


@dataclass(frozen=True)
class ConformalBilinear:
    n: int
    calc: CovCalc
    model: MetricModel
    density: MultiPoly        # partial jets of scalars and factor
    raw: MultiPoly            # covariant scalar jets, factor jets explicit
    value: MultiPoly          # canonical, factor fully exchanged
    target: MultiPoly         # closed form in the same generators
    matches: bool


def bn_conformal(n: int = 4) -> ConformalBilinear:
    """The table over a conformally flat patch, reduced to curvature data.

    Every first jet of the factor must cancel once the second jets are
    exchanged for curvature; a leftover signals a transform bug and is
    raised, not returned."""
    if n != 4:
        raise ValueError("conformal route is wired for dimension four only")
    model = conformal_metric(n, order=2)
    cc = CurvedCalculus(model, pinned=("eta",))
    density = unpin_scalar_jets(curved_residue_density(cc), "eta")
    raw = density_in_cov_jets(model, density, n - 1)
    subs = conformal_hessian_exchange(model)

    def swap(g):
        if g[0] == "jet" and g[1] == "eta" and sum(g[2]) >= 2:
            rep = subs.get(g[2])
            if rep is None:
                raise AssertionError("factor jet beyond the exchange table")
            return rep
        return None

    reduced = substitute_gens(raw, swap)
    calc = CovCalc(n, riemann=conformally_flat_riemann(n))
    value = calc.canonicalize(reduced)
    resid = value.select(
        lambda key: any(g[0] == "jet" for g, _k in key[1]))
    if not resid.is_zero():
        raise AssertionError("conformal factor failed to cancel")
    flat_part = []
    for i in range(n):
        for j in range(n):
            flat_part.append(_cj(n, "f", (i, j, j)) * _cj(n, "h", (i,)) * -4)
            flat_part.append(_cj(n, "h", (i, j, j)) * _cj(n, "f", (i,)) * -4)
            flat_part.append(_cj(n, "f", (i, j)) * _cj(n, "h", (i, j)) * -4)
            flat_part.append(_cj(n, "f", (i, i)) * _cj(n, "h", (j, j)) * -2)
    trace_rho = poly_sum(n, [MultiPoly.from_gen(n, ("rho", (i, i), ()))
                             for i in range(n)])
    target = poly_sum(n, flat_part) + trace_rho * gradient_pairing(n) * 8
    target = calc.canonicalize(target)
    matches = (value - target).is_zero()
    return ConformalBilinear(n, calc, model, density, raw, value, target,
                             matches)

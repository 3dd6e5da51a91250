"""Step-by-step recovery of the monomial symmetric values m_lambda(x_1..x_d)
from the power sums c_n = sum over compositions of prod b_{k_i} x_i**k_i.

At step n the unknowns are m_lambda for partitions of n with at most d
parts.  The equations are the expansions of products p_mu = prod_j m_(mu_j)
for non-trivial partitions mu of n whose factors are already known, plus the
observed c_n.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

from .exact import SR, UnsupportedArgument, gamma_half
from .sympoly import (Partition, partitions_le, build_cn, power_sum_expansion,
                      monomial_sym, verify_identity, SymPoly)


class StructurallySingular(ArithmeticError):
    pass


class IdentityFailure(AssertionError):
    pass


class MissingPrerequisite(LookupError):
    pass


# fraction-free elimination -------------------------------------------------

def bareiss(rows, div=None):
    """Fraction-free forward elimination.

    Works over any ring whose exact division is ``div`` (defaults to ``/``,
    fine for ints and Fractions).  Returns (echelon rows, pivot columns).
    """
    div = div or (lambda a, b: a / b)
    M = [list(r) for r in rows]
    if not M:
        return [], []
    nrows, ncols = len(M), len(M[0])
    prev = 1
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                M[i][j] = div(M[r][c] * M[i][j] - M[i][c] * M[r][j], prev)
            M[i][c] = 0 * M[i][c]
        # rows above the current one keep their entries; only the trailing
        # block is updated, as in the textbook scheme
        prev = M[r][c]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(rows, div=None):
    return len(bareiss(rows, div)[1])


def determinant(rows, div=None):
    """Determinant of a square matrix by Bareiss elimination."""
    n = len(rows)
    M = [list(r) for r in rows]
    div = div or (lambda a, b: a / b)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0 * M[0][0]
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = div(M[k][k] * M[i][j] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rref(rows, rhs=None):
    """Reduced row echelon form over Fractions (Gauss-Jordan after a
    fraction-free forward pass).  Returns (rows, rhs, pivot columns)."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) + ([Fraction(rhs[i])] if rhs is not None and rhs[i] is not None else [Fraction(0)])
           for i, r in enumerate(rows)]
    M, pivots = bareiss(aug)
    M = [r for r in M[:len(pivots)]]
    for i, c in enumerate(pivots):
        p = M[i][c]
        M[i] = [x / p for x in M[i]]
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        for k in range(i):
            f = M[k][c]
            if f:
                M[k] = [a - f * b for a, b in zip(M[k], M[i])]
    # a pivot in the augmented column means an inconsistent system
    pivots = [c for c in pivots if c < ncols]
    return [r[:ncols] for r in M], [r[ncols] for r in M], pivots


# step systems -------------------------------------------------------------

@dataclass
class StepRow:
    label: str
    coeffs: list          # Fractions over the unknowns
    value: object = None  # Fraction right-hand side when data is available


@dataclass
class StepSystem:
    n: int
    d: int
    unknowns: list
    product_rows: list
    c_row: StepRow
    skipped: list = field(default_factory=list)

    def matrix(self, with_c=True):
        rows = [r.coeffs for r in self.product_rows]
        if with_c:
            rows = rows + [self.c_row.coeffs]
        return rows


@dataclass
class StepReport:
    n: int
    unknowns: list
    rank_products: int
    rank_full: int
    degenerate: bool
    determined: list
    combinations: list
    skipped: list


@dataclass
class EliminationState:
    d: int
    known: dict = field(default_factory=dict)      # Partition -> value or None
    lineage: dict = field(default_factory=dict)    # Partition -> step number
    steps: list = field(default_factory=list)
    degenerate_steps: list = field(default_factory=list)
    complete: bool = False

    def elementary(self):
        """e_1..e_d as m_{1^k} if known (None otherwise)."""
        out = []
        for k in range(1, self.d + 1):
            lam = Partition((1,) * k)
            out.append(self.known[lam] if lam in self.known else None)
        return out

    def to_json(self):
        def val(v):
            if v is None:
                return None
            return str(v)
        return {
            "d": self.d,
            "degenerate_steps": list(self.degenerate_steps),
            "complete": self.complete,
            "known": {lam.label(): {"step": self.lineage[lam], "value": val(v)}
                      for lam, v in sorted(self.known.items(), key=lambda kv: (sum(kv[0]), tuple(kv[0])))},
            "steps": [{"n": s.n,
                       "unknowns": [u.label() for u in s.unknowns],
                       "rank_products": s.rank_products,
                       "rank_full": s.rank_full,
                       "degenerate": s.degenerate,
                       "determined": [u.label() for u in s.determined],
                       "combinations": s.combinations,
                       "skipped_products": s.skipped}
                      for s in self.steps],
        }


def _normalize_row(entries, value=None):
    """Scale a row of ScaledRationals sharing one radical class to Fractions."""
    nz = [e for e in entries if not e.is_zero()]
    if not nz:
        return [Fraction(0)] * len(entries), None if value is None else Fraction(0)
    unit = SR(1, *nz[0].radical)
    out = []
    for e in entries:
        r = e / unit
        if not r.is_rational():
            raise UnsupportedArgument("c_n row mixes radical classes")
        out.append(r.q)
    if value is not None:
        v = SR.coerce(value) / unit
        if not v.is_rational():
            raise UnsupportedArgument("c_n value is not in the row's radical class")
        value = v.q
    return out, value


def _product_label(mu):
    return "*".join(f"m{p}" for p in mu)


def step_system(n, d, b, known=None, c_value=None, strict=True):
    """Assemble the step-n system.

    ``known`` maps partitions to values (or None when only the fact of being
    known matters).  Products needing an unknown factor raise
    MissingPrerequisite in strict mode and are skipped otherwise.
    """
    known = known if known is not None else {}
    unknowns = partitions_le(n, d)
    index = {lam: i for i, lam in enumerate(unknowns)}
    rows, skipped = [], []
    for mu in partitions_le(n, n):
        if mu.length < 2:
            continue
        factors = [Partition((p,)) for p in mu]
        missing = [f for f in factors if f not in known]
        if missing:
            if strict:
                raise MissingPrerequisite(
                    f"step {n}: product {_product_label(mu)} needs {', '.join(f.label() for f in missing)}")
            skipped.append(_product_label(mu))
            continue
        expansion = power_sum_expansion(mu, d)
        coeffs = [Fraction(0)] * len(unknowns)
        for lam, c in expansion.items():
            coeffs[index[lam]] = Fraction(c)
        value = None
        if all(known[f] is not None for f in factors):
            value = math.prod(known[f] for f in factors)
        rows.append(StepRow(_product_label(mu), coeffs, value))
    cn = build_cn(d, n, b)
    basis = cn.to_m_basis()
    entries = [basis.get(lam, SR(0)) for lam in unknowns]
    coeffs, value = _normalize_row(entries, c_value)
    return StepSystem(n, d, unknowns, rows, StepRow(f"c{n}", coeffs, value), skipped)


def _solve_step(system):
    prod_rows = system.matrix(with_c=False)
    full_rows = system.matrix(with_c=True)
    r_prod = rank(prod_rows) if prod_rows else 0
    r_full = rank(full_rows)
    have_values = (all(r.value is not None for r in system.product_rows)
                   and system.c_row.value is not None)
    rhs = ([r.value for r in system.product_rows] + [system.c_row.value]) if have_values else None
    R, vals, pivots = rref(full_rows, rhs)
    determined, combos = {}, []
    for row, v, c in zip(R, vals, pivots):
        support = [j for j, x in enumerate(row) if x != 0]
        if support == [c]:
            determined[system.unknowns[c]] = v if have_values else None
        else:
            combos.append(" + ".join(f"{row[j]}*{system.unknowns[j].label()}" for j in support))
    return r_prod, r_full, determined, combos


def run_elimination(d, b, max_n, x=None):
    """Run steps 1..max_n.  Never raises on singular steps; they are recorded
    as degenerate.  With a concrete point ``x`` the values are solved too."""
    b = [SR.coerce(v) for v in b]
    if len(b) <= max_n:
        raise ValueError(f"need b_0..b_{max_n}")
    state = EliminationState(d)
    cvals = {}
    if x is not None:
        for n in range(1, max_n + 1):
            cvals[n] = build_cn(d, n, b).evaluate(x)
    for n in range(1, max_n + 1):
        system = step_system(n, d, b, state.known, cvals.get(n), strict=False)
        r_prod, r_full, determined, combos = _solve_step(system)
        degenerate = r_full == r_prod
        if degenerate:
            state.degenerate_steps.append(n)
        fresh = []
        for lam, v in determined.items():
            if lam not in state.known:
                state.known[lam] = v
                state.lineage[lam] = n
                fresh.append(lam)
        state.steps.append(StepReport(n, system.unknowns, r_prod, r_full, degenerate,
                                      fresh, combos, system.skipped))
    state.complete = all(v is not None or x is None for v in state.elementary()) and \
        all(Partition((1,) * k) in state.known for k in range(1, d + 1))
    return state


# symbolic thresholds -------------------------------------------------------

def _sympy_div(a, b):
    import sympy
    return sympy.cancel(a / b)


def symbolic_step_matrix(n, d=None):
    """Generic step-n matrix with symbols b0..bn; last row is c_n divided by
    b0**(d - n)."""
    import sympy
    d = n if d is None else d
    bs = sympy.symbols(f"b0:{n + 1}")
    unknowns = partitions_le(n, d)
    index = {lam: i for i, lam in enumerate(unknowns)}
    rows = []
    for mu in partitions_le(n, n):
        if mu.length < 2:
            continue
        row = [sympy.Integer(0)] * len(unknowns)
        for lam, c in power_sum_expansion(mu, d).items():
            row[index[lam]] = sympy.Rational(c.numerator, c.denominator)
        rows.append(row)
    crow = []
    for lam in unknowns:
        e = bs[0] ** (d - lam.length)
        for p in lam:
            e = e * bs[p]
        crow.append(e)
    return rows, crow, bs, unknowns


def independence_threshold(n, d=None):
    """b_n = C_n(b_0, ..., b_{n-1}) at which the generic step-n system is
    singular, as a sympy expression."""
    import sympy
    d = n if d is None else d
    rows, crow, bs, unknowns = symbolic_step_matrix(n, d)
    if len(rows) + 1 != len(unknowns):
        raise StructurallySingular(
            f"step {n} with d={d}: the products alone fix every unknown, so c{n} "
            f"is dependent for every b{n}")
    if rank(rows, _sympy_div) != len(unknowns) - 1:
        raise StructurallySingular(f"step {n}: product rows are rank deficient")
    det = sympy.expand(determinant(rows + [crow], _sympy_div))
    poly = sympy.Poly(det, bs[n])
    if poly.degree() < 1:
        raise StructurallySingular(f"step {n}: determinant does not involve b{n}")
    D1, D0 = poly.all_coeffs()
    return sympy.factor(sympy.cancel(-D0 / D1))


# the d = 3 certificate ---------------------------------------------------

def v_b_coefficients(order=8):
    from .series import v_coefficients
    a = v_coefficients(order)
    return [a[k] * gamma_half(k) for k in range(order)]


_K = SR(1, 1, 3)  # sqrt(2) * pi**(3/2)


@dataclass
class Certificate:
    checks: list
    ok: bool

    def to_json(self):
        return {"ok": self.ok, "checks": [{"name": n, "ok": o} for n, o in self.checks]}


def _m(*parts):
    return monomial_sym(parts, 3)


def kod_identities():
    """The exact identities behind recovery from c1, c3, c5 for d = 3, as
    (name, lhs, rhs) with lhs built from the c_n and rhs from the m basis."""
    m1 = _m(1)
    return [
        ("c1", lambda c: c[1] * (-16 / _K), m1),
        ("c3", lambda c: c[3] * (512 / _K), _m(3) * 5 - _m(2, 1) - _m(1, 1, 1) * 2),
        ("c5", lambda c: c[5] * (32768 / _K),
         _m(5) * -399 + _m(4, 1) * 21 + _m(3, 2) * 10 + _m(3, 1, 1) * 20 - _m(2, 2, 1) * 2),
    ]


def kod_certificate(b=None, strict=False):
    """Mechanical check of every identity used to recover a triple from c1,
    c3 and c5 when b comes from the v family.  With strict=True the first
    failing identity raises IdentityFailure."""
    b = v_b_coefficients(6) if b is None else [SR.coerce(x) for x in b]
    c = {n: build_cn(3, n, b) for n in (1, 3, 5)}
    checks = []
    for name, lhs, rhs in kod_identities():
        checks.append((f"{name} expansion", verify_identity(lhs(c), rhs)[0]))
    m1 = _m(1)
    checks.append(("m1^2", verify_identity(m1 ** 2, _m(2) + _m(1, 1) * 2)[0]))
    checks.append(("m1^3", verify_identity(m1 ** 3, _m(3) + _m(2, 1) * 3 + _m(1, 1, 1) * 6)[0]))
    checks.append(("m1^5", verify_identity(
        m1 ** 5, _m(5) + _m(4, 1) * 5 + _m(3, 2) * 10 + _m(3, 1, 1) * 20 + _m(2, 2, 1) * 30)[0]))
    lhs = c[5] * (-32768 / _K) - m1 ** 5 * 399
    rhs = (_m(2, 1) + _m(1, 1, 1) * 2) * (_m(2) * 63 + _m(1, 1) * 62) * -32
    checks.append(("c5 factorization", verify_identity(lhs, rhs)[0]))
    x = [SymPoly.variable(3, i) for i in range(3)]
    prod = (x[0] + x[1]) * (x[0] + x[2]) * (x[1] + x[2])
    checks.append(("pair-sum factorization", verify_identity(_m(2, 1) + _m(1, 1, 1) * 2, prod)[0]))
    checks.append(("2x2 nonsingular", determinant([[1, 2], [63, 62]]) != 0))
    cert = Certificate(checks, all(ok for _, ok in checks))
    if strict and not cert.ok:
        raise IdentityFailure(next(name for name, ok in checks if not ok))
    return cert


def kod_recover(c1, c3, c5):
    """Recover (e1, e2, e3) and the multiset {x_1, x_2, x_3} from exact c1,
    c3, c5.  Requires (x1+x2)(x1+x3)(x2+x3) != 0."""
    c1, c3, c5 = (SR.coerce(v) for v in (c1, c3, c5))

    def rat(v):
        if not v.is_rational():
            raise UnsupportedArgument("c_n must be rational multiples of sqrt(2)*pi**(3/2)")
        return v.q

    m1 = rat(c1 * (-16 / _K))
    e3c = rat(c3 * (512 / _K))            # 5 m3 - (m21 + 2 m111)
    m3 = (3 * e3c + m1 ** 3) / 16
    P = (m1 ** 3 - m3) / 3                # m21 + 2 m111
    if P == 0:
        raise StructurallySingular("pair sums vanish; c5 carries no information")
    Q = rat(c5 * (-32768 / _K)) - 399 * m1 ** 5
    S = Q / (-32 * P)                     # 63 m2 + 62 m11
    # [[1, 2], [63, 62]] [m2, m11] = [m1^2, S]
    m11 = (S - 63 * m1 ** 2) / (62 - 126)
    m2 = m1 ** 2 - 2 * m11
    m21 = m2 * m1 - m3
    m111 = (P - m21) / 2
    e1, e2, e3 = m1, m11, m111
    return (e1, e2, e3), _rational_roots(e1, e2, e3)


def _rational_roots(e1, e2, e3):
    import sympy
    z = sympy.Symbol("z")
    poly = sympy.Poly(z ** 3 - sympy.Rational(e1) * z ** 2 + sympy.Rational(e2) * z
                      - sympy.Rational(e3), z, domain="QQ")
    roots = sympy.roots(poly, filter="Q")
    out = []
    for r, mult in roots.items():
        out.extend([Fraction(int(r.p), int(r.q))] * mult)
    if len(out) != 3:
        raise ArithmeticError("cubic does not split over the rationals")
    return sorted(out)

r"""
Reflective weight-0 Jacobi forms: the divisibility test and the tabulated
bases.

A weight-0 form of index ``t`` with integral coefficients is reflective
when every nonzero ``f(k, l)`` of negative norm ``4tk - l^2`` satisfies

.. MATH::

    D = l^2 - 4tk \;\big|\; \gcd(4t, 2l).

The bases are built from the recipes in the dataset.  Forms that come
without a recipe are recovered from their printed singular coefficients by
an exact linear solve in ``J^{weak}_{12,t} / Delta``: a weight-0 form whose
negative-norm coefficients all vanish is holomorphic, hence zero, so the
singular part pins the form down.

EXAMPLES::

    >>> from lkm3.paperdata import load_dataset
    >>> from lkm3.reflective import build_basis, is_reflective
    >>> basis = build_basis(2, load_dataset())
    >>> basis.forms[2].row(-1), basis.forms[2].row(0)
    ({0: 1}, {0: 24})
    >>> bool(is_reflective(basis.forms[0]))
    True
"""

import ast
from dataclasses import dataclass, field
from math import gcd

from .errors import (
    ConstructionFailed,
    InsufficientTruncation,
    MismatchAgainstPaper,
    SolveFailed,
)
from .jacobiforms import (
    NormClass,
    combine,
    generators,
    jf_div_by_power_of_delta,
    weak_space,
)
from .linalg import solve_unique
from .paperdata import parse_recipe

RECIPE = "recipe-evaluated"
SOLVED = "solved-from-printed"


# --- the criterion -------------------------------------------------------


@dataclass(frozen=True)
class Decision:
    """Outcome of :func:`is_reflective`; truthy when reflective."""

    reflective: bool
    witness: tuple = None
    coefficient: int = None
    checked: int = 0

    def __bool__(self):
        return self.reflective


def divides_criterion(t, k, l):
    """``D | gcd(4t, 2l)`` for ``D = l^2 - 4tk > 0`` (``gcd(x, 0) = x``)."""
    D = l * l - 4 * t * k
    return gcd(4 * t, 2 * l) % D == 0


def is_reflective(a):
    r"""
    Decide reflectivity from the box, returning the first violating
    ``(k, l)`` on failure.

    Raises :class:`InsufficientTruncation` when the box does not reach the
    smallest index of every negative-norm class, since then a violation
    could hide beyond it.
    """
    if not isinstance(a.index, int) or a.index < 1:
        raise ValueError("reflectivity needs a positive integer index")
    if not a.is_integral():
        raise ValueError("reflectivity is defined for integral forms")
    if not a.certifies_singular_part():
        raise InsufficientTruncation(
            f"O(q^{a.q_trunc}) cannot see every negative-norm class of index {a.index}"
        )
    t = a.index
    checked = 0
    for (k, l), c in a.integer_terms():
        if l * l - 4 * t * k > 0:
            checked += 1
            if not divides_criterion(t, k, l):
                return Decision(False, (k, l), c, checked)
    return Decision(True, None, None, checked)


# --- recipes ---------------------------------------------------------------


class _Evaluator:
    def __init__(self, gens):
        self.g = gens

    def __call__(self, node):
        return getattr(self, "_" + type(node).__name__)(node)

    def _Expression(self, node):
        return self(node.body)

    def _Constant(self, node):
        return node.value

    def _Name(self, node):
        if node.id == "Delta":
            return _DeltaPower(1)
        return self.g[node.id]

    def _UnaryOp(self, node):
        v = self(node.operand)
        return -v if isinstance(node.op, ast.USub) else v

    def _Call(self, node):
        f, s = self(node.args[0]), self(node.args[1])
        return f.rescale(s)

    def _BinOp(self, node):
        a, b = self(node.left), self(node.right)
        op = type(node.op).__name__
        if op == "Div":
            if not isinstance(b, _DeltaPower):
                raise ConstructionFailed("recipes may only divide by powers of Delta")
            return jf_div_by_power_of_delta(a, b.e)
        if op == "Pow":
            if isinstance(a, _DeltaPower):
                return _DeltaPower(a.e * b)
            return a**b
        if op == "Mult":
            if isinstance(a, int) and not isinstance(b, int):
                return b.scalar(a)
            if isinstance(b, int) and not isinstance(a, int):
                return a.scalar(b)
            return a * b
        if op == "Add":
            return a + b
        if op == "Sub":
            return a - b
        raise ConstructionFailed(f"unsupported operation {op}")


@dataclass(frozen=True)
class _DeltaPower:
    e: int


def evaluate_recipe(expr, q_order):
    r"""
    Evaluate a recipe string to ``O(q^q_order)``.

    EXAMPLES::

        >>> evaluate_recipe("phi0_1^2 - 21*phi0_2", 1).row(0)
        {-2: 1, -1: -1, 0: 18, 1: -1, 2: 1}
    """
    tree = parse_recipe(expr)
    # one extra order absorbs the pole of 1/Delta
    f = _Evaluator(generators(q_order + 1))(tree)
    if isinstance(f, (int, _DeltaPower)):
        raise ConstructionFailed("recipe does not describe a Jacobi form")
    return f.truncate(q_order)


# --- comparison with the printed lines -------------------------------------


def compare_printed(form, printed):
    """First ``(n, l, expected, got)`` where ``form`` disagrees with the printed lines, or None."""
    for ln in printed.lines:
        row = form.row(ln.q)
        if ln.complete:
            ls = sorted(set(row) | set(ln.coeffs), reverse=True)
        else:
            ls = sorted(ln.coeffs, reverse=True)
        for l in ls:
            if row.get(l, 0) != ln.expected(l):
                return (ln.q, l, ln.expected(l), row.get(l, 0))
    for n in range(min(-1, form.q_valuation()), printed.order):
        if printed.line(n) is None and form.row(n):
            l = max(form.row(n))
            return (n, l, 0, form.row(n)[l])
    return None


def _raise_mismatch(t, label, diff):
    n, l, exp, got = diff
    raise MismatchAgainstPaper(
        f"t={t} form {label}: coefficient of q^{n} r^{l} is {got}, printed {exp}",
        t=t,
        label=label,
        position=(n, l),
        expected=exp,
        got=got,
    )


# --- solve from printed data ------------------------------------------------


def negative_classes(t, min_norm):
    """All norm classes with ``min_norm <= norm < 0`` that contain an integral index."""
    out = []
    for norm in range(min_norm, 0):
        for lam in range(t + 1):
            if (norm + lam * lam) % (4 * t) == 0:
                out.append(NormClass(t, norm, lam))
    return out


def printed_singular_values(t, printed):
    """Class values read from the printed negative-norm entries; conflicting entries raise."""
    vals = {}
    for ln in printed.lines:
        for l, c in ln.coeffs.items():
            if 4 * t * ln.q - l * l < 0:
                cls = NormClass.of(t, ln.q, l)
                if vals.setdefault(cls, c) != c:
                    raise MismatchAgainstPaper(
                        f"t={t} form {printed.label}: class {cls} printed with two values",
                        t=t,
                        label=printed.label,
                        position=(ln.q, l),
                        expected=vals[cls],
                        got=c,
                    )
    return vals


def solve_from_printed(t, printed, q_order, solver=solve_unique):
    r"""
    Recover a weight-0 form of index ``t`` inside ``J^{weak}_{12,t}/Delta``
    from its printed singular coefficients.

    Every negative-norm class reachable in that space gets a linear
    condition: the printed value when some printed entry lies in the class,
    zero otherwise.
    """
    space = [(lab, jf_div_by_power_of_delta(f, 1)) for lab, f in weak_space(12, t, q_order + 1)]
    if not space:
        raise SolveFailed(f"no weight-12 weak forms of index {t}")
    known = printed_singular_values(t, printed)
    classes = negative_classes(t, -t * t - 4 * t)
    rows, rhs = [], []
    for cls in classes:
        n0, l0 = cls.representative()
        if n0 >= q_order:
            raise InsufficientTruncation(f"class {cls} starts at q^{n0}, beyond O(q^{q_order})")
        rows.append([f.coeff(n0, l0) for _, f in space])
        rhs.append(known.get(cls, 0))
    unused = set(known) - set(classes)
    if unused:
        raise SolveFailed(f"printed classes outside the solve space: {sorted(unused)}")
    coeffs = solver(rows, rhs)
    return combine([f for _, f in space], coeffs)


# --- bases -----------------------------------------------------------------


@dataclass
class ReflectiveBasis:
    t: int
    forms: list
    provenance: list
    q_order: int
    labels: list = field(default_factory=list)

    @property
    def rank(self):
        return len(self.forms)

    def combination(self, coeffs):
        if len(coeffs) != self.rank:
            raise ValueError(f"need {self.rank} coefficients, got {len(coeffs)}")
        return combine(self.forms, list(coeffs))


def default_q_order(t, ds):
    """Enough precision for every printed line of index ``t`` (at least ``q^3``)."""
    return max([3] + [p.order for p in ds.index(t).printed])


def _validate(t, label, f):
    if f.weight != 0 or f.index != t:
        raise ConstructionFailed(f"t={t} form {label}: weight {f.weight}, index {f.index}")
    if not f.is_integral():
        raise ConstructionFailed(f"t={t} form {label}: non-integral coefficients")
    if not f.is_even():
        raise ConstructionFailed(f"t={t} form {label}: not even in l")
    if not f.is_norm_invariant():
        raise ConstructionFailed(f"t={t} form {label}: coefficients depend on more than the class")
    d = is_reflective(f)
    if not d:
        raise ConstructionFailed(f"t={t} form {label}: not reflective at {d.witness}")


def build_form(t, ds, label, q_order=None):
    """One basis form with its provenance, checked against the printed lines."""
    idx = ds.index(t)
    q_order = q_order or default_q_order(t, ds)
    recipe = idx.basis[label - 1]
    printed = idx.printed[label - 1]
    if recipe.printed_only:
        f = solve_from_printed(t, printed, q_order)
        how = SOLVED
    else:
        f = evaluate_recipe(recipe.expression, q_order)
        for alt in recipe.alternates:
            g = evaluate_recipe(alt, q_order)
            if g != f:
                raise ConstructionFailed(f"t={t} form {label}: alternate recipe disagrees")
        how = RECIPE
    diff = compare_printed(f, printed) if q_order >= printed.order else _compare_partial(f, printed)
    if diff is not None:
        _raise_mismatch(t, label, diff)
    _validate(t, label, f)
    return f, how


def _compare_partial(f, printed):
    from dataclasses import replace

    keep = tuple(ln for ln in printed.lines if ln.q < f.q_trunc)
    return compare_printed(f, replace(printed, lines=keep, order=f.q_trunc))


def build_basis(t, ds, q_order=None):
    """All basis forms of index ``t`` in table order."""
    q_order = q_order or default_q_order(t, ds)
    forms, prov = [], []
    for b in ds.index(t).basis:
        f, how = build_form(t, ds, b.label, q_order)
        forms.append(f)
        prov.append(how)
    return ReflectiveBasis(t, forms, prov, q_order, [b.label for b in ds.index(t).basis])

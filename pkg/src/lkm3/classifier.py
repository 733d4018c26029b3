r"""
The 29 denominator forms: combinations of reflective basis forms whose
lift has all divisor multiplicities in ``{0, 1}``, and their root data.

EXAMPLES::

    >>> from lkm3.paperdata import load_dataset
    >>> from lkm3.reflective import build_basis
    >>> ds = load_dataset()
    >>> enumerate_denominator_forms(1, build_basis(1, ds), ds=ds)
    [(1, 0), (0, 1), (1, 1)]
    >>> rec = assemble_record(1, (1, 0), ds)
    >>> rec.spec.cartan_name, rec.rho
    ('A_1_II', (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .borcherdslift import LiftResult, divisor_multiplicity, lift_weight, parity, prefactor_exponents
from .errors import NoMatch
from .hyperlattice import cartan_matrix, check_weyl_vector, gram_matrix, orbit, reflect
from .jacobiforms import NormClass
from .reflective import build_basis

BOX01 = (0, 1)
BOX2 = (-2, -1, 0, 1, 2)
WINDOW = 6


def _search_order(values, rank):
    # lexicographic on reversed coordinates, so t=1 lists (1,0), (0,1), (1,1)
    for c in product(values, repeat=rank):
        yield tuple(reversed(c))


def mul_vector(mul_matrix, c):
    return [sum(a * b for a, b in zip(row, c)) for row in mul_matrix]


def enumerate_denominator_forms(t, basis, search_box=BOX01, ds=None, verify=True):
    r"""
    All nonzero ``c`` in ``search_box^rank`` whose multiplicities on the
    tabulated classes are 0 or 1.

    The filter uses the multiplicity matrix; with ``verify`` each survivor is
    re-checked by direct divisor sums on ``sum c_i xi_i``.
    """
    if ds is None:
        from .paperdata import load_dataset

        ds = load_dataset()
    ch = ds.index(t).chamber
    classes = [NormClass.from_discriminant(t, D, lam) for D, lam in ch.classes]
    found = []
    for c in _search_order(tuple(search_box), basis.rank):
        if not any(c):
            continue
        if not all(m in (0, 1) for m in mul_vector(ch.mul_matrix, c)):
            continue
        if verify:
            phi = basis.combination(c)
            direct = [divisor_multiplicity(phi, k) for k in classes]
            if direct != mul_vector(ch.mul_matrix, c):
                raise NoMatch(
                    f"t={t} c={c}: divisor sums {direct} disagree with the multiplicity table",
                    computed=direct,
                    expected=mul_vector(ch.mul_matrix, c),
                )
        found.append(c)
    return found


@dataclass
class AlgebraRecord:
    t: int
    combination: tuple
    lift: LiftResult
    pm: list
    pm_super: list
    cartan: list
    rho: tuple
    spec: object
    permutation: tuple = None
    window: int = WINDOW
    finite: bool = True
    notes: list = field(default_factory=list)

    @property
    def weight(self):
        return self.lift.weight

    @property
    def name(self):
        return self.spec.form_name

    def to_dict(self):
        def q(x):
            x = Fraction(x)
            return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)

        return {
            "t": self.t,
            "combination": list(self.combination),
            "name": self.name,
            "weight": q(self.weight),
            "rho": [q(x) for x in self.rho],
            "parity": self.lift.parity_D,
            "finite": self.finite,
            "pm": [list(v) for v in self.pm],
            "pm_super": [list(v) for v in self.pm_super],
            "cartan": [[q(x) for x in row] for row in self.cartan],
            "cartan_name": self.spec.cartan_name,
            "permutation": list(self.permutation) if self.permutation else None,
        }


def find_permutation(A, B):
    r"""
    A permutation ``p`` with ``A[p[i]][p[j]] == B[i][j]``, or None.

    EXAMPLES::

        >>> find_permutation([[2, -1], [-4, 2]], [[2, -4], [-1, 2]])
        (1, 0)
    """
    k = len(A)
    if len(B) != k:
        return None
    used = [False] * k
    p = []

    def extend(i):
        if i == k:
            return True
        for a in range(k):
            if used[a] or A[a][a] != B[i][i]:
                continue
            if all(A[a][p[j]] == B[i][j] and A[p[j]][a] == B[j][i] for j in range(i)):
                used[a] = True
                p.append(a)
                if extend(i + 1):
                    return True
                p.pop()
                used[a] = False
        return False

    return tuple(p) if extend(0) else None


def _roots(spec, rows, gens, seeds, word_len):
    if not seeds:
        return [], True
    start = [tuple(k * x for x in rows[i - 1]) for i, k in seeds]
    g = [rows[i - 1] for i in gens]
    if not g:
        return sorted(set(start)), True
    orb = orbit(spec.t, g, start, word_len)
    return orb.vectors, orb.closed


def _chain(t, gens, seed, word_len):
    """Consecutive elements of a D-infinity chain starting at ``seed``."""
    out = [seed]
    for k in range(word_len):
        out.append(reflect(t, gens[k % 2], out[-1]))
    return out


def _is_generalized_cartan(A):
    k = len(A)
    for i in range(k):
        if A[i][i] != 2:
            return False
        for j in range(k):
            if i != j and (A[i][j] > 0 or Fraction(A[i][j]).denominator != 1):
                return False
            if (A[i][j] == 0) != (A[j][i] == 0):
                return False
    return True


def assemble_record(t, c, ds, basis=None, word_len=WINDOW):
    r"""
    Lift ``sum c_i xi_i``, generate ``P(M)`` from the stored orbit data,
    and match the Cartan matrix against the stored algebra.
    """
    c = tuple(c)
    spec = ds.algebra(t, c)
    if spec is None:
        raise NoMatch(f"t={t}: no stored algebra for c={c}")
    basis = basis or build_basis(t, ds)
    phi = basis.combination(c)
    ch = ds.index(t).chamber
    classes = [NormClass.from_discriminant(t, D, lam) for D, lam in ch.classes]
    res = LiftResult(
        t=t,
        weyl_vector=prefactor_exponents(phi),
        weight=lift_weight(phi),
        parity_D=parity(phi),
        divisor_table={k: divisor_multiplicity(phi, k) for k in classes},
    )
    if any(m not in (0, 1) for m in res.divisor_table.values()):
        raise NoMatch(f"t={t} c={c}: multiplicities {list(res.divisor_table.values())} are not 0/1")
    rows = ch.pm0_rows
    pm, closed = _roots(spec, rows, spec.generators, spec.seeds, word_len)
    sup, _ = _roots(spec, rows, spec.super_generators, spec.super_seeds, word_len)
    notes = []
    if spec.explicit_pm:
        if sorted(map(tuple, spec.explicit_pm)) != pm:
            raise NoMatch(
                f"t={t} c={c}: orbit {pm} differs from the listed P(M)",
                computed=pm,
                expected=sorted(spec.explicit_pm),
            )
    if not set(sup) <= set(pm):
        raise NoMatch(f"t={t} c={c}: odd roots {sup} are not in P(M)")
    if spec.finite != closed:
        raise NoMatch(f"t={t} c={c}: orbit closed={closed}, stored finite={spec.finite}")
    rho = res.weyl_vector
    if rho != spec.weyl_vector:
        raise NoMatch(f"t={t} c={c}: Weyl vector {rho}, stored {spec.weyl_vector}", rho, spec.weyl_vector)
    if res.weight != spec.weight:
        raise NoMatch(f"t={t} c={c}: weight {res.weight}, stored {spec.weight}", res.weight, spec.weight)
    if any(rho):
        wc = check_weyl_vector(t, rho, pm)
        if not wc:
            raise NoMatch(f"t={t} c={c}: (rho, a) != -a^2/2 at {wc.failures[0][0]}")

    perm = None
    if spec.finite:
        A = cartan_matrix(t, pm)
        B = [list(r) for r in spec.cartan]
        perm = find_permutation(A, B)
        if perm is None:
            raise NoMatch(f"t={t} c={c}: Cartan matrix does not match {spec.cartan_name}", A, B)
    else:
        gens = [rows[i - 1] for i in spec.generators]
        i, k = spec.seeds[0]
        window = _chain(t, gens, tuple(k * x for x in rows[i - 1]), word_len)
        A = cartan_matrix(t, pm)
        if not _is_generalized_cartan(A):
            raise NoMatch(f"t={t} c={c}: orbit sample is not a set of simple roots", A)
        if spec.cartan_rule == "gram_scale":
            W = cartan_matrix(t, window)
            G = gram_matrix(t, window)
            S = [[spec.gram_scale * g for g in row] for row in G]
            if W != S:
                raise NoMatch(f"t={t} c={c}: Cartan entries differ from {spec.gram_scale} * Gram", W, S)
            notes.append(f"Cartan = {spec.gram_scale} * Gram on a window of {len(window)}")
        else:
            notes.append(f"Cartan by definition on a window of {len(window)}")
    if not spec.finite:
        A = cartan_matrix(t, pm)
    elif perm is not None:
        A = [[B[i][j] for j in range(len(B))] for i in range(len(B))]
        pm = [pm[i] for i in perm]
    return AlgebraRecord(
        t=t,
        combination=c,
        lift=res,
        pm=pm,
        pm_super=sup,
        cartan=A,
        rho=rho,
        spec=spec,
        permutation=perm,
        window=word_len,
        finite=spec.finite,
        notes=notes,
    )


def classify(ds, ts=None, search_box=BOX01, bases=None):
    """Enumerate and assemble every record for the given indices, in table order."""
    out = []
    for t in ts or list(ds.indices):
        basis = (bases or {}).get(t) or build_basis(t, ds)
        for c in enumerate_denominator_forms(t, basis, search_box, ds):
            out.append(assemble_record(t, c, ds, basis))
    return out


def weight_report(records):
    """Rows ``(t, c, weight, name)``."""
    return [(r.t, r.combination, r.weight, r.name) for r in records]

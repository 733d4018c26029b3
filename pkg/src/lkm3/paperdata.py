r"""
Machine-readable reflective-form and algebra tables, with loader and checks.

The bundled file ``data/tables.json`` holds, for each of the nine indices
``t = 1, 2, 3, 4, 8, 9, 12, 16, 36``:

- the basis forms, each with an optional recipe over the named generators
  and the printed leading Fourier lines;
- the chamber data: the roots ``P(M_0)``, their Gram matrix, the root
  classes and the multiplicity matrix;

and a list of 29 algebra records (basis combination, orbit description of
``P(M)``, Cartan matrix reference, Weyl vector, weight, form name).

Printed lines use the tables' own notation, e.g.
``"r^2[-4] - r[-1] + 60 - r^{-1}[-1] + r^{-2}[-4]"``; a bracket is the norm
``4tk - l^2`` of the entry it follows.  Transcription slips in the source are
kept verbatim and corrected by annotated ``overrides``.

EXAMPLES::

    >>> from lkm3.paperdata import load_dataset
    >>> ds = load_dataset()
    >>> sorted(ds.indices)
    [1, 2, 3, 4, 8, 9, 12, 16, 36]
    >>> len(ds.algebras)
    29
"""

import ast
import copy
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import SchemaError

SCHEMA = "lkm3.tables/1"
INDICES = (1, 2, 3, 4, 8, 9, 12, 16, 36)
SYMBOLS = frozenset(
    ["E4", "E6", "Delta", "E4_1", "E4_2", "E4_3", "phi0_1", "phi0_2", "phi0_3", "phi0_4", "phim2_1"]
)


# --- printed Fourier lines -----------------------------------------------

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?P<coef>\d+)?\s*
        (?P<r>r(?:\^(?:\{(?P<eb>-?\d+)\}|(?P<e>-?\d+)))?)?\s*
        (?:\[(?P<br>-?\d+)\])?\s*""",
    re.VERBOSE,
)


def parse_terms(text, where=""):
    r"""
    Parse a printed Laurent polynomial in ``r``.

    Returns a list of ``(l, coefficient, bracket)`` triples in printed
    order; ``bracket`` is None when nothing was printed.

    EXAMPLES::

        >>> parse_terms("r^2[-4] - r[-1] + 60")
        [(2, 1, -4), (1, -1, -1), (0, 60, None)]
        >>> parse_terms("-8r^{-7}[-1]")
        [(-7, -8, -1)]
    """
    out = []
    pos = 0
    text = text.strip()
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("r") is None):
            raise SchemaError(f"cannot parse term at {text[pos:]!r}", where)
        if not first and m.group("sign") is None:
            raise SchemaError(f"missing sign before {text[pos:]!r}", where)
        first = False
        sign = -1 if m.group("sign") == "-" else 1
        coef = int(m.group("coef")) if m.group("coef") else 1
        if m.group("r"):
            e = m.group("eb") or m.group("e")
            l = int(e) if e is not None else 1
        else:
            l = 0
        br = m.group("br")
        out.append((l, sign * coef, int(br) if br is not None else None))
        pos = m.end()
    if not out:
        raise SchemaError("empty line", where)
    return out


@dataclass(frozen=True)
class PrintedLine:
    """One printed row ``q^k (...)``.

    ``coeffs`` holds the printed coefficients.  On a complete line every
    other ``l`` is zero; on a line ending in an ellipsis only the printed
    entries are known.
    """

    q: int
    coeffs: dict
    brackets: dict
    complete: bool
    text: str

    def determined(self, l):
        """Whether the printed line fixes the coefficient at ``r^l``."""
        return self.complete or l in self.coeffs

    def expected(self, l):
        return self.coeffs.get(l, 0)


@dataclass(frozen=True)
class PrintedCoefficients:
    t: int
    label: int
    lines: tuple
    order: int

    def line(self, q):
        for ln in self.lines:
            if ln.q == q:
                return ln
        return None

    def positions(self):
        """All ``((n, l), value)`` fixed by the printed data, sorted by ``n`` then ``l``."""
        out = []
        for ln in self.lines:
            for l in sorted(ln.coeffs):
                out.append(((ln.q, l), ln.coeffs[l]))
        return out


@dataclass(frozen=True)
class BasisRecipe:
    t: int
    label: int
    expression: str
    alternates: tuple = ()
    note: str = ""

    @property
    def printed_only(self):
        return self.expression is None


@dataclass(frozen=True)
class ChamberData:
    t: int
    pm0_rows: tuple
    pm0_classes: tuple
    gram: tuple
    classes: tuple
    mul_matrix: tuple


@dataclass(frozen=True)
class AlgebraSpec:
    t: int
    key: str
    combination: tuple
    generators: tuple
    seeds: tuple
    super_generators: tuple
    super_seeds: tuple
    explicit_pm: tuple
    finite: bool
    cartan_name: str
    cartan: tuple
    cartan_rule: str
    gram_scale: Fraction
    weyl_vector: tuple
    weight: Fraction
    form_name: str
    notes: tuple = ()


@dataclass
class IndexData:
    t: int
    basis: list
    printed: list
    chamber: ChamberData

    @property
    def rank(self):
        return len(self.basis)


@dataclass
class Dataset:
    schema: str
    indices: dict
    algebras: list
    cartan_matrices: dict
    overrides: list = field(default_factory=list)
    source: str = ""

    def index(self, t):
        if t not in self.indices:
            raise KeyError(f"index {t} is not tabulated; choose one of {sorted(self.indices)}")
        return self.indices[t]

    def algebras_for(self, t):
        return [a for a in self.algebras if a.t == t]

    def algebra(self, t, combination):
        combination = tuple(combination)
        for a in self.algebras:
            if a.t == t and a.combination == combination:
                return a
        return None


# --- loading ---------------------------------------------------------------


def default_path():
    return resources.files("lkm3") / "data" / "tables.json"


def _req(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing field {key!r}", where)
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {key!r} must be {kind}", where)
    return v


def _int_matrix(m, where, square=False):
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise SchemaError("expected a non-empty matrix", where)
    width = len(m[0])
    for r in m:
        if len(r) != width or not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise SchemaError("matrix rows must be integer lists of equal length", where)
    if square and len(m) != width:
        raise SchemaError("matrix must be square", where)
    return tuple(tuple(r) for r in m)


def _rational(x, where):
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"not an exact rational: {x!r}", where) from None


def parse_recipe(text, where=""):
    """Parse a recipe (``^`` for powers) into a Python AST, checking it only uses known pieces."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise SchemaError(f"recipe does not parse: {exc.msg}", where) from None
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            if node.id not in SYMBOLS and node.id != "rescale":
                raise SchemaError(f"unknown symbol {node.id!r}", where)
        elif isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id == "rescale"):
                raise SchemaError("only rescale(form, s) may be called", where)
            if len(node.args) != 2 or node.keywords:
                raise SchemaError("rescale takes exactly two arguments", where)
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, int) or isinstance(node.value, bool):
                raise SchemaError("only integer constants are allowed", where)
        elif not isinstance(
            node,
            (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Add, ast.Sub, ast.Mult, ast.Div,
             ast.Pow, ast.USub, ast.UAdd, ast.Load),
        ):
            raise SchemaError(f"unsupported syntax {type(node).__name__}", where)
    return tree


def _apply_overrides(raw, overrides):
    raw = copy.deepcopy(raw)
    by_t = {d.get("t"): d for d in raw.get("indices", []) if isinstance(d, dict)}
    for i, ov in enumerate(overrides):
        where = f"overrides[{i}]"
        scope = _req(ov, "scope", where, str)
        if scope == "line":
            t, label, pos = _req(ov, "t", where), _req(ov, "label", where), _req(ov, "line", where)
            fld = _req(ov, "field", where, str)
            try:
                line = by_t[t]["basis"][label - 1]["lines"][pos]
            except (KeyError, IndexError, TypeError):
                raise SchemaError("override target does not exist", where) from None
            if line.get(fld) != ov.get("printed"):
                raise SchemaError("override 'printed' does not match the stored value", where)
            line[fld] = ov.get("reading")
        elif scope == "classes":
            t = _req(ov, "t", where)
            try:
                cls = by_t[t]["classes"]
            except (KeyError, TypeError):
                raise SchemaError("override target does not exist", where) from None
            if cls != ov.get("printed"):
                raise SchemaError("override 'printed' does not match the stored value", where)
            by_t[t]["classes"] = ov.get("reading")
        elif scope == "note":
            pass
        else:
            raise SchemaError(f"unknown override scope {scope!r}", where)
    return raw


def _load_printed(t, label, form, where):
    lines = []
    seen = set()
    for j, ln in enumerate(_req(form, "lines", where, list)):
        w = f"{where}.lines[{j}]"
        q = _req(ln, "q", w, int)
        if q in seen:
            raise SchemaError(f"q^{q} printed twice", w)
        seen.add(q)
        terms = parse_terms(_req(ln, "terms", w, str), w)
        coeffs, brackets = {}, {}
        for l, c, br in terms:
            if l in coeffs:
                raise SchemaError(f"r^{l} printed twice in one line", w)
            coeffs[l] = c
            if br is not None:
                brackets[l] = br
        complete = _req(ln, "complete", w, bool)
        lines.append(PrintedLine(q, coeffs, brackets, complete, ln["terms"]))
    order = _req(form, "order", where, int)
    if any(ln.q >= order for ln in lines):
        raise SchemaError("a printed line lies at or beyond the stated order", where)
    return PrintedCoefficients(t, label, tuple(sorted(lines, key=lambda x: x.q)), order)


def _load_index(d, where, cartans):
    t = _req(d, "t", where, int)
    if t not in INDICES:
        raise SchemaError(f"index {t} is not one of the tabulated indices", where)
    basis, printed = [], []
    for i, form in enumerate(_req(d, "basis", where, list)):
        w = f"{where}.basis[{i}]"
        label = _req(form, "label", w, int)
        if label != i + 1:
            raise SchemaError("basis labels must run 1..rank in order", w)
        expr = form.get("recipe")
        alts = tuple(form.get("alternates", []))
        for e in ((expr,) if expr else ()) + alts:
            parse_recipe(e, w)
        basis.append(BasisRecipe(t, label, expr, alts, form.get("note", "")))
        printed.append(_load_printed(t, label, form, w))
    pm0 = _int_matrix(_req(d, "pm0", where), f"{where}.pm0")
    if any(len(r) != 3 for r in pm0):
        raise SchemaError("P(M_0) rows must be triples", f"{where}.pm0")
    gram = _int_matrix(_req(d, "gram", where), f"{where}.gram", square=True)
    if len(gram) != len(pm0):
        raise SchemaError("Gram matrix size differs from the number of roots", where)
    pm0_classes = tuple(tuple(c) for c in d.get("pm0_classes", []))
    if pm0_classes and len(pm0_classes) != len(pm0):
        raise SchemaError("pm0_classes must have one entry per root", where)
    classes = _int_matrix(_req(d, "classes", where), f"{where}.classes")
    mul = _int_matrix(_req(d, "mul", where), f"{where}.mul")
    if len(classes) != len(mul):
        raise SchemaError("class list length differs from the Mul row count", where)
    if any(len(r) != len(basis) for r in mul):
        raise SchemaError("Mul needs one column per basis form", where)
    chamber = ChamberData(t, pm0, pm0_classes, gram, classes, mul)
    return IndexData(t, basis, printed, chamber)


def _seed_list(v, where):
    out = []
    for s in v:
        if not (isinstance(s, list) and len(s) == 2 and all(isinstance(x, int) for x in s)):
            raise SchemaError("seeds are [root number, multiple] pairs", where)
        out.append(tuple(s))
    return tuple(out)


def _load_algebra(d, where, cartans, indices):
    t = _req(d, "t", where, int)
    if t not in indices:
        raise SchemaError(f"algebra refers to missing index {t}", where)
    rank = indices[t].rank
    nroots = len(indices[t].chamber.pm0_rows)
    comb = tuple(_req(d, "combination", where, list))
    if len(comb) != rank or any(c not in (0, 1) for c in comb):
        raise SchemaError("combination must be a 0/1 vector over the basis", where)
    gens = tuple(_req(d, "generators", where, list))
    seeds = _seed_list(_req(d, "seeds", where, list), where)
    sup = d.get("super", {"generators": [], "seeds": []})
    sgens = tuple(sup.get("generators", []))
    sseeds = _seed_list(sup.get("seeds", []), where)
    for g in gens + sgens + tuple(s[0] for s in seeds + sseeds):
        if not (isinstance(g, int) and 1 <= g <= nroots):
            raise SchemaError(f"root number {g} out of range 1..{nroots}", where)
    explicit = tuple(tuple(r) for r in d.get("explicit", []))
    ct = _req(d, "cartan", where, dict)
    rule = _req(ct, "rule", where, str)
    cname = ct.get("name", "")
    cmat = ()
    scale = None
    if rule == "named":
        if cname not in cartans:
            raise SchemaError(f"unknown Cartan matrix {cname!r}", where)
        cmat = cartans[cname]
    elif rule == "gram_scale":
        scale = _rational(_req(ct, "scale", where), where)
    elif rule != "definition":
        raise SchemaError(f"unknown Cartan rule {rule!r}", where)
    rho = tuple(_rational(x, where) for x in _req(d, "rho", where, list))
    if len(rho) != 3:
        raise SchemaError("Weyl vector must be a triple", where)
    weight = _rational(_req(d, "weight", where), where)
    if (2 * weight).denominator != 1:
        raise SchemaError("weight must be a half-integer", where)
    return AlgebraSpec(
        t=t,
        key=_req(d, "key", where, str),
        combination=comb,
        generators=gens,
        seeds=seeds,
        super_generators=sgens,
        super_seeds=sseeds,
        explicit_pm=explicit,
        finite=_req(d, "finite", where, bool),
        cartan_name=cname,
        cartan=cmat,
        cartan_rule=rule,
        gram_scale=scale,
        weyl_vector=rho,
        weight=weight,
        form_name=_req(d, "form", where, str),
        notes=tuple(d.get("notes", [])),
    )


def load_dataset(path=None):
    """Load and validate a tables file (the bundled one by default)."""
    src = Path(path) if path is not None else default_path()
    try:
        text = src.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read dataset: {exc}", str(src)) from None
    if not text.strip():
        raise SchemaError("dataset file is empty", str(src))
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})", str(src)) from None
    return dataset_from_dict(raw, str(src))


def dataset_from_dict(raw, source=""):
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object", source)
    schema = _req(raw, "schema", source, str)
    if schema != SCHEMA:
        raise SchemaError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", source)
    overrides = _req(raw, "overrides", source, list)
    raw = _apply_overrides(raw, overrides)
    cartans = {}
    for name, m in _req(raw, "cartan_matrices", source, dict).items():
        cartans[name] = _int_matrix(m, f"cartan_matrices.{name}", square=True)
    indices = {}
    for i, d in enumerate(_req(raw, "indices", source, list)):
        idx = _load_index(d, f"indices[{i}]", cartans)
        if idx.t in indices:
            raise SchemaError(f"index {idx.t} listed twice", f"indices[{i}]")
        indices[idx.t] = idx
    algebras = []
    keys = set()
    for i, d in enumerate(_req(raw, "algebras", source, list)):
        a = _load_algebra(d, f"algebras[{i}]", cartans, indices)
        if a.key in keys:
            raise SchemaError(f"algebra key {a.key!r} repeated", f"algebras[{i}]")
        keys.add(a.key)
        algebras.append(a)
    return Dataset(schema, dict(sorted(indices.items())), algebras, cartans, overrides, source)


# --- internal consistency ----------------------------------------------------


@dataclass
class Report:
    checks: int = 0
    findings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.findings

    def check(self, cond, message):
        self.checks += 1
        if not cond:
            self.findings.append(message)


def validate_internal(ds):
    r"""
    Recompute bracketed norms and Gram entries from the raw positions and
    flag disagreements; also checks Gram symmetry and that each root's
    printed class matches its discriminant and ``l mod 2t``.
    """
    from .hyperlattice import class_of, pair2t

    rep = Report()
    for t, idx in ds.indices.items():
        for pc in idx.printed:
            for ln in pc.lines:
                for l, br in ln.brackets.items():
                    rep.check(
                        br == 4 * t * ln.q - l * l,
                        f"t={t} form {pc.label} q^{ln.q} r^{l}: bracket {br} != {4 * t * ln.q - l * l}",
                    )
        ch = idx.chamber
        g = ch.gram
        for i, a in enumerate(ch.pm0_rows):
            for j, b in enumerate(ch.pm0_rows):
                rep.check(g[i][j] == g[j][i], f"t={t} Gram not symmetric at ({i + 1},{j + 1})")
                v = pair2t(t, a, b)
                rep.check(v == g[i][j], f"t={t} Gram ({i + 1},{j + 1}) = {g[i][j]}, recomputed {v}")
        for row, cls in zip(ch.pm0_rows, ch.pm0_classes):
            got = class_of(t, row)
            rep.check(
                (got.discriminant, got.l_residue) == tuple(cls),
                f"t={t} root {row}: printed class {tuple(cls)}, recomputed {(got.discriminant, got.l_residue)}",
            )
        for D, lam in ch.classes:
            rep.check(
                D > 0 and 0 <= lam <= t and (lam * lam - D) % (4 * t) == 0,
                f"t={t} class ({D}, {lam}) has no integral representative",
            )
    return rep

r"""
Command-line entry point.

::

    lkm3 basis --t 2
    lkm3 verify tables
    lkm3 lift --t 1 --combination 1,0 --box-n 4 --box-m 4
    lkm3 classify --t all
    lkm3 reflective form.json

Exit codes: 0 every check passed, 1 a verification failed, 2 usage or
dataset error, 3 insufficient truncation.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientTruncation, LKMError, MismatchAgainstPaper, NoMatch, SchemaError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    dataset: str = None
    q_order: int = None
    box: tuple = (4, 4)
    search_box: str = "01"
    fmt: str = "text"
    out: str = None
    jobs: int = 1

    def __post_init__(self):
        if self.fmt not in ("text", "json"):
            raise ValueError(f"format must be text or json, not {self.fmt!r}")
        if self.box[0] <= 0 or self.box[1] <= 0:
            raise ValueError("box bounds must be positive")
        if self.q_order is not None and self.q_order < 1:
            raise ValueError("--q-order must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")


def _q(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(cfg, text):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _load(cfg):
    from .paperdata import load_dataset

    return load_dataset(cfg.dataset)


def _indices(ds, arg):
    if arg in (None, "all"):
        return list(ds.indices)
    try:
        t = int(arg)
    except ValueError:
        raise SchemaError(f"--t expects an index or 'all', not {arg!r}") from None
    ds.index(t)
    return [t]


def _map(cfg, fn, items):
    # results keep the input order whatever the thread count
    if cfg.jobs == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
        return list(ex.map(fn, items))


def _row_text(row):
    if not row:
        return "0"
    return " ".join(f"{_q(c)}*r^{_q(l)}" for l, c in sorted(row.items(), reverse=True))


# --- basis -------------------------------------------------------------------


def cmd_basis(cfg, args):
    from .reflective import build_basis

    ds = _load(cfg)
    ts = _indices(ds, args.t)
    bases = _map(cfg, lambda t: build_basis(t, ds, cfg.q_order), ts)
    if cfg.fmt == "json":
        out = []
        for b in bases:
            for lab, f, how in zip(b.labels, b.forms, b.provenance):
                out.append({"t": b.t, "label": lab, "provenance": how, "form": f.to_records()})
        _emit(cfg, _dump(out))
        return EXIT_OK
    lines = []
    for b in bases:
        for lab, f, how in zip(b.labels, b.forms, b.provenance):
            lines.append(f"t={b.t} form={lab} provenance={how} q_order={b.q_order}")
            for n in range(f.q_valuation(), b.q_order):
                lines.append(f"  q^{n}: {_row_text(f.row(n))}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def _verify_index(ds, t, q_order):
    from .borcherdslift import divisor_multiplicity
    from .jacobiforms import NormClass
    from .reflective import build_basis, is_reflective

    lines = []
    try:
        basis = build_basis(t, ds, q_order)
    except MismatchAgainstPaper as e:
        return [(False, f"t={t} form={e.label} position={e.position} expected={e.expected} got={e.got}")], None
    for lab, f, how in zip(basis.labels, basis.forms, basis.provenance):
        ok = bool(is_reflective(f)) and f.is_even() and f.is_norm_invariant()
        lines.append((ok, f"t={t} form={lab} printed coefficients match ({how}), reflective, even, norm-invariant"))
    ch = ds.index(t).chamber
    for (D, lam), row in zip(ch.classes, ch.mul_matrix):
        cls = NormClass.from_discriminant(t, D, lam)
        got = [divisor_multiplicity(f, cls) for f in basis.forms]
        ok = got == list(row)
        msg = f"t={t} class=({D},{lam}) multiplicities {got}"
        lines.append((ok, msg if ok else f"{msg} printed {list(row)}"))
    return lines, basis


def _verify_algebras(ds, t, basis):
    from .classifier import assemble_record, enumerate_denominator_forms

    lines = []
    cs = enumerate_denominator_forms(t, basis, ds=ds)
    stored = [a.combination for a in ds.algebras_for(t)]
    lines.append((cs == stored, f"t={t} denominator forms {len(cs)} (stored {len(stored)})"))
    for c in cs:
        try:
            r = assemble_record(t, c, ds, basis)
        except NoMatch as e:
            lines.append((False, f"t={t} c={c}: {e}"))
            continue
        lines.append((True, f"t={t} c={c} {r.name} weight={_q(r.weight)} rho=({','.join(map(_q, r.rho))})"))
    return lines


def _verify_series():
    from .exactseries import delta, e4, e6, eta

    N = 50
    lines = [
        (e4(N) ** 3 - e6(N) ** 2 == delta(N).scalar_mul(1728), f"E4^3 - E6^2 = 1728 Delta to q^{N}"),
        ((eta(N) ** 24).truncate(N) == delta(N), f"Delta = eta^24 to q^{N}"),
    ]
    return lines


def cmd_verify(cfg, args):
    from .paperdata import validate_internal

    ds = _load(cfg)
    rep = validate_internal(ds)
    results = [(rep.ok, f"dataset internal consistency: {rep.checks} checks")]
    results += [(False, f"dataset: {m}") for m in rep.findings]
    ts = list(ds.indices)

    def one(t):
        lines, basis = _verify_index(ds, t, cfg.q_order)
        if args.scope == "all" and basis is not None:
            lines += _verify_algebras(ds, t, basis)
        return lines

    for lines in _map(cfg, one, ts):
        results += lines
    if args.scope == "all":
        results += _verify_series()
    fails = sum(1 for ok, _ in results if not ok)
    if cfg.fmt == "json":
        _emit(cfg, _dump({"checks": [{"ok": ok, "what": m} for ok, m in results], "failures": fails}))
    else:
        text = "".join(f"{'PASS' if ok else 'FAIL'} {m}\n" for ok, m in results)
        _emit(cfg, text + f"{len(results)} checks, {fails} failures\n")
    return EXIT_OK if fails == 0 else EXIT_FAIL


# --- lift --------------------------------------------------------------------


def _combination(arg, rank):
    try:
        c = tuple(int(x) for x in arg.split(","))
    except ValueError:
        raise SchemaError(f"--combination expects comma-separated integers, not {arg!r}") from None
    if len(c) != rank:
        raise SchemaError(f"--combination needs {rank} entries")
    return c


def cmd_lift(cfg, args):
    from .borcherdslift import lift, required_q_order
    from .jacobiforms import NormClass
    from .reflective import build_basis, default_q_order

    ds = _load(cfg)
    if args.t in (None, "all"):
        raise SchemaError("lift needs a single --t")
    t = _indices(ds, args.t)[0]
    rank = ds.index(t).rank
    c = _combination(args.combination or ",".join(["1"] + ["0"] * (rank - 1)), rank)
    q_order = cfg.q_order or default_q_order(t, ds)
    phi = build_basis(t, ds, q_order).combination(c)
    need = required_q_order(phi, *cfg.box)
    if cfg.q_order is None and need > q_order:
        phi = build_basis(t, ds, need).combination(c)
    classes = [NormClass.from_discriminant(t, D, lam) for D, lam in ds.index(t).chamber.classes]
    res = lift(phi, classes, cfg.box)
    head = res.header()
    head["combination"] = ",".join(map(str, c))
    if cfg.fmt == "json":
        body = dict(head)
        body["divisors"] = [[k.discriminant, k.l_residue, v] for k, v in res.divisor_table.items()]
        body["expansion"] = res.expansion.to_records()
        _emit(cfg, _dump(body))
        return EXIT_OK
    lines = [f"{k}={head[k]}" for k in ("t", "combination", "A", "B", "C", "weight", "parity")]
    for k, v in res.divisor_table.items():
        lines.append(f"divisor ({k.discriminant},{k.l_residue}) multiplicity={v}")
    lines.append(f"box n<={cfg.box[0]} m<={cfg.box[1]} terms={len(res.expansion)}")
    for (n, l, m), v in res.expansion.items():
        lines.append(f"{_q(n)} {_q(l)} {_q(m)} {v}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# --- classify ----------------------------------------------------------------


def cmd_classify(cfg, args):
    from .classifier import BOX01, BOX2, assemble_record, enumerate_denominator_forms
    from .reflective import build_basis

    ds = _load(cfg)
    ts = _indices(ds, args.t)
    box = BOX01 if cfg.search_box == "01" else BOX2

    def one(t):
        basis = build_basis(t, ds, cfg.q_order)
        return [assemble_record(t, c, ds, basis) for c in enumerate_denominator_forms(t, basis, box, ds)]

    recs = [r for rs in _map(cfg, one, ts) for r in rs]
    if cfg.fmt == "json":
        _emit(cfg, _dump([r.to_dict() for r in recs]))
        return EXIT_OK
    lines = []
    for r in recs:
        kind = r.spec.cartan_name if r.finite else "D-infinity"
        lines.append(
            f"t={r.t} c={','.join(map(str, r.combination))} {r.name} weight={_q(r.weight)} "
            f"rho=({','.join(map(_q, r.rho))}) P(M)={len(r.pm)}{'' if r.finite else '+'} {kind}"
        )
    lines.append(f"{len(recs)} records")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# --- reflective --------------------------------------------------------------


def cmd_reflective(cfg, args):
    from .jacobiforms import JacobiFourier
    from .reflective import is_reflective

    try:
        with open(args.input) as fh:
            data = json.load(fh)
        f = JacobiFourier.from_records(data)
    except (OSError, ValueError) as e:
        raise SchemaError(f"cannot read {args.input}: {e}") from None
    d = is_reflective(f)
    if cfg.fmt == "json":
        w = list(map(_q, d.witness)) if d.witness else None
        _emit(cfg, _dump({"reflective": d.reflective, "witness": w, "coefficient": _q(d.coefficient) if d.witness else None}))
    elif d:
        _emit(cfg, f"reflective: {d.checked} negative-norm coefficients satisfy the divisibility test\n")
    else:
        k, l = d.witness
        _emit(cfg, f"not reflective: f({_q(k)}, {_q(l)}) = {_q(d.coefficient)}\n")
    return EXIT_OK if d else EXIT_FAIL


# --- parser ------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="lkm3", description="Reflective Jacobi forms and their Borcherds-type lifts.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", help="alternative tables file")
    common.add_argument("--q-order", type=int, help="q-precision of the basis forms")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker threads across indices")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("basis", parents=[common], help="build and print the reflective basis")
    s.add_argument("--t", default="all")
    s.set_defaults(fn=cmd_basis)

    s = sub.add_parser("verify", parents=[common], help="compare everything against the tables")
    s.add_argument("scope", choices=("tables", "all"), nargs="?", default="tables")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("lift", parents=[common], help="lift a basis combination")
    s.add_argument("--t", required=True)
    s.add_argument("--combination", help="comma-separated coefficients (default: first form)")
    s.add_argument("--box-n", type=int, default=4)
    s.add_argument("--box-m", type=int, default=4)
    s.set_defaults(fn=cmd_lift)

    s = sub.add_parser("classify", parents=[common], help="enumerate the denominator forms")
    s.add_argument("--t", default="all")
    s.add_argument("--search-box", choices=("01", "pm2"), default="01")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("reflective", parents=[common], help="test a serialized form for reflectivity")
    s.add_argument("input")
    s.set_defaults(fn=cmd_reflective)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            dataset=args.dataset,
            q_order=args.q_order,
            box=(getattr(args, "box_n", 4), getattr(args, "box_m", 4)),
            search_box=getattr(args, "search_box", "01"),
            fmt=args.format,
            out=args.out,
            jobs=args.jobs,
        )
    except ValueError as e:
        parser.print_usage(sys.stderr)
        print(f"lkm3: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(cfg, args)
    except InsufficientTruncation as e:
        print(f"lkm3: insufficient truncation: {e}", file=sys.stderr)
        return EXIT_TRUNC
    except (SchemaError, KeyError) as e:
        print(f"lkm3: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MismatchAgainstPaper as e:
        print(f"lkm3: t={e.t} form={e.label} position={e.position} expected={e.expected} got={e.got}", file=sys.stderr)
        return EXIT_FAIL
    except LKMError as e:
        print(f"lkm3: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

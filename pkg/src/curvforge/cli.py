"""Command-line driver.

    curvforge gen     --seed 7 --m 3 --mask weyl,sym --out A.json
    curvforge check   A.json
    curvforge realize A.json --mode ricci-constant --order 6 --out conn.json
    curvforge verify  conn.json
    curvforge table   --seed 0 --m 3 --order 6
    curvforge dims    --m 6

Every command prints a JSON report to stdout.  Exit status: 0 when all
checks pass (an expected obstruction counts as a pass), 1 when a check fails,
2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import algebra as alg
from .algebra import CurvatureOp, CurvatureViolation
from .connection import (
    BilinearField,
    Connection,
    NotClosedError,
    curvature,
    d_one_form,
    ricci_field,
    second_bianchi_residual,
    trace_one_form,
    trace_two_form,
    volume_potential,
    weyl_project_field,
)
from .io import (
    FormatError,
    bilinear_to_json,
    connection_from_json,
    connection_to_json,
    curvature_to_json,
    dump_json,
    load_json,
    raw_curvature_from_json,
)
from .realization import (
    NotProjectivelyFlatError,
    obstruction_audit,
    projectively_flat_potential,
    realize_linear,
    realize_projectively_flat,
    realize_ricci_constant,
)

PASS, FAIL, WITNESS = "pass", "fail", "witness"

# realization table: nonzero components -> realizable?
TABLE_ROWS = [
    (("weyl", "sym", "alt"), "yes"),
    (("weyl", "sym"), "yes"),
    (("weyl", "alt"), "yes"),
    (("weyl",), "yes"),
    (("sym", "alt"), "yes"),
    (("sym",), "yes"),
    (("alt",), "no"),
    ((), "yes"),
]


class UsageError(Exception):
    pass


def max_dimension() -> int:
    raw = os.environ.get("CURVFORGE_MAX_M", "8")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CURVFORGE_MAX_M must be an integer, got {raw!r}") from None


def _check_dimension(m: int) -> None:
    if m < 3:
        raise UsageError(f"--m must be at least 3, got {m}")
    cap = max_dimension()
    if m > cap:
        raise UsageError(f"--m {m} exceeds CURVFORGE_MAX_M={cap}")


def parse_mask(text: str) -> frozenset:
    text = text.strip()
    if text in ("", "none"):
        return frozenset()
    if text == "all":
        return frozenset(alg.COMPONENTS)
    parts = {p.strip() for p in text.split(",") if p.strip()}
    unknown = parts - set(alg.COMPONENTS)
    if unknown:
        raise UsageError(f"bad mask {text!r}: unknown component(s) {sorted(unknown)}; "
                         f"use a comma list of {', '.join(alg.COMPONENTS)}, or 'none'/'all'")
    return frozenset(parts)


def check(name: str, ok: bool, order=None, witness=None, **extra) -> dict:
    entry = {"name": name, "status": PASS if ok else FAIL}
    if order is not None:
        entry["order_checked"] = order
    if witness is not None:
        entry["witness"] = witness.to_json() if hasattr(witness, "to_json") else witness
    entry.update(extra)
    return entry


def _report(command: str, checks: list, **fields) -> dict:
    report = {"command": command, **fields, "checks": checks}
    report["status"] = FAIL if any(c["status"] == FAIL for c in checks) else PASS
    return report


def _zero_field_check(name: str, jets, order: int) -> dict:
    hit = jets.first_nonzero(order)
    return check(name, hit is None, order, hit)


def _components(A: CurvatureOp) -> dict:
    parts = alg.decompose(A)
    return {"weyl": not parts.weyl.is_zero(), "sym": not parts.ricci_sym.is_zero(),
            "alt": not parts.ricci_alt.is_zero()}


# -- commands -----------------------------------------------------------------------

def cmd_gen(args) -> dict:
    _check_dimension(args.m)
    mask = parse_mask(args.mask)
    A = alg.random_curvature(args.seed, args.m, mask)
    text = dump_json(curvature_to_json(A))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    parts = alg.decompose(A)
    comps = _components(A)
    checks = [check("mask-honest", all(comps[c] == (c in mask) for c in alg.COMPONENTS),
                    components=comps)]
    summary = {
        "mask": sorted(mask),
        "ricci_sym": bilinear_to_json(parts.ricci_sym),
        "ricci_alt": bilinear_to_json(parts.ricci_alt),
        "weyl_nonzero_entries": len(parts.weyl.nonzero()),
    }
    return _report("gen", checks, seed=args.seed, m=args.m, out=args.out,
                   summary=summary)


def cmd_check(args) -> dict:
    m, raw = raw_curvature_from_json(load_json(args.tensor))
    try:
        A = alg.validate_curvature(m, raw)
    except CurvatureViolation as exc:
        v = exc.violation
        witness = {"identity": v.identity, "index": [i + 1 for i in v.index],
                   "residual": str(v.value)}
        return _report("check", [check("curvature-identities", False, witness=witness)],
                       file=args.tensor, m=m)
    except ValueError as exc:
        raise FormatError(f"{args.tensor}: {exc}") from exc
    parts = alg.decompose(A)
    rho_s, rho_a = parts.ricci_sym, parts.ricci_alt
    checks = [
        check("curvature-identities", True),
        check("weyl-ricci-free", alg.ricci(parts.weyl).is_zero()),
        check("weyl-idempotent", alg.weyl_project(parts.weyl) == parts.weyl),
        check("ricci-split", rho_s.is_symmetric() and rho_a.is_antisymmetric()
              and rho_s + rho_a == alg.ricci(A)),
        check("reconstruction", alg.recompose(*parts) == A),
        check("ricci-of-h", alg.ricci(alg.h_map(rho_s)) == rho_s * (1 - m)
              and alg.ricci(alg.h_map(rho_a)) == rho_a * (-(1 + m))),
    ]
    return _report("check", checks, file=args.tensor, m=m, components=_components(A),
                   projectively_flat=parts.weyl.is_zero())


def _load_curvature(path) -> CurvatureOp:
    m, raw = raw_curvature_from_json(load_json(path))
    try:
        return alg.validate_curvature(m, raw)
    except ValueError as exc:
        raise FormatError(f"{path}: not a curvature operator: {exc}") from exc


def cmd_realize(args) -> dict:
    A = _load_curvature(args.tensor)
    D = args.order
    if D < 3:
        raise UsageError(f"--order must be at least 3, got {D}")
    _check_dimension(A.m)
    fields = {"file": args.tensor, "m": A.m, "order": D, "mode": args.mode}
    checks = []
    if args.mode == "linear":
        nabla = realize_linear(A, D)
        R = curvature(nabla)
    elif args.mode == "ricci-constant":
        result = realize_ricci_constant(A, D)
        nabla, R = result.connection, result.curvature
        target = BilinearField.constant(alg.ricci(A), D - 1)
        checks.append(_zero_field_check("ricci-constant", ricci_field(R) - target, D - 1))
        trace_free = all(k not in (i, j) for layer in result.gamma_layers[1:]
                         for (i, j, k), _ in layer.symbols())
        checks.append(check("corrections-trace-free", trace_free))
        fields["iterations"] = result.iterations
        fields["residual_degrees"] = result.residual_degrees
    else:
        try:
            theta = projectively_flat_potential(A)
        except NotProjectivelyFlatError as exc:
            witness = {"index": [i + 1 for i in exc.index], "value": str(exc.value)}
            checks.append(check("input-projectively-flat", False, witness=witness))
            return _report("realize", checks, **fields)
        nabla = realize_projectively_flat(theta, D)
        R = curvature(nabla)
        checks.append(_zero_field_check("projectively-flat", weyl_project_field(R), D - 1))
        fields["theta"] = bilinear_to_json(theta)
    checks.insert(0, check("origin-curvature", R.at_origin() == A))
    if args.out:
        dump_json(connection_to_json(nabla), args.out)
        fields["out"] = args.out
    return _report("realize", checks, **fields)


def verify_connection(nabla: Connection) -> list[dict]:
    """Curvature identities, trace laws, the Ricci-symmetry chain and second Bianchi."""
    R = curvature(nabla)
    v = R.valid_order
    rho = ricci_field(R)
    tr = trace_two_form(R)
    omega = trace_one_form(nabla)
    d_omega = d_one_form(omega)
    checks = [
        _zero_field_check("antisymmetry", R.antisymmetry_defect(), v),
        _zero_field_check("first-bianchi", R.bianchi_defect(), v),
        _zero_field_check("trace-identity", tr - rho.T + rho, v),
        # components of Tr = 2 d omega as forms: Tr[i, j] = d_i omega_j - d_j omega_i
        _zero_field_check("trace-equals-d-omega", tr - d_omega, v),
    ]
    closed = d_omega.first_nonzero(v) is None
    ricci_sym = rho.alt().first_nonzero(v) is None
    checks.append(check("closed-iff-ricci-symmetric", closed == ricci_sym, v,
                        closed=closed, ricci_symmetric=ricci_sym))
    try:
        phi = volume_potential(nabla)
    except NotClosedError as exc:
        entry = check("volume-potential", not ricci_sym, v - 1 if v else 0, exc.witness)
        if entry["status"] == PASS:
            entry["status"] = WITNESS
        checks.append(entry)
    else:
        checks.append(check("volume-potential", ricci_sym, v, potential=phi.terms_json()))
    residual = second_bianchi_residual(nabla, R)
    checks.append(_zero_field_check("second-bianchi", residual, residual.valid_order))
    return checks


def cmd_verify(args) -> dict:
    try:
        nabla = connection_from_json(load_json(args.connection))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{args.connection}: {exc}") from exc
    _check_dimension(nabla.m)
    return _report("verify", verify_connection(nabla), file=args.connection,
                   m=nabla.m, order=nabla.order)


def table_row(mask, expected: str, seed, m: int, D: int) -> dict:
    """Realize one row of the table and verify its defining constraints."""
    A = alg.random_curvature(seed, m, mask)
    cells = {c: ("*" if c in mask else "0") for c in alg.COMPONENTS}
    checks = []
    if "weyl" in mask:
        method = "ricci-constant"
        result = realize_ricci_constant(A, D)
        nabla, R = result.connection, result.curvature
        rho = ricci_field(R)
        target = BilinearField.constant(alg.ricci(A), D - 1)
        checks.append(_zero_field_check("ricci-constant", rho - target, D - 1))
        if "sym" not in mask:
            checks.append(_zero_field_check("ricci-antisymmetric", rho.sym(), D - 1))
        if "alt" not in mask:
            checks.append(_zero_field_check("ricci-symmetric", rho.alt(), D - 1))
    elif mask:
        method = "projective"
        theta = projectively_flat_potential(A)
        nabla = realize_projectively_flat(theta, D)
        R = curvature(nabla)
        rho = ricci_field(R)
        checks.append(_zero_field_check("projectively-flat", weyl_project_field(R), D - 1))
        if "alt" not in mask:
            checks.append(_zero_field_check("ricci-symmetric", rho.alt(), D - 1))
    else:
        method = "flat"
        nabla = Connection.flat(m, D)
        R = curvature(nabla)
        checks.append(_zero_field_check("flat", R, D - 1))
    checks.insert(0, check("origin-curvature", R.at_origin() == A))
    residual = second_bianchi_residual(nabla, R)
    checks.append(_zero_field_check("second-bianchi", residual, residual.valid_order))

    row = {"components": cells, "expected": expected, "method": method}
    if mask == frozenset({"alt"}):
        # the only candidate: projectively flat forces Ricci symmetric part off the origin
        hit = rho.sym().first_nonzero(D - 1)
        checks.append({"name": "ricci-sym-nonzero", "status": WITNESS if hit else FAIL,
                       "order_checked": D - 1, **({"witness": hit.to_json()} if hit else {})})
        audit = obstruction_audit(nabla)
        failed = dict(audit.hypothesis_failures)
        entry = {"name": "flatness-audit", "order_checked": audit.valid_order,
                 "status": WITNESS if "ricci-antisymmetric" in failed else FAIL}
        if failed:
            entry["hypothesis_failures"] = {k: w.to_json() for k, w in failed.items()}
        checks.append(entry)
        ok = all(c["status"] != FAIL for c in checks)
        row["result"] = "obstructed" if ok else "fail"
    else:
        ok = all(c["status"] == PASS for c in checks)
        row["result"] = "yes" if ok else "fail"
    row["matches_expected"] = (row["result"] == "yes") == (expected == "yes") and row["result"] != "fail"
    row["checks"] = checks
    return row


def cmd_table(args) -> dict:
    _check_dimension(args.m)
    D = args.order
    if D < 3:
        raise UsageError(f"--order must be at least 3, got {D}")
    rows = [table_row(frozenset(mask), expected, [args.seed, n], args.m, D)
            for n, (mask, expected) in enumerate(TABLE_ROWS)]
    checks = [check("table-matches", all(r["matches_expected"] for r in rows),
                    yes=sum(r["result"] == "yes" for r in rows),
                    obstructed=sum(r["result"] == "obstructed" for r in rows))]
    return _report("table", checks, seed=args.seed, m=args.m, order=D, rows=rows)


def cmd_dims(args) -> dict:
    _check_dimension(args.m)
    rows, checks = [], []
    for m in range(3, args.m + 1):
        try:
            weyl, sym, alt, total = alg.component_dimensions(m)
        except AssertionError as exc:
            checks.append(check(f"rank-m{m}", False, detail=str(exc)))
            continue
        rows.append({"m": m, "weyl": weyl, "sym": sym, "alt": alt, "total": total})
        checks.append(check(f"rank-m{m}", True))
    return _report("dims", checks, m=args.m, rows=rows)


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvforge", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded curvature operator")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--mask", default="all", help="comma list of weyl,sym,alt; 'none' or 'all'")
    p.add_argument("--out", help="tensor file (default: stdout, report to stderr)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="validate and decompose a curvature operator file")
    p.add_argument("tensor")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("realize", help="build a connection realizing a curvature operator")
    p.add_argument("tensor")
    p.add_argument("--mode", choices=["linear", "ricci-constant", "projective"], default="linear")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--out", help="connection file")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="audit a connection file")
    p.add_argument("connection")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table", help="reproduce the eight-row realization table")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--order", type=int, default=6)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("dims", help="component dimensions for 3..m, checked against exact ranks")
    p.add_argument("--m", type=int, default=6)
    p.set_defaults(func=cmd_dims)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"curvforge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    stream = sys.stderr if args.command == "gen" and not args.out else sys.stdout
    stream.write(dump_json(report))
    return 0 if report["status"] == PASS else 1


if __name__ == "__main__":
    sys.exit(main())

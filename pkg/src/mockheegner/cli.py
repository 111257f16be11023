"""mockheegner command line: construct, verify, table.

Exit codes: 0 success, 1 computation error or mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import heegner, lseries


class UsageError(ValueError):
    pass


def _validate_p(p: int):
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise UsageError(f"{p} is not prime")
    if p % 9 not in (4, 7):
        raise UsageError(f"p ≡ {p % 9} (mod 9) unsupported")


def _emit(obj, fmt: str, markdown_fn):
    if fmt == "json":
        print(json.dumps(obj, indent=1))
    else:
        print(markdown_fn(obj))


# ---------------------------------------------------------------------------
# construct


def _report_markdown(d: dict) -> str:
    lines = [f"## x^3 + y^3 = {d['p'] ** d['case']}  (p = {d['p']}, case {d['case']})", ""]
    lines.append(f"- verdict: {d['verdict']}")
    if d.get("point"):
        lines.append(f"- point: ({d['point']['x']}, {d['point']['y']})  projective {d['point']['projective']}")
    if d.get("Z"):
        lines.append(f"- Z on {d['Z']['model']}: ({d['Z']['x']}, {d['Z']['y']})")
    if d.get("W_branch"):
        lines.append(f"- descent branch: {d['W_branch']}")
    cert = d["certificate"]
    lines.append(f"- 3 is a cube mod p: {'yes' if cert['three_is_cube'] else 'no'}; {cert['statement']}")
    if d.get("comparison"):
        cmp_ = d["comparison"]
        extra = f" (multiple {cmp_['multiple']})" if "multiple" in cmp_ else ""
        lines.append(f"- table: {cmp_['status']}{extra}")
    lines.append(f"- digits: {d['digits']}, conjugates: {d['conjugates']}")
    return "\n".join(lines)


def cmd_construct(args) -> int:
    _validate_p(args.p)
    try:
        rep = heegner.construct(args.p, args.case, digits=args.digits, max_digits=args.max_digits)
    except heegner.StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _emit(rep.to_dict(), args.format, _report_markdown)
    return 0


# ---------------------------------------------------------------------------
# verify


def _suite_parametrization(args) -> list[tuple[str, bool, str]]:
    from . import qseries
    from .etaeval import PrecisionContext, phi_cusp, phi_point
    from .cyclofield import W

    out = []
    ident = qseries.verify_weierstrass_identity(args.order)
    out.append((f"y^2+y-x^3+1 = 0 to q^{args.order}", ident.residual == 0 and ident.certified, ident.note))
    for name, eq, level in (("x", qseries.X_QUOTIENT, 243), ("f", qseries.F_QUOTIENT, 81)):
        rep = qseries.ligozat_check(eq, level)
        out.append((f"Ligozat {name} on Gamma_0({level})", rep.is_function_on_gamma0, rep.details()))
    ctx = PrecisionContext(args.digits or 60)
    mp = ctx.mp
    tol = mp.mpf(10) ** (-(ctx.digits * 3 // 4))
    P = phi_cusp(Fraction(-1, 27), ctx)
    err = abs(P.x) + abs(P.y - ctx.omega())
    out.append(("Phi(-1/27) = (0, w)", err < tol, mpf_str(err)))
    P = phi_cusp(Fraction(1, 81), ctx)
    out.append(("Phi(1/81) = infinity", P.is_infinity, ""))
    P = phi_point((W - 1) / 27, ctx)
    err = abs(P.x - mp.cbrt(3)) + abs(P.y + 2)
    out.append(("Phi((w-1)/27) = (cbrt 3, -2)", err < tol, mpf_str(err)))
    return out


def mpf_str(x) -> str:
    import mpmath

    return mpmath.nstr(x, 3)


def _suite_constants(args) -> list[tuple[str, bool, str]]:
    from .cyclofield import W
    from .etaeval import PrecisionContext, eval_f, eval_h, product_identity_residual, product_constant

    ctx = PrecisionContext(args.digits or 100)
    mp = ctx.mp
    tol = ctx.eps
    w = ctx.omega()
    checks = [
        ("h(w/3) = 3 sqrt(-3)", eval_h(W / 3, ctx), 3 * mp.sqrt(-3)),
        ("f(w/9) = e^(-pi i/6)/sqrt 3", eval_f(W / 9, ctx), mp.expj(-mp.pi / 6) / mp.sqrt(3)),
        ("f((w-7)/9) = -w^2/cbrt 9", eval_f((W - 7) / 9, ctx), -w * w / mp.cbrt(9)),
        ("f((w-7)/27) = -w/cbrt 3", eval_f((W - 7) / 27, ctx), -w / mp.cbrt(3)),
        ("product constant = -e^(pi i/6)/3^(1/6)", product_constant(ctx), -mp.expj(mp.pi / 6) / mp.root(3, 6)),
    ]
    out = [(name, abs(a - b) < tol, mpf_str(abs(a - b))) for name, a, b in checks]
    tol51 = mp.mpf(10) ** (-(ctx.digits - 20))
    for p in args.primes:
        for case in (1, 2):
            r = product_identity_residual(p, case, ctx)
            out.append((f"x(tau) as f-product, p={p} case {case}", r < tol51, mpf_str(r)))
    return out


def _suite_shimura(args) -> list[tuple[str, bool, str]]:
    out = []
    for p in [args.p] if args.p else [7, 13]:
        _validate_p(p)
        for case in (1, 2):
            r = heegner.shimura_report(p, case)
            rho, sig = r["rho"], r["sigma"]
            if rho["target_equivalent"] is not None:
                out.append((f"p={p} case {case}: rho image", rho["target_equivalent"], ""))
            out.append((f"p={p} case {case}: rho word {rho['word']}", rho["map_ok"], rho["map"]))
            out.append((f"p={p} case {case}: sigma image", sig["target_equivalent"], sig["alpha"]))
            out.append((f"p={p} case {case}: sigma word {sig['word']}", sig["map_ok"], sig["map"]))
    return out


SUITES = {"parametrization": _suite_parametrization, "constants": _suite_constants, "shimura": _suite_shimura}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        for label, ok, detail in SUITES[name](args):
            rows.append({"suite": name, "check": label, "pass": bool(ok), "detail": str(detail)})
    if args.format == "json":
        print(json.dumps(rows, indent=1))
    else:
        print("| suite | check | result | detail |\n|---|---|---|---|")
        for r in rows:
            print(f"| {r['suite']} | {r['check']} | {'PASS' if r['pass'] else 'FAIL'} | {r['detail']} |")
    return 0 if all(r["pass"] for r in rows) else 1


# ---------------------------------------------------------------------------
# table


def _supported_primes(max_p: int) -> list[int]:
    return [p for p in lseries.primes_below(max_p + 1) if p % 9 in (4, 7)]


def _table_row(job) -> dict:
    p, case, digits, max_digits, skip_l, conductors = job
    table = heegner.published_tables()
    expected = table[f"case{case}"]["rows"].get(str(p))
    row: dict = {"p": p, "case": case}
    cert = heegner.certificate(p)
    row["three_is_cube"] = cert["three_is_cube"]
    if expected is not None:
        row["three_is_cube_status"] = "MATCH" if expected["three_is_cube"] == cert["three_is_cube"] else "DIFFER"
    if not skip_l:
        n = 3 * p * p if case == 1 else 3 * p
        ctab = lseries.load_conductors(conductors)
        N, sign = lseries.conductor_for(n, ctab)
        val, k, flag = lseries.l_alg(n, N, sign=sign)
        row["L_alg"] = k
        row["L_alg_value"] = float(val)
        if expected is not None:
            row["L_alg_status"] = "MATCH" if (k == expected["L_alg"] and not flag) else "DIFFER"
    try:
        rep = heegner.construct(p, case, digits=digits, max_digits=max_digits)
    except heegner.StageError as e:
        row["point"] = None
        row["error"] = str(e)
        row["point_status"] = "DIFFER"
        return row
    d = rep.to_dict()
    row["verdict"] = rep.verdict
    row["point"] = d["point"]
    cmp_ = rep.comparison or {}
    row["point_status"] = cmp_.get("status", "NO ROW")
    for key in ("multiple", "height", "expected_height"):
        if key in cmp_:
            row[key] = cmp_[key]
    return row


def _short(s: str, width: int = 60) -> str:
    return s if len(s) <= width else s[: width // 2 - 2] + "..." + s[-(width // 2 - 1):]


def _table_markdown(rows: list[dict]) -> str:
    out = []
    for case in (1, 2):
        sub = [r for r in rows if r["case"] == case]
        if not sub:
            continue
        curve = "x^3+y^3=p" if case == 1 else "x^3+y^3=p^2"
        lcurve = "3p^2" if case == 1 else "3p"
        out += [f"### {curve}", "", f"| p | L_alg(E_{lcurve}) | 3 cube mod p | point | status |", "|---|---|---|---|---|"]
        for r in sub:
            lv = f"{r['L_alg']} {r.get('L_alg_status', '')}" if "L_alg" in r else "-"
            cube = f"{'yes' if r['three_is_cube'] else 'no'} {r.get('three_is_cube_status', '')}"
            if r.get("error"):
                pt = f"error: {r['error']}"
            elif r["point"] is None:
                pt = "inf (torsion)"
            else:
                pt = _short(r["point"]["projective"])
                if "multiple" in r and r["multiple"] != 1:
                    pt += f" = {r['multiple']} x table point"
                if "height" in r:
                    pt += f", height {r['height']:.2f}"
            out.append(f"| {r['p']} | {lv} | {cube} | {pt} | {r['point_status']} |")
        out.append("")
    return "\n".join(out)


def cmd_table(args) -> int:
    primes = _supported_primes(args.max_p)
    jobs = [(p, case, args.digits, args.max_digits, args.skip_lvalue, args.conductors) for case in (1, 2) for p in primes]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_table_row, jobs))
    else:
        rows = [_table_row(j) for j in jobs]
    _emit(rows, args.format, _table_markdown)
    statuses = [v for r in rows for k, v in r.items() if k.endswith("status")]
    return 1 if "DIFFER" in statuses else 0


# ---------------------------------------------------------------------------


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _digits(text):
    v = int(text)
    if v < 60:
        raise argparse.ArgumentTypeError("digits must be at least 60")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mockheegner", description="Rational points on x^3+y^3 = p, p^2 from X_0(243).")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=_digits, default=None, help="working precision (default max(120, 8p))")
    common.add_argument("--max-digits", type=_digits, default=None, help="cap for precision escalation")
    common.add_argument("--format", choices=("json", "markdown"), default=None, help="default json for construct, markdown otherwise")

    c = sub.add_parser("construct", parents=[common], help="build the point for one (p, case)")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--case", type=int, choices=(1, 2), required=True)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="check identities")
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.add_argument("--p", type=int, default=None, help="prime for the shimura suite")
    v.add_argument("--order", type=int, default=250, help="q-expansion order")
    v.add_argument("--primes", type=int, nargs="+", default=[7, 13, 31, 43])
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", parents=[common], help="reproduce the tables of points and L-values")
    t.add_argument("--max-p", type=int, default=103)
    t.add_argument("--jobs", type=_positive, default=1)
    t.add_argument("--conductors", default=None, help="JSON file n -> {N, sign}")
    t.add_argument("--skip-lvalue", action="store_true")
    t.set_defaults(func=cmd_table)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # parent-parser actions are shared, so the per-command default is set here
    if args.format is None:
        args.format = "json" if args.command == "construct" else "markdown"
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

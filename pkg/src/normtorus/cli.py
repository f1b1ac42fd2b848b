"""
Command-line driver: enumerate fields with verdicts, classify ranges,
run the verification suites, verify the pairing lemmas, and evaluate
constants.  Exit codes: 0 success, 2 configuration error, 3 property
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from multiprocessing import Pool
from pathlib import Path

from .frobenius import (
    NORMALIZATION_VERSION,
    CharacterNormalization,
    classify_range,
    verdict,
)
from .groups import FiniteAbelianGroup, adm_set, all_alternating_forms, aut_order
from .store import ResultStore, StoreError
from .tuples import EnumerationFilter, discriminant, enumerate_tuples, enumeration_branches

CSV_HEADER = "disc,tuple,sha_order,at_order,wa,hnp"


class ConfigError(ValueError):
    pass


def parse_group(text: str) -> FiniteAbelianGroup:
    try:
        return FiniteAbelianGroup([int(part) for part in text.split(".")])
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad group descriptor {text!r}: {e}") from None


def parse_bound(text: str) -> int:
    try:
        x = int(float(text))
    except ValueError:
        raise ConfigError(f"bad bound {text!r}") from None
    if x < 1:
        raise ConfigError("bound must be >= 1")
    return x


def _branch_rows(factors, X, branch, strategy):
    """Verdict rows for one top-level enumeration branch (worker-safe)."""
    A = FiniteAbelianGroup(factors)
    norm = CharacterNormalization()
    rows = []
    for t in enumerate_tuples(A, X, EnumerationFilter(surjective=True),
                              branch=branch, strategy=strategy):
        v = verdict(t, norm)
        rows.append((int(discriminant(t).total), t.serialize(),
                     int(v.sha_order), int(v.at_order), bool(v.wa), bool(v.hnp)))
    return rows


def _rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for d, s, sha, at, wa, hnp in sorted(rows):
        lines.append(f"{d},{s},{sha},{at},{str(wa).lower()},{str(hnp).lower()}")
    return "\n".join(lines) + "\n"


def _rows_to_json(rows, A, X) -> str:
    payload = {
        "group": A.describe(),
        "X": X,
        "normalization": NORMALIZATION_VERSION,
        "records": [
            {"disc": d, "tuple": s, "sha_order": sha, "at_order": at,
             "wa": wa, "hnp": hnp}
            for d, s, sha, at, wa, hnp in sorted(rows)
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def cmd_enumerate(args) -> int:
    A = parse_group(args.group)
    X = parse_bound(args.X)
    branches = enumeration_branches(A, X)
    store = ResultStore(args.store) if args.store else None
    rows = []
    jobs = []
    for i, br in enumerate(branches):
        spill = None
        if store:
            spill = store.key(f"spill{i}", A.describe(), X, NORMALIZATION_VERSION, "csv")
        if store and args.resume and store.has(spill):
            for line in store.read(spill).splitlines()[1:]:
                d, s, sha, at, wa, hnp = line.split(",")
                rows.append((int(d), s, int(sha), int(at), wa == "true", hnp == "true"))
            continue
        jobs.append((i, br, spill))
    work = [( list(A.factors), X, tuple(br[:2]), args.strategy) for _i, br, _s in jobs]
    if args.workers > 1 and len(work) > 1:
        with Pool(args.workers) as pool:
            results = pool.starmap(_branch_rows, work)
    else:
        results = [_branch_rows(*w) for w in work]
    for (i, br, spill), branch_rows in zip(jobs, results):
        if store:
            store.write(spill, _rows_to_csv(branch_rows))
        rows.extend(branch_rows)
    n = len(rows)
    if n % aut_order(A):
        print(f"property failure: {n} records not divisible by |Aut| = {aut_order(A)}",
              file=sys.stderr)
        return 3
    text = _rows_to_csv(rows) if args.format == "csv" else _rows_to_json(rows, A, X)
    if store:
        store.write(store.key("enumerate", A.describe(), X, NORMALIZATION_VERSION,
                              args.format), text)
    _emit(args.out, text)
    return 0


def cmd_classify(args) -> int:
    A = parse_group(args.group)
    X = parse_bound(args.X)
    norm = CharacterNormalization()
    records = []
    tally = classify_range(A, X, norm, records=records)
    text = json.dumps(tally, indent=2) + "\n"
    _emit(args.out, text)
    if args.plot:
        from .report import render_histogram
        render_histogram(tally, args.plot)
    if args.emit_plot_data:
        from .report import plot_data_series
        Path(args.emit_plot_data).write_text(plot_data_series(records, X))
    return 0


def _check(report, name, ok, detail=""):
    report.append({"check": name, "pass": bool(ok), "detail": detail})
    return ok


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    norm = CharacterNormalization()
    report = []
    ok = True

    # alternating-form restriction criterion vs exhaustive form evaluation
    from .groups import form_value, restriction_is_zero
    for factors in ([2, 2], [3, 3], [2, 4], [2, 3, 3], [4, 4]):
        A = FiniteAbelianGroup(factors)
        A2 = FiniteAbelianGroup(factors)
        if args.fault_inject:
            A2.pair_moduli[next(iter(A2.pair_moduli))] += 1
        good = True
        for _ in range(200):
            a = rng.choice(A.elements())
            b = rng.choice(A.elements())
            brute = all(form_value(A, f, a, b) == 0 for f in all_alternating_forms(A))
            good &= brute == restriction_is_zero(A2, a, b)
        ok &= _check(report, f"restriction-oracle-{A.describe()}", good)

    # admissible sets equal ellA + <a> off the singular subspace
    from .groups import s_subspace
    for factors in ([2, 2], [3, 3], [2, 4], [3, 9]):
        A = FiniteAbelianGroup(factors)
        S = s_subspace(A)
        good = True
        for a in A.torsion(A.ell).elements:
            if a == A.zero or a in S:
                continue
            expect = A.span([A.smul(A.ell, x) for x in A.elements()] + [a]).elements
            good &= adm_set(A, a).elements == expect
        ok &= _check(report, f"admissible-closed-form-{A.describe()}", good)

    # quadratic-symbol oracle on a sample
    from sympy import factorint, jacobi_symbol, primerange
    from .frobenius import frobenius_image
    from .tuples import ExtensionTuple
    A = FiniteAbelianGroup([2, 2])
    good = True
    count = 0
    for t in enumerate_tuples(A, 3000, EnumerationFilter(surjective=True)):
        ram = {q for x in t.v.values() for q in factorint(abs(x))} | {2}
        for p in primerange(3, 30):
            if p in ram:
                continue
            img = frobenius_image(t, p, norm)
            for b in [(0, 1), (1, 0), (1, 1)]:
                w = 1
                for a, x in t.v.items():
                    if sum(bi * ai for bi, ai in zip(b, a)) % 2:
                        w *= x
                want = 1 if w == 1 else jacobi_symbol(_fundamental_kernel(w), p)
                got = 1 if sum(bi * xi for bi, xi in zip(b, img)) % 2 == 0 else -1
                good &= got == want
                count += 1
    ok &= _check(report, "kronecker-oracle-2.2", good, f"{count} symbols")

    # character-sum detector vs direct membership
    from .congruence import CongruenceFunction, f_correct, indicator_via_characters
    A = FiniteAbelianGroup([3, 3])
    cf = CongruenceFunction(A, B=frozenset({A.zero}))
    good = True
    n = 0
    for t in enumerate_tuples(A, 10 ** 13, EnumerationFilter(surjective=True)):
        good &= f_correct(t, cf, norm) == indicator_via_characters(t, cf, norm)
        n += 1
    ok &= _check(report, "charsum-detector-3.3", good, f"{n} tuples")

    # pairing lemmas
    from .congruence import all_subgroups, verify_block_lemma
    for spec in (args.lemmas or "2:2,3:2").split(","):
        ell, nn = (int(x) for x in spec.split(":"))
        good = True
        for B in all_subgroups(FiniteAbelianGroup([ell] * nn)):
            good &= verify_block_lemma(ell, nn, B)["counterexamples"] == []
        ok &= _check(report, f"pairing-lemma-{ell}:{nn}", good)

    text = json.dumps({"seed": args.seed, "passed": bool(ok), "checks": report},
                      indent=2) + "\n"
    _emit(args.out, text)
    return 0 if ok else 3


def _fundamental_kernel(w: int) -> int:
    """Squarefree kernel with the 2-adic/sign data of the attached quadratic
    field, as a Kronecker-symbol argument."""
    from sympy import factorint
    d = 1
    for p in factorint(abs(w)):
        if p == 2:
            d *= 8
        else:
            d *= p if p % 4 == 1 else -p
    if w < 0:
        d *= -4
    return d


def cmd_verify_lemmas(args) -> int:
    from .congruence import all_subgroups, verify_block_lemma
    A = FiniteAbelianGroup([args.ell] * args.n)
    reports = [verify_block_lemma(args.ell, args.n, B) for B in all_subgroups(A)]
    text = json.dumps(reports, indent=2, default=list) + "\n"
    _emit(args.out, text)
    return 0 if all(not r["counterexamples"] for r in reports) else 3


def cmd_constants(args) -> int:
    from .euler import (
        c233_constants,
        mammo_closed_form,
        multicyclic_total_constant,
        multicyclic_wa_constant,
    )
    P = parse_bound(args.prime_bound)
    out = {}
    if args.group:
        A = parse_group(args.group)
        if A.factors not in ((2, 3, 3), (3, 3, 2), (3, 2, 3)):
            raise ConfigError("closed constants are available for the 2.3.3 group only")
        out = {k: v.as_json() for k, v in
               c233_constants(H=parse_bound(args.kappa_height), P=P).items()}
    else:
        if args.ell is None or args.n is None:
            raise ConfigError("need --ell and --n (or --group 2.3.3)")
        out["total"] = multicyclic_total_constant(args.ell, args.n, P=P).as_json()
        out["wa"] = multicyclic_wa_constant(args.ell, args.n, P=P).as_json()
        if (args.ell, args.n) == (3, 2):
            out["total_closed_form"] = mammo_closed_form(P=P).as_json()
    _emit(args.out, json.dumps(out, indent=2) + "\n")
    return 0


def _emit(out, text: str):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normtorus")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("enumerate", help="fields with verdicts up to a bound")
    p.add_argument("--group", required=True)
    p.add_argument("--X", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strategy", choices=("dfs", "radical"), default="dfs")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--store", help="append-only result directory")
    p.add_argument("--resume", action="store_true",
                   help="reuse completed branch spill files from the store")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", help="tally verdicts per discriminant decade")
    p.add_argument("--group", required=True)
    p.add_argument("--X", required=True)
    p.add_argument("--plot", help="render a histogram figure to this path")
    p.add_argument("--emit-plot-data", help="write a (log X, count) series CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run the cross-module oracle suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lemmas", help="comma list like 2:2,3:2")
    p.add_argument("--fault-inject", action="store_true",
                   help="negative control: corrupt a form modulus")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-lemmas", help="exhaustive pairing-lemma check")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("constants", help="leading constants with tail bounds")
    p.add_argument("--ell", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--group")
    p.add_argument("--prime-bound", default="1e7")
    p.add_argument("--kappa-height", default="1e24")
    p.add_argument("--precision", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "precision", None):
        from mpmath import mp
        mp.dps = args.precision
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except StoreError as e:
        print(f"store error: {e}", file=sys.stderr)
        return 4
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

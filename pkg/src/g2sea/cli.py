"""Command-line front end: count, classify, rm-reconstruct, torsion, verify-props.

Results go to stdout (text tables, or JSON with --json); progress notes go to
stderr.  Exit codes: 0 success, 2 usage errors, 3 computation could not
finish within its budget or bounds, 4 internal inconsistency (a bug).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import ff, frobenius, genus2, hilbert, kernel, linalg, modeq, siegel
from .errors import (
    BoundNotMet,
    EmptyRange,
    G2Error,
    GuardExceeded,
    InconsistentResidues,
    InternalInconsistency,
    NotEigen,
    UsageError,
    ValidationError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCOMPLETE = 3
EXIT_INTERNAL = 4


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(payload: dict, as_json: bool, text_lines) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _provider_from_args(args):
    inner = modeq.OracleKernelProvider(
        seed=args.seed,
        degree_guard=args.degree_guard,
        count_guard=args.count_guard,
    )
    if getattr(args, "modeq_dir", None):
        return modeq.ModeqScreeningProvider(
            args.modeq_dir,
            inner=inner if args.oracle else None,
            delta=getattr(args, "delta", None),
        )
    if not args.oracle:
        raise UsageError("choose a provider: --oracle and/or --modeq-dir DIR")
    return inner


def cmd_count(args) -> int:
    C = genus2.parse_curve(args.curve)
    mode = args.mode
    if mode == "naive":
        chi = frobenius.chi_naive(C, args.count_guard)
        payload = {"command": "count", "mode": "naive", "curve": args.curve,
                   "result": chi.to_json()}
        _emit(payload, args.json, [
            f"mode: naive exhaustive count",
            f"q = {chi.q}  s1 = {chi.s1}  s2 = {chi.s2}",
            f"chi = X^4 - ({chi.s1})X^3 + ({chi.s2 + 2 * chi.q})X^2 - ({chi.q * chi.s1})X + {chi.q ** 2}",
            f"#A(F_q) = {chi.group_order()}",
        ])
        return EXIT_OK
    provider = _provider_from_args(args)
    if mode == "siegel":
        report = siegel.pipeline_count_siegel(
            C, provider, ell_max=args.max_ell, verify=args.verify,
            count_guard=args.count_guard, jobs=args.jobs,
        )
    else:
        if args.delta is None:
            raise UsageError("--hilbert needs --delta (5, 8, 13 or 17)")
        F = hilbert.RealQuadField(args.delta)
        report = hilbert.pipeline_count_hilbert(
            C, F, provider, ell_max=args.max_ell, verify=args.verify,
            count_guard=args.count_guard, jobs=args.jobs,
        )
    payload = {"command": "count", "mode": mode, "curve": args.curve,
               "result": report.to_json()}
    lines = [f"mode: {mode} (provider: {'modeq+' if getattr(args, 'modeq_dir', None) else ''}{'oracle' if args.oracle else 'modeq only'})"]
    for row in report.rows:
        extra = ""
        if getattr(row, "chi_mod_ell", None):
            extra = f" chi mod ell = {row.chi_mod_ell} (s1,s2) = {row.s1s2}"
        if getattr(row, "residues", None):
            extra = f" beta = {row.beta} lambdas = {list(row.lambdas)} residues = {list(row.residues)}"
        lines.append(
            f"  ell = {row.ell:>3}  {row.status:<7} {row.reason}{extra}  [{row.micros} us]"
        )
    if report.final is not None:
        chi = report.final
        if mode == "hilbert":
            lines.append(f"psi = {report.psi}  xi: s1 = {report.xi.s1}, s2 = {report.xi.s2}")
        lines.append(f"final: q = {chi.q}  s1 = {chi.s1}  s2 = {chi.s2}  #A = {chi.group_order()}")
        if args.verify:
            lines.append("verified against the naive oracle")
        _emit(payload, args.json, lines)
        return EXIT_OK
    lines.append("partial: budget exhausted before the CRT bound was reached")
    _emit(payload, args.json, lines)
    return EXIT_INCOMPLETE


def cmd_classify(args) -> int:
    C = genus2.parse_curve(args.curve)
    q = C.q
    chi = frobenius.chi_naive(C, args.count_guard)
    ells = [ell for ell in ff.primes_upto(args.max_ell) if q % ell != 0]
    if not ells:
        raise EmptyRange(f"no primes <= {args.max_ell}")
    chis = {}
    if args.jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(args.jobs) as ex:
            for ell, red in zip(ells, ex.map(chi.reduce, ells)):
                chis[ell] = red
    else:
        chis = {ell: chi.reduce(ell) for ell in ells}
    report = siegel.elkies_proportion(chis, q, args.eps)
    payload = {"command": "classify", "curve": args.curve, "chi": chi.to_json(),
               "result": report.to_json()}
    lines = [f"chi: s1 = {chi.s1}, s2 = {chi.s2}  (q = {q})"]
    for row in report.per_ell:
        lines.append(f"  ell = {row.ell:>3}  {row.verdict:<18} pattern {list(row.pattern)}")
    lines.append(
        f"elkies proportion: {report.n_elkies}/{report.n_primes} = "
        f"{report.proportion} (heuristic reference 3/8)"
    )
    if args.rm_delta is not None:
        F = hilbert.RealQuadField(args.rm_delta)
        split_rows = []
        n_split = n_elkies = 0
        for ell in ells:
            if F.delta % ell == 0:
                continue
            pair = hilbert.split_prime(F, ell)
            if pair is None:
                continue
            n_split += 1
            Fl = ff.PrimeField(ell)
            xi = ff.UniPoly.from_ints(Fl, [chi.s2, -chi.s1, 1])
            is_elkies = False
            for r in {r.val for r in ff.poly_roots_in_field(xi)}:
                quad = ff.UniPoly.from_ints(Fl, [q, -r, 1])
                if ff.poly_roots_in_field(quad):
                    is_elkies = True
            n_elkies += is_elkies
            split_rows.append((ell, is_elkies))
            lines.append(f"  split ell = {ell:>3}: {'elkies' if is_elkies else 'not elkies'}")
        payload["rm"] = {
            "delta": F.delta,
            "split": [{"ell": e, "elkies": bool(b)} for e, b in split_rows],
            "n_split": n_split,
            "n_elkies": n_elkies,
            "reference": "1/2",
        }
        if n_split:
            lines.append(
                f"rm (delta={F.delta}): elkies split primes {n_elkies}/{n_split} "
                f"(heuristic reference 1/2)"
            )
    _emit(payload, args.json, lines)
    return EXIT_OK


def _parse_residue(text: str):
    try:
        r_s, beta_s = text.split(":", 1)
        a_s, b_s = beta_s.split(",")
        return int(r_s), int(a_s), int(b_s)
    except ValueError as exc:
        raise UsageError(
            f"bad residue {text!r}; expected r:a,b for r mod (a + b*w)"
        ) from exc


def cmd_rm_reconstruct(args) -> int:
    if args.delta is None:
        raise UsageError("rm-reconstruct needs --delta")
    F = hilbert.RealQuadField(args.delta)
    if args.curve:
        provider = modeq.OracleKernelProvider(
            seed=args.seed, degree_guard=args.degree_guard,
            count_guard=args.count_guard,
        )
        C = genus2.parse_curve(args.curve)
        report = hilbert.pipeline_count_hilbert(
            C, F, provider, ell_max=args.max_ell, verify=args.verify,
            count_guard=args.count_guard,
        )
        if report.final is None:
            _emit({"command": "rm-reconstruct", "result": report.to_json()},
                  args.json, ["partial: budget exhausted"])
            return EXIT_INCOMPLETE
        psi, xi, chi = report.psi, report.xi, report.final
    else:
        if not args.residue:
            raise UsageError("supply --curve or at least one --residue r:a,b")
        if args.q is None:
            raise UsageError("--q is required in residue mode")
        residues = []
        for text in args.residue:
            r, a, b = _parse_residue(text)
            beta = F.elem(a, b)
            if not beta.is_totally_positive() or not ff.is_prime(beta.norm()):
                raise UsageError(
                    f"beta = {beta} must be totally positive of prime norm"
                )
            residues.append(hilbert.RMResidue(beta=beta, ell=beta.norm(),
                                              lam=None, residue=r))
        if len({r.ell for r in residues}) == len(residues):
            cls = hilbert.rm_crt(F, residues)
            _progress(f"CRT class: {cls!r}, small representative {cls.small_representative()}")
        psi = hilbert.reconstruct_psi(F, residues, args.q)
        xi = hilbert.psi_to_xi(psi)
        chi = hilbert.chi_from_xi(xi, args.q)
    payload = {
        "command": "rm-reconstruct",
        "delta": F.delta,
        "psi": {"a": psi.a, "b": psi.b, "repr": repr(psi)},
        "xi": xi.to_json(),
        "chi": chi.to_json(),
    }
    _emit(payload, args.json, [
        f"psi = {psi}  (omega convention: delta = {F.delta})",
        f"xi  = X^2 - ({xi.s1})X + ({xi.s2})",
        f"chi: q = {chi.q}  s1 = {chi.s1}  s2 = {chi.s2}  #A = {chi.group_order()}",
    ])
    return EXIT_OK


def cmd_torsion(args) -> int:
    C = genus2.parse_curve(args.curve)
    chi = frobenius.chi_naive(C, args.count_guard)
    try:
        basis = frobenius.torsion_basis(
            C, chi, args.ell, seed=args.seed, degree_guard=args.degree_guard
        )
    except GuardExceeded as e:
        _progress(f"skip: {e}")
        return EXIT_INCOMPLETE
    M = frobenius.frob_matrix(C, basis)
    J = frobenius.pairing_gram(basis, seed=args.seed)
    matches = frobenius.match_charpoly_on_torsion(C, basis, C.q, args.ell)
    payload = {
        "command": "torsion",
        "ell": args.ell,
        "extension_degree": basis.n,
        "points": [
            {"u": [list(c.coeff_vector()) for c in D.u.coeffs],
             "v": [list(c.coeff_vector()) for c in D.v.coeffs]}
            for D in basis.points
        ],
        "frobenius_matrix": [list(r) for r in M.mat],
        "pairing_gram": [list(r) for r in J],
        "charpoly_mod_ell": M.charpoly_coeffs(),
        "matching_s1s2": sorted(list(matches)),
        "chi_mod_ell": [c % args.ell for c in chi.coeffs()],
    }
    lines = [
        f"A[{args.ell}] rational over F_(q^{basis.n})",
        f"frobenius matrix (columns are images): {[list(r) for r in M.mat]}",
        f"pairing gram: {[list(r) for r in J]}",
        f"charpoly(M) mod {args.ell} = {M.charpoly_coeffs()}  "
        f"(chi mod {args.ell} = {[c % args.ell for c in chi.coeffs()]})",
        f"matching (s1, s2) mod {args.ell}: {sorted(matches)}",
    ]
    _emit(payload, args.json, lines)
    return EXIT_OK


def cmd_verify_props(args) -> int:
    """Randomized invariant checks over tiny instances; exit 4 on any failure."""
    rng = random.Random(args.seed)
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
            _progress(f"PASS {name}")
        except Exception as exc:  # report, do not crash the suite
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))
            _progress(f"FAIL {name}: {exc}")

    def field_axioms():
        for field in (ff.PrimeField(13), ff.ext_field_create(ff.PrimeField(7), 2, 1)):
            for _ in range(60):
                a, b, c = (field.random_element(rng) for _ in range(3))
                assert (a + b) * c == a * c + b * c
                assert a * (b * c) == (a * b) * c
                if not a.is_zero():
                    assert a * a.inverse() == field.one()

    def poly_division():
        field = ff.PrimeField(11)
        for _ in range(40):
            f = ff.UniPoly(field, [field.random_element(rng) for _ in range(6)])
            g = ff.UniPoly(field, [field.random_element(rng) for _ in range(3)])
            if g.is_zero():
                continue
            qq, r = divmod(f, g)
            assert qq * g + r == f and (r.is_zero() or r.degree < g.degree)

    def cantor_laws():
        C = genus2.parse_curve("p=11;P=[3,6,3,0,0,1]")
        D1 = genus2.random_divisor(C, rng)
        D2 = genus2.random_divisor(C, rng)
        D3 = genus2.random_divisor(C, rng)
        lhs = genus2.cantor_add(C, genus2.cantor_add(C, D1, D2), D3)
        rhs = genus2.cantor_add(C, D1, genus2.cantor_add(C, D2, D3))
        assert lhs == rhs
        assert genus2.cantor_add(C, D1, genus2.negate(D1)).is_identity()

    def naive_chi_bounds():
        C = genus2.parse_curve("p=13;P=[5,7,3,1,3,1]")
        chi = frobenius.chi_naive(C, args.count_guard)
        chi.validate()
        N = chi.group_order()
        for _ in range(5):
            D = genus2.random_divisor(C, rng)
            assert genus2.scalar_mul(C, D, N).is_identity()

    def rec_involution():
        for ell in (5, 7, 11):
            field = ff.PrimeField(ell)
            for _ in range(20):
                coeffs = [field.random_element(rng) for _ in range(4)] + [field.one()]
                P = ff.UniPoly(field, coeffs)
                if P.coeff(0).is_zero():
                    continue
                q = 2 + rng.randrange(ell - 2)
                if q % ell == 0:
                    continue
                assert siegel.rec_q(siegel.rec_q(P, q), q) == P.monic()

    def lagrangian_counts():
        for ell in (2, 3) if args.quick else (2, 3, 5):
            J = linalg.mat(
                [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], ell
            )
            siegel.lagrangian_planes(J, ell)  # raises if the count is wrong

    def psi_roundtrip():
        for _ in range(40 if args.quick else 150):
            delta = rng.choice([5, 8, 13, 17])
            F = hilbert.RealQuadField(delta)
            q = rng.choice([13, 17, 23, 29])
            box = hilbert.weil_box(F, q)
            psi = rng.choice(box)
            betas = []
            nb = 1
            for ell in ff.primes_upto(60):
                if delta % ell == 0 or ell == q:
                    continue
                pair = hilbert.split_prime(F, ell)
                if pair is None:
                    continue
                betas.append(pair[0])
                nb *= ell
                if nb > 16 * q:
                    break
            residues = [
                hilbert.RMResidue(beta=b, ell=b.norm(), lam=None,
                                  residue=hilbert.reduce_mod_beta(psi, b))
                for b in betas
            ]
            assert hilbert.reconstruct_psi(F, residues, q) == psi

    def pairing_laws():
        C = genus2.parse_curve("p=11;P=[1,7,9,10,7,1]")
        chi = frobenius.chi_naive(C, args.count_guard)
        basis = frobenius.torsion_basis(C, chi, 2, seed=args.seed)
        J = frobenius.pairing_gram(basis, seed=args.seed)
        assert linalg.det(J, 2) != 0
        M = frobenius.frob_matrix(C, basis)
        assert M.verify_multiplier(J)

    check("field axioms", field_axioms)
    check("polynomial division", poly_division)
    check("cantor group laws", cantor_laws)
    check("naive chi Weil-Rueck + annihilation", naive_chi_bounds)
    check("rec_q involution", rec_involution)
    check("lagrangian universe counts", lagrangian_counts)
    check("psi reconstruction roundtrip", psi_roundtrip)
    check("pairing gram + multiplier identity", pairing_laws)

    payload = {
        "command": "verify-props",
        "checks": [{"name": n, "ok": ok, "error": err} for n, ok, err in checks],
    }
    ok_all = all(ok for _, ok, _ in checks)
    _emit(payload, args.json,
          [f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({err})" if err else "")
           for name, ok, err in checks])
    return EXIT_OK if ok_all else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="g2sea",
        description="Frobenius characteristic polynomials of genus-2 Jacobians "
        "over small finite fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, curve_required=True):
        if curve_required:
            p.add_argument("--curve", required=True,
                           help="curve spec p=<prime>;P=[c0,...,cd], d in {5,6}")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--json", action="store_true")
        p.add_argument("--count-guard", type=int,
                       default=genus2.COUNT_GUARD_DEFAULT,
                       help="largest field size for exhaustive counting")
        p.add_argument("--degree-guard", type=int,
                       default=frobenius.DEGREE_GUARD_DEFAULT,
                       help="largest torsion extension degree before skipping")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for per-ell work")

    pc = sub.add_parser("count", help="compute chi(A)")
    common(pc)
    mode = pc.add_mutually_exclusive_group(required=True)
    mode.add_argument("--naive", dest="mode", action="store_const", const="naive")
    mode.add_argument("--siegel", dest="mode", action="store_const", const="siegel")
    mode.add_argument("--hilbert", dest="mode", action="store_const", const="hilbert")
    pc.add_argument("--oracle", action="store_true",
                    help="use the brute-force kernel oracle")
    pc.add_argument("--modeq-dir", default=None,
                    help="directory of modular-equation data files")
    pc.add_argument("--delta", type=int, default=None,
                    help="real quadratic discriminant for --hilbert")
    pc.add_argument("--max-ell", type=int, default=40)
    pc.add_argument("--verify", action="store_true",
                    help="cross-check the final result against the naive oracle")
    pc.set_defaults(fn=cmd_count)

    pl = sub.add_parser("classify", help="per-ell Elkies/Atkin table")
    common(pl)
    pl.add_argument("--max-ell", type=int, default=30,
                    help="upper bound X for the primes considered")
    pl.add_argument("--eps", default="0.2",
                    help="proportion parameter; requires X >= (1/eps) log q")
    pl.add_argument("--rm-delta", type=int, default=None,
                    help="also report split-prime Elkies verdicts for this field")
    pl.set_defaults(fn=cmd_classify)

    pr = sub.add_parser("rm-reconstruct", help="reconstruct psi from residues")
    common(pr, curve_required=False)
    pr.add_argument("--curve", default=None,
                    help="end-to-end mode: run the Hilbert pipeline on this curve")
    pr.add_argument("--delta", type=int, required=True)
    pr.add_argument("--q", type=int, default=None)
    pr.add_argument("--residue", action="append", default=[],
                    help="r:a,b meaning psi = r mod (a + b*w); repeatable")
    pr.add_argument("--max-ell", type=int, default=60)
    pr.add_argument("--verify", action="store_true")
    pr.set_defaults(fn=cmd_rm_reconstruct)

    pt = sub.add_parser("torsion", help="torsion basis, Frobenius matrix, pairing")
    common(pt)
    pt.add_argument("--ell", type=int, required=True)
    pt.set_defaults(fn=cmd_torsion)

    pv = sub.add_parser("verify-props", help="run the embedded property checks")
    common(pv, curve_required=False)
    pv.add_argument("--quick", action="store_true")
    pv.set_defaults(fn=cmd_verify_props)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GuardExceeded, BoundNotMet, EmptyRange, InconsistentResidues) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except (InternalInconsistency, NotEigen) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except G2Error as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

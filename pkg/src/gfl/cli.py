"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 a check that the theory says must
hold did not (failed certificate, failed lemma identity).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .bspline import bspline, eval_exact
from .exact import format_rational, parse_rational, rank_exact
from .obstruction import (
    CertificateError,
    ObstructionCertificate,
    a_range,
    a_sn_closed,
    a_sn_direct,
    a_tilde_closed,
    a_tilde_direct,
    alpha_of,
    build_A,
    build_A_tilde,
    cardinality_floor_sum,
    cardinality_lattice_sums,
    certify_conj1,
    certify_conj2,
    check_family1,
    check_family2,
    i_sets,
    is_coprime_family1,
    s_sets,
    verify_certificate,
    x_sn,
    y_of,
)
from .scanner import (
    DEFAULT_CAP,
    DEFAULT_GRID,
    ScanRegion,
    records_to_csv,
    scan_region,
    sweep_hyperbola_conj1,
    sweep_hyperbola_conj2,
)

log = logging.getLogger("gfl")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONTRADICTION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# lemma report
# ---------------------------------------------------------------------------

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class LemmaReport:
    conjecture: int
    m: int
    k: int
    a: Optional[Fraction]
    b: Fraction
    checks: list[Check] = field(default_factory=list)
    s_count: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def add(self, name: str, failures: list[str], detail_ok: str = "") -> None:
        if failures:
            more = f" (+{len(failures) - 1} more)" if len(failures) > 1 else ""
            self.checks.append(Check(name, FAIL, failures[0] + more))
        else:
            self.checks.append(Check(name, PASS, detail_ok))

    def skip(self, name: str, reason: str) -> None:
        self.checks.append(Check(name, SKIP, reason))

    def to_text(self) -> str:
        head = f"conjecture {self.conjecture}: m={self.m} k={self.k}"
        if self.a is not None:
            head += f" a={format_rational(self.a)}"
        head += f" b={format_rational(self.b)}"
        lines = [head]
        width = max(len(c.name) for c in self.checks)
        for c in self.checks:
            line = f"{c.status}  {c.name.ljust(width)}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line.rstrip())
        if self.s_count is not None:
            lines.append(f"#S = {self.s_count}")
        lines.append("all checks pass" if self.ok else "some checks FAILED")
        return "\n".join(lines) + "\n"


def _family1_checks(rep: LemmaReport, m: int, k: int, a: Fraction) -> None:
    rows = range(0, 4 * m + 2)
    cols = range(1, k + 1)
    A = {(s, n): a_sn_direct(m, k, a, s, n) for s in rows for n in cols}
    coprime = is_coprime_family1(m, k)
    gcd_reason = f"gcd(2k+1, 2(2m+1)) = {gcd(2 * k + 1, 2 * (2 * m + 1))} > 1"

    if coprime:
        bad = [f"s={s} n={n} X={format_rational(x_sn(m, k, s, n))}"
               for s in range(1, 4 * m + 2) for n in range(1, 2 * k + 1)
               if not (-1 < x_sn(m, k, s, n) < 1 and x_sn(m, k, s, n) != 0)]
        rep.add("X in (-1, 1), X != 0", bad)
    else:
        rep.skip("X in (-1, 1), X != 0", gcd_reason)
    y = y_of(a, m)
    rep.add("Y in (0, 1)", [] if 0 < y < 1 else [f"Y={format_rational(y)}"])

    rep.add("rows 0 and 2m+1 vanish",
            [f"A[{s},{n}]={format_rational(A[s, n])}"
             for s in (0, 2 * m + 1) for n in cols if A[s, n] != 0])
    rep.add("reflection A[s] = -A[4m+2-s]",
            [f"s={s} n={n}" for s in range(1, 2 * m + 1) for n in cols
             if A[s, n] != -A[4 * m + 2 - s, n]])
    rep.add("rows m and m+1 agree",
            [f"n={n}" for n in cols if A[m, n] != A[m + 1, n]])
    r = rank_exact(build_A(m, k, a))
    rep.add("rank(A) <= k-1", [] if r <= k - 1 else [f"rank={r}"], f"rank={r}")

    if k % 2:
        for name in ("closed forms", "index sets I", "S-set structure", "#S at 1/alpha"):
            rep.skip(name, "odd k")
        return
    if m == 1:
        rep.skip("closed forms", "m=1 guard")
    elif not coprime:
        rep.skip("closed forms", gcd_reason)
    else:
        bad = []
        for (s, n), v in A.items():
            try:
                c = a_sn_closed(m, k, a, s, n)
            except ValueError as exc:
                bad.append(f"s={s} n={n}: {exc}")
                continue
            if c != v:
                bad.append(f"s={s} n={n}: closed {format_rational(c)} != direct {format_rational(v)}")
        rep.add("closed forms", bad, f"{len(A)} entries")

    if not coprime:
        for name in ("index sets I", "S-set structure", "#S at 1/alpha"):
            rep.skip(name, gcd_reason)
        return
    I = i_sets(m, k)
    want = (frozenset(), frozenset(), frozenset({m}), frozenset())
    rep.add("index sets I", [] if I == want else [f"got {[sorted(x) for x in I]}"])

    S = s_sets(m, k, a)
    bad = []
    if S.S1a & S.S2a or S.S3a & S.S4a or S.S & S.T:
        bad.append("sets overlap")
    if 0 <= S.V < 1 and S.T:
        bad.append(f"V={format_rational(S.V)} but S3 u S4 nonempty")
    if -1 < S.V < 0 and S.S:
        bad.append(f"V={format_rational(S.V)} but S1 u S2 nonempty")
    if len(S.S) > k - m:
        bad.append(f"#S={len(S.S)} > k-m")
    rep.add("S-set structure", bad, f"V={format_rational(S.V)} #S(a)={len(S.S)}")

    s_alpha = s_sets(m, k, 1 / alpha_of(m, k))
    enum = len(s_alpha.S)
    floor_sum = cardinality_floor_sum(m, k)
    s1, s2 = cardinality_lattice_sums(m, k)
    rep.s_count = enum
    vals = {"enumerated": enum, "floor sum": floor_sum, "lattice sums": s1 + s2, "k-m": k - m}
    bad = [] if len(set(vals.values())) == 1 else [", ".join(f"{n}={v}" for n, v in vals.items())]
    rep.add("#S at 1/alpha", bad, f"= {k - m}")


def _family2_checks(rep: LemmaReport, m: int, k: int) -> None:
    rows = range(0, 4 * m)
    cols = range(1, k + 1)
    A = {(s, n): a_tilde_direct(m, k, s, n) for s in rows for n in cols}
    rep.add("rows 0 and 2m vanish",
            [f"A[{s},{n}]={format_rational(A[s, n])}"
             for s in (0, 2 * m) for n in cols if A[s, n] != 0])
    rep.add("reflection A[s] = -A[4m-s]",
            [f"s={s} n={n}" for s in range(1, 2 * m) for n in cols
             if A[s, n] != -A[4 * m - s, n]])
    rep.add("rows s and 2m-s agree",
            [f"s={s} n={n}" for s in range(1, m) for n in cols
             if A[s, n] != A[2 * m - s, n]])
    r = rank_exact(build_A_tilde(m, k))
    rep.add("rank(A~) <= k-1", [] if r <= k - 1 else [f"rank={r}"], f"rank={r}")
    if k % 2:
        rep.skip("closed forms", "odd k")
        return
    bad = []
    for (s, n), v in A.items():
        if s in (m, 3 * m):
            continue
        c = a_tilde_closed(m, k, s, n)
        if c != v:
            bad.append(f"s={s} n={n}: closed {format_rational(c)} != direct {format_rational(v)}")
    rep.add("closed forms", bad, "rows m and 3m excluded")


def lemma_report(m: int, k: int, a=None, conjecture: int = 1) -> LemmaReport:
    """Run every structural identity for one parameter set.

    Raises ``ValueError`` for invalid parameters; failed identities are
    reported, not raised.
    """
    if conjecture == 1:
        check_family1(m, k)
        a = Fraction(1, 2 * m + 1) if a is None else Fraction(a)
        lo, hi = a_range(m, k)
        if not lo <= a <= hi:
            raise ValueError(
                f"a={format_rational(a)} outside [{format_rational(lo)}, {format_rational(hi)}]"
            )
        b = Fraction(2 * k + 1, 2 * (2 * m + 1)) / a
        rep = LemmaReport(1, m, k, a, b)
        _family1_checks(rep, m, k, a)
        cert = certify_conj1(m, k, a)
    elif conjecture == 2:
        if a is not None:
            raise ValueError("--a is fixed to 1/(2m) for conjecture 2")
        check_family2(m, k)
        rep = LemmaReport(2, m, k, Fraction(1, 2 * m), Fraction(2 * k + 1, 2))
        _family2_checks(rep, m, k)
        cert = certify_conj2(m, k)
    else:
        raise ValueError("conjecture must be 1 or 2")
    rep.add("certificate", [] if verify_certificate(cert) else ["did not verify"],
            f"rank={cert.rank} < p={cert.p}")
    return rep


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _span(text: str) -> tuple[Fraction, Fraction, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected LO:HI:STEPS, got {text!r}")
    return _rational(parts[0]), _rational(parts[1]), _positive_int(parts[2])


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gfl", description="Exact non-frame certificates for Gabor systems of the hat function.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("certify", help="exact certificate for one parameter set")
    p.add_argument("--conjecture", type=int, choices=(1, 2))
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--a", type=_rational, help="family 1 only; default 1/(2m+1)")
    p.add_argument("--verify", metavar="FILE", help="re-check a stored certificate")
    common(p)

    p = sub.add_parser("lemmas", help="check the structural identities")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--a", type=_rational)
    p.add_argument("--conjecture", type=int, choices=(1, 2), default=1)
    common(p)

    p = sub.add_parser("scan", help="numerical sweep of an (a, b) box")
    p.add_argument("--a", type=_span, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--b", type=_span, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP)
    p.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID)
    p.add_argument("--order", type=_positive_int, default=2, help="B-spline window order")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p)

    p = sub.add_parser("hyperbola", help="sweep along a hyperbola of obstructions")
    p.add_argument("--conjecture", type=int, choices=(1, 2), required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--grid", type=_positive_int, default=DEFAULT_GRID)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    common(p)

    p = sub.add_parser("eval", help="exact value of a B-spline")
    p.add_argument("--order", type=_positive_int, required=True)
    p.add_argument("--x", type=_rational, required=True)
    common(p)
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_certify(args) -> tuple[str, int]:
    if args.verify:
        try:
            with open(args.verify) as fh:
                cert = ObstructionCertificate.from_json(json.load(fh))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"cannot read certificate {args.verify}: {exc}") from None
        for key in ("conjecture", "m", "k", "a"):
            given = getattr(args, key)
            if given is not None and given != getattr(cert, key):
                raise ValueError(f"--{key} does not match the certificate")
        ok = verify_certificate(cert)
        out = {"file": args.verify, "verified": ok}
        return _json_text(out), EXIT_OK if ok else EXIT_CONTRADICTION
    if args.conjecture is None or args.m is None or args.k is None:
        raise ValueError("certify needs --conjecture, --m and --k (or --verify FILE)")
    if args.conjecture == 1:
        a = Fraction(1, 2 * args.m + 1) if args.a is None else args.a
        cert = certify_conj1(args.m, args.k, a)
    else:
        if args.a is not None:
            raise ValueError("--a is fixed to 1/(2m) for conjecture 2")
        cert = certify_conj2(args.m, args.k)
    return _json_text(cert.to_json()), EXIT_OK


def _cmd_lemmas(args) -> tuple[str, int]:
    rep = lemma_report(args.m, args.k, args.a, args.conjecture)
    return rep.to_text(), EXIT_OK if rep.ok else EXIT_CONTRADICTION


def _cmd_scan(args) -> tuple[str, int]:
    (a0, a1, na), (b0, b1, nb) = args.a, args.b
    region = ScanRegion(a0, a1, b0, b1, na, nb, args.grid, args.cap)
    records = scan_region(bspline(args.order), region, order=args.order)
    if args.format == "csv":
        return records_to_csv(records), EXIT_OK
    return _json_text([r.to_json() for r in records]), EXIT_OK


def _cert_row(c: ObstructionCertificate) -> dict:
    return {"a": format_rational(c.a), "b": format_rational(c.b), "p": c.p, "q": c.q,
            "rank": c.rank, "verified": c.verified}


def _cmd_hyperbola(args) -> tuple[str, int]:
    if args.conjecture == 1:
        certs = sweep_hyperbola_conj1(args.m, args.k, args.samples)
        rows = [_cert_row(c) for c in certs]
        if args.format == "json":
            return _json_text([c.to_json() for c in certs]), EXIT_OK
        head = ",".join(rows[0])
        body = "\n".join(",".join(str(v).lower() if isinstance(v, bool) else str(v)
                                  for v in r.values()) for r in rows)
        return f"{head}\n{body}\n", EXIT_OK
    records = sweep_hyperbola_conj2(args.m, args.k, args.samples, grid_n=args.grid)
    if args.format == "csv":
        return records_to_csv(records), EXIT_OK
    return _json_text([r.to_json() for r in records]), EXIT_OK


def _cmd_eval(args) -> tuple[str, int]:
    return format_rational(eval_exact(bspline(args.order), args.x)) + "\n", EXIT_OK


COMMANDS = {
    "certify": _cmd_certify,
    "lemmas": _cmd_lemmas,
    "scan": _cmd_scan,
    "hyperbola": _cmd_hyperbola,
    "eval": _cmd_eval,
}


def run(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    if args.verbose:
        logging.basicConfig(level=logging.INFO, stream=stderr, format="%(name)s: %(message)s")
    try:
        text, code = COMMANDS[args.command](args)
    except CertificateError as exc:
        print(f"gfl: certificate failed: {exc}", file=stderr)
        if exc.matrix is not None:
            print(json.dumps(exc.matrix.to_json()), file=stderr)
        return EXIT_CONTRADICTION
    except ValueError as exc:
        print(f"gfl: error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

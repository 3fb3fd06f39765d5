"""Command line front end: ``hypvol <subcommand> [options]``.

Exit codes: 0 success, 1 a check ran and failed, 2 certificate not found,
3 budget exceeded, 4 invalid input.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .approx import ApproxRequest, search_element, transfer_chain
from .borel import borel_bound, borel_cocycle, multi_index_set, veronese_flag
from .chains import Vol2Cocycle, boundary, dumps_chain, evaluate, format_word
from .errors import BudgetExceeded, HypvolError, InvalidParameter, NotFound
from .isometry import BoundaryPoint, ProjectiveIsometry, random_isometry, rotation
from .representations import (MU3_DEFAULT, certify_dense, certify_dense_real,
                              certify_schottky, conjugate_pair_words,
                              dense_psl2r, find_exponents, h_alpha_beta, restrict, rho_theta,
                              threshold_tau0)
from .volume import ideal_tet_volume, vol3_cocycle

EXIT_OK, EXIT_FAIL, EXIT_NOT_FOUND, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_SQRT = re.compile(r"^\s*(-?)sqrt\(\s*([0-9.eE+-]+)\s*\)\s*([+-]\s*[0-9.eE]+)?\s*$")


def real_value(text: str) -> float:
    """A float, or sqrt(x) optionally followed by +c / -c, e.g. ``sqrt(2)-1``."""
    m = _SQRT.match(text)
    if m:
        val = math.sqrt(float(m.group(2)))
        if m.group(1):
            val = -val
        if m.group(3):
            val += float(m.group(3).replace(" ", ""))
        return val
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")


def complex_value(text: str) -> complex:
    """``1+2j``, or polar ``r@phi`` with phi in radians, or ``r@pi/k``."""
    if "@" in text:
        r, phi = text.split("@", 1)
        if phi.startswith("pi/"):
            ang = math.pi / float(phi[3:])
        else:
            ang = float(phi)
        return complex(real_value(r) * math.cos(ang), real_value(r) * math.sin(ang))
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def default_seed() -> int:
    env = os.environ.get("HYPVOL_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError("HYPVOL_SEED must be an integer")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed (default: $HYPVOL_SEED or 0)")
    common.add_argument("--threads", type=int, default=1, help="cap on internal parallelism")
    common.add_argument("--mu", type=float, default=MU3_DEFAULT, help="Margulis constant")
    common.add_argument("--out", type=Path, default=None, help="write the JSON report here")

    p = _Parser(prog="hypvol", description="Volume and Borel cocycles, certificates and "
                "chain approximation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("borel-check", parents=[common], help="Borel pullback identity")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("cocycle-check", parents=[common], help="cocycle identity of vol3")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--tol", type=float, default=1e-9)

    s = sub.add_parser("surface-chain", parents=[common], help="genus-g fan chain")
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--root", type=int, default=0)
    s.add_argument("--emit", type=Path, default=None, help="write the chain in text format")

    for name in ("certify-dense", "certify-schottky"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--family", choices=["h-alpha-beta", "rho-theta", "dense-psl2r"],
                       default="h-alpha-beta")
        s.add_argument("--alpha", type=complex_value, default=None)
        s.add_argument("--beta", type=complex_value, default=None)
        s.add_argument("--log-params", action="store_true",
                       help="alpha, beta are logarithms: use exp(alpha), exp(beta)")
        s.add_argument("--r", type=float, default=1.0)
        s.add_argument("--t", type=float, default=0.1)
        s.add_argument("--theta", type=real_value, default=math.sqrt(2) - 1)
        s.add_argument("--n", type=int, default=None,
                       help="conjugate-pair exponent (searched when omitted)")
        s.add_argument("--length", type=float, default=1.0)
        s.add_argument("--q", type=real_value, default=math.sqrt(2))
        s.add_argument("--max-length", type=int, default=4)

    s = sub.add_parser("find-exponents", parents=[common], help="window exponents n_i")
    s.add_argument("--theta", type=real_value, nargs="+", required=True)
    s.add_argument("--tau0", type=float, default=None)
    s.add_argument("--r", type=float, default=None, help="use threshold_tau0(r) for tau0")
    s.add_argument("--max-n", type=int, default=10 ** 7)

    def search_flags(s):
        s.add_argument("--length", type=float, default=1.0, help="translation length of a")
        s.add_argument("--q", type=real_value, default=math.sqrt(2), help="b rotates by pi q")
        s.add_argument("--eps", type=float, default=0.5)
        s.add_argument("--metric", choices=["displacement", "operator"], default="displacement")
        s.add_argument("--max-length", type=int, default=40)
        s.add_argument("--max-nodes", type=int, default=150_000)

    s = sub.add_parser("approximate", parents=[common], help="word for a target isometry")
    search_flags(s)
    s.add_argument("--angle", type=real_value, default=None, help="target: rotation about i")
    s.add_argument("--translation", type=float, default=None,
                   help="target: translation along the imaginary axis")
    s.add_argument("--matrix", type=complex_value, nargs=4, default=None,
                   metavar=("A", "B", "C", "D"))

    s = sub.add_parser("transfer", parents=[common], help="move a surface chain to rho")
    search_flags(s)
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--emit", type=Path, default=None)

    s = sub.add_parser("seminorm-bound", parents=[common], help="seminorm lower bounds")
    search_flags(s)
    s.add_argument("--genus-min", type=int, default=2)
    s.add_argument("--genus-max", type=int, default=10)
    s.add_argument("--dense", action="store_true",
                   help="also move the chains to dense_psl2r(length, q)")
    s.add_argument("--dense-genera", type=int, nargs="*", default=[2])
    s.add_argument("--out-dir", type=Path, default=None,
                   help="directory for report.json, ratios.csv and ratios.png")
    return p


# ---------------------------------------------------------------- commands

def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "emit", "out_dir"):
            v = None if v is None else str(v)
        out[k] = v
    return out


def _random_boundary(rng) -> BoundaryPoint:
    z = complex(rng.normal(), rng.normal()) / max(1e-3, rng.uniform(0.2, 1.5))
    return BoundaryPoint.from_complex(z)


def cmd_borel_check(args, rng):
    n = args.n
    if n < 2:
        raise InvalidParameter("n must be at least 2")
    factor = n * (n * n - 1) / 6
    worst, worst_abs = 0.0, 0.0
    for _ in range(args.samples):
        pts = [_random_boundary(rng) for _ in range(4)]
        flags = [veronese_flag(n, p) for p in pts]
        b = borel_cocycle(*flags)
        v = ideal_tet_volume(*pts)
        worst = max(worst, abs(b - factor * v))
        worst_abs = max(worst_abs, abs(b))
    ok = worst < args.tol and worst_abs <= borel_bound(n) + 1e-9
    return {"check": "borel-pullback", "n": n, "samples": args.samples,
            "multi_index_count": len(multi_index_set(n)), "factor": factor,
            "max_residual": worst, "max_abs_value": worst_abs, "bound": borel_bound(n),
            "tol": args.tol, "status": "PASS" if ok else "FAIL"}, ok


def cmd_cocycle_check(args, rng):
    x = BoundaryPoint.from_complex(complex(0.3, 0.7))
    worst = 0.0
    for _ in range(args.samples):
        g = [random_isometry(rng) for _ in range(5)]
        parts = [(-1) ** i * vol3_cocycle(x, *(g[:i] + g[i + 1:])) for i in range(5)]
        worst = max(worst, abs(math.fsum(parts)))
    ok = worst < args.tol
    return {"check": "vol3-cocycle", "samples": args.samples, "basepoint": [0.3, 0.7],
            "max_coboundary": worst, "tol": args.tol, "status": "PASS" if ok else "FAIL"}, ok


def cmd_surface_chain(args, rng):
    from .pipeline import surface_chain
    fa = surface_chain(args.genus, args.root)
    value = evaluate(Vol2Cocycle(), fa.rep, fa.chain)
    dz = boundary(fa.chain)
    if args.emit is not None:
        args.emit.write_text(dumps_chain(fa.chain, fa.rank), encoding="utf-8")
    return {"genus": args.genus, "root": args.root, "rank": fa.rank, "simplices": len(fa.chain),
            "norm1": float(fa.chain.norm1()), "boundary_norm1": float(dz.norm1()),
            "boundary": [[str(c)] + [format_word(w) for w in s] for s, c in dz.items()],
            "value": value, "expected": 4 * math.pi * (args.genus - 1),
            "ratio": abs(value) / float(fa.chain.norm1())}, True


def _family_rep(args):
    """Representation selected by --family, with parameters and assumptions."""
    if args.family == "h-alpha-beta":
        if args.alpha is None or args.beta is None:
            raise InvalidParameter("--alpha and --beta are required")
        a, b = args.alpha, args.beta
        if args.log_params:
            a, b = np.exp(a), np.exp(b)
        params = {"family": "h_alpha_beta", "alpha": complex(a), "beta": complex(b)}
        return h_alpha_beta(a, b), params, []
    if args.family == "dense-psl2r":
        params = {"family": "dense_psl2r", "length": args.length, "q": args.q}
        return dense_psl2r(args.length, args.q), params, ["q is irrational (declared)"]
    rep = rho_theta(args.r, args.t, args.theta)
    n = args.n
    if n is None:
        if args.command == "certify-dense":
            n = find_exponents([args.theta], threshold_tau0(args.r, args.mu))[0]
        else:
            n = next(k for k in range(1, 10 ** 6)
                     if 0.125 < math.fmod(k * args.theta, 1.0) % 1.0 < 0.375)
    params = {"family": "rho_theta", "r": args.r, "t": args.t, "theta": args.theta, "n": n,
              "subgroup": "<a, b^n a b^-n>"}
    return restrict(rep, conjugate_pair_words(n)), params, ["theta is irrational (declared)"]


def cmd_certify_dense(args, rng):
    rep, params, assumptions = _family_rep(args)
    if args.family == "dense-psl2r":
        cert = certify_dense_real(rep, assumptions, params)
        body = cert.to_json()
        body["reverified"] = cert.verify(rep)
        return body, body["reverified"]
    cert = certify_dense(rep, mu=args.mu, max_length=args.max_length,
                         assumptions=assumptions, parameters=params)
    body = cert.to_json()
    body["reverified"] = cert.verify(rep)
    return body, body["reverified"]


def cmd_certify_schottky(args, rng):
    rep, params, _ = _family_rep(args)
    cert = certify_schottky(rep, parameters=params)
    body = cert.to_json()
    body["reverified"] = cert.verify(rep)
    return body, body["reverified"]


def cmd_find_exponents(args, rng):
    if (args.tau0 is None) == (args.r is None):
        raise InvalidParameter("give exactly one of --tau0 and --r")
    tau0 = args.tau0 if args.tau0 is not None else threshold_tau0(args.r, args.mu)
    ns = find_exponents(args.theta, tau0, args.max_n)
    rows = []
    for i, n in enumerate(ns):
        fr = [math.fmod(n * t, 1.0) % 1.0 for t in args.theta]
        rows.append({"index": i, "n": n, "fractional_parts": fr})
    return {"thetas": args.theta, "tau0": tau0, "exponents": ns, "windows": rows}, True


def _request(args, rep):
    return ApproxRequest(rep, args.eps, metric=args.metric, max_length=args.max_length,
                         max_nodes=args.max_nodes, seed=args.seed, threads=args.threads)


def cmd_approximate(args, rng):
    rep = dense_psl2r(args.length, args.q)
    given = [x is not None for x in (args.angle, args.translation, args.matrix)]
    if sum(given) != 1:
        raise InvalidParameter("give exactly one of --angle, --translation, --matrix")
    if args.angle is not None:
        target = rotation(args.angle)
    elif args.translation is not None:
        target = ProjectiveIsometry.from_matrix(np.diag([math.exp(args.translation / 2),
                                                         math.exp(-args.translation / 2)]))
    else:
        target = ProjectiveIsometry.from_matrix(np.array(args.matrix).reshape(2, 2))
    req = _request(args, rep)
    res = search_element(req, target)
    body = {"target": [[e.real, e.imag] for e in target.entries], "word": format_word(res.word),
            "length": len(res.word), "distance": res.distance, "history": res.history,
            "epsilon": args.eps}
    if not res.distance < args.eps:
        raise BudgetExceeded(f"best distance {res.distance:.3g} not below {args.eps:g}",
                             best=body)
    return body, True


def cmd_transfer(args, rng):
    from .pipeline import surface_chain
    fa = surface_chain(args.genus)
    rep = dense_psl2r(args.length, args.q)
    z_eps, report = transfer_chain(fa.rep, fa.chain, Vol2Cocycle(), rep, args.eps,
                                   _request(args, rep))
    if args.emit is not None:
        args.emit.write_text(dumps_chain(z_eps, rep.rank), encoding="utf-8")
    return report.to_json(), report.success


def cmd_seminorm_bound(args, rng):
    from .pipeline import seminorm_bound, surface_family
    from .plotting import plot_ratios
    genera = list(range(args.genus_min, args.genus_max + 1))
    if args.genus_min < 2:
        raise InvalidParameter("genus must be at least 2")
    out = {}
    fuchsian = seminorm_bound(Vol2Cocycle(), None, surface_family(genera),
                              labels=("vol2", "fuchsian_surface_rep"),
                              parameters={"genera": genera})
    out["fuchsian"] = fuchsian.to_json()
    dense = None
    if args.dense:
        rep = dense_psl2r(args.length, args.q)
        dense = seminorm_bound(Vol2Cocycle(), rep, surface_family(args.dense_genera, True),
                               epsilon=args.eps, request=_request(args, rep),
                               labels=("vol2", "dense_psl2r"),
                               parameters={"length": args.length, "q": args.q,
                                           "epsilon": args.eps,
                                           "genera": args.dense_genera})
        out["dense"] = dense.to_json()
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "ratios.csv").write_text(fuchsian.to_csv(), encoding="utf-8")
        plot_ratios(fuchsian, args.out_dir / "ratios.png")
        if dense is not None:
            (args.out_dir / "dense.csv").write_text(dense.to_csv(), encoding="utf-8")
    ok = all(r.ok for r in fuchsian.records) and (dense is None or all(r.ok for r in dense.records))
    return out, ok


COMMANDS = {
    "borel-check": cmd_borel_check,
    "cocycle-check": cmd_cocycle_check,
    "surface-chain": cmd_surface_chain,
    "certify-dense": cmd_certify_dense,
    "certify-schottky": cmd_certify_schottky,
    "find-exponents": cmd_find_exponents,
    "approximate": cmd_approximate,
    "transfer": cmd_transfer,
    "seminorm-bound": cmd_seminorm_bound,
}


def _emit(doc, args):
    text = serialize.dumps(doc)
    if args is not None and getattr(args, "out", None) is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args is not None and getattr(args, "out_dir", None) is not None:
        (args.out_dir / "report.json").write_text(text, encoding="utf-8")


def _diagnostic(kind, message, code):
    sys.stderr.write(serialize.dumps({"error": kind, "message": message, "exit_code": code}))
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is None:
            args.seed = default_seed()
        if args.threads < 1:
            raise InvalidParameter("--threads must be at least 1")
    except UsageError as exc:
        return _diagnostic("UsageError", str(exc), EXIT_INVALID)
    except InvalidParameter as exc:
        return _diagnostic("InvalidParameter", str(exc), EXIT_INVALID)
    rng = np.random.default_rng(args.seed)
    try:
        body, ok = COMMANDS[args.command](args, rng)
    except BudgetExceeded as exc:
        doc = {"schema_version": 1, "command": args.command, "config": _config(args),
               "status": "BUDGET_EXCEEDED", "message": str(exc), "best": _best_json(exc.best)}
        _emit(doc, args)
        return _diagnostic("BudgetExceeded", str(exc), EXIT_BUDGET)
    except NotFound as exc:
        doc = {"schema_version": 1, "command": args.command, "config": _config(args),
               "status": "NOT_FOUND", "message": str(exc)}
        if getattr(exc, "margin", None) is not None:
            doc["margin"] = exc.margin
        _emit(doc, args)
        return _diagnostic(type(exc).__name__, str(exc), EXIT_NOT_FOUND)
    except (HypvolError, ValueError) as exc:
        return _diagnostic(type(exc).__name__, str(exc), EXIT_INVALID)
    doc = {"schema_version": 1, "command": args.command, "config": _config(args),
           "status": "PASS" if ok else "FAIL", "result": body}
    _emit(doc, args)
    return EXIT_OK if ok else EXIT_FAIL


def _best_json(best):
    if best is None:
        return None
    if hasattr(best, "to_json"):
        return best.to_json()
    return best


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

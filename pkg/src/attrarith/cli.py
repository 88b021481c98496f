"""Command-line front end: every computation as a subcommand with JSON/CSV output.

stdout carries exactly one JSON envelope (or a CSV table under --csv);
stderr carries diagnostics.  All numeric results are serialized as decimal
strings so arbitrary-precision values survive the trip.  Exit codes:
0 success, 2 invalid input, 3 computation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath as mp

from .arith import QuadraticSurd, class_group_forms
from .attractor import ChargeData, attractor_point, entropy_invariant
from .errors import AttrarithError, ComputationFailure

_DEFAULT_PREC = 256


def _minus(s: str) -> str:
    return s.replace("-", "−")


def _surd_str(t: QuadraticSurd) -> str:
    """Render like (1 + 1·√−5)/2; rational values keep disc −1 with zero radical."""
    return (f"({_minus(str(t.num_rational))} + {_minus(str(t.num_radical))}"
            f"·√{_minus(str(t.disc))})/{t.den}")


def _dec(x, prec: int) -> str:
    """Decimal string with enough digits to reproduce x at prec bits."""
    dps = int(prec * 0.30103) + 8
    with mp.workprec(prec + 8):
        return mp.nstr(mp.mpf(x) if not isinstance(x, mp.mpf) else x, dps)


def _dec_c(z, prec: int) -> dict:
    with mp.workprec(prec + 8):
        z = mp.mpc(z)
    # attribute access extracts components without re-rounding
    return {"re": _dec(z.real, prec), "im": _dec(z.imag, prec)}


def _dec_f(v) -> str:
    return repr(float(v))


def _parse_pair(text: str, prec: int):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected RE,IM, got {text!r}")
    with mp.workprec(prec + 32):
        return mp.mpc(mp.mpf(parts[0].strip()), mp.mpf(parts[1].strip()))


def _int_csv(text: str) -> tuple:
    return tuple(int(v.strip()) for v in text.split(","))


def _envelope(command: str, inputs: dict, result: dict,
              certificates: list, prec: int) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "result": result,
        "certificates": certificates,
        "precision_bits": prec,
    }


def _charge_from_args(args) -> tuple[ChargeData, dict]:
    vector_mode = args.gram or args.p or args.q
    if vector_mode:
        if not (args.gram and args.p and args.q):
            raise ValueError("--gram, --p and --q must be given together")
        if args.p2 is not None or args.q2 is not None or args.pq is not None:
            raise ValueError("give either --p2/--q2/--pq or --gram/--p/--q, not both")
        with open(args.gram) as fh:
            gram = json.load(fh)
        p = _int_csv(args.p)
        q = _int_csv(args.q)
        c = ChargeData.from_vectors(p, q, gram)
        inputs = {"gram": args.gram, "p": args.p, "q": args.q}
    else:
        if args.p2 is None or args.q2 is None or args.pq is None:
            raise ValueError("--p2, --q2 and --pq are all required")
        c = ChargeData(args.p2, args.q2, args.pq)
        inputs = {"p2": str(args.p2), "q2": str(args.q2), "pq": str(args.pq)}
    return c, inputs


def _emit_csv(header: list, rows: list) -> None:
    print(",".join(header))
    for row in rows:
        print(",".join(str(v) for v in row))


def _cmd_attract(args, prec: int):
    c, inputs = _charge_from_args(args)
    ap = attractor_point(c)
    f = ap.form
    result = {
        "tau": _surd_str(ap.tau),
        "tau_decimal": _dec_c(ap.tau.to_mpc(prec), prec),
        "disc": str(ap.D),
        "form": {"a": str(f.a), "b": str(f.b), "c": str(f.c)},
        "class_number": str(ap.class_number),
        "entropy": _dec(entropy_invariant(c, prec), prec),
    }
    # exact recomputation from the inputs; the reduced form's own root may
    # differ from tau by a fundamental-domain translation
    quad = ap.tau * ap.tau * c.p2 - ap.tau * (2 * c.pq) + c.q2
    certs = [
        {"name": "tau_satisfies_charge_quadratic", "passed": quad == 0},
        {"name": "form_discriminant_is_4D", "passed": f.disc == 4 * ap.D},
    ]
    return _envelope("attract", inputs, result, certs, prec)


def _cmd_certify(args, prec: int):
    from .modular import certify_attractor_cm

    c, inputs = _charge_from_args(args)
    cert = certify_attractor_cm(c, prec=prec)
    result = {
        "tau": _surd_str(cert.point.tau),
        "disc": str(cert.disc),
        "field_disc": str(cert.field_disc),
        "conductor": str(cert.conductor),
        "field_label": cert.field_label,
        "class_number": str(cert.class_number),
        "j": _dec_c(cert.j, prec),
        "hcp_degree": str(cert.hcp.class_number),
        "hcp_coeffs": [str(v) for v in cert.hcp.coeffs],
    }
    certs = [{
        "name": "class_polynomial_root",
        "residual": _dec_f(cert.value),
        "error_bound": _dec_f(cert.error_bound),
        "tolerance": _dec_f(cert.tolerance),
        "passed": bool(cert.passed),
    }]
    return _envelope("certify", inputs, result, certs, prec)


def _cmd_hcp(args, prec: int):
    from .modular import hilbert_class_polynomial, load_hcp_cache, store_hcp_cache

    disc = args.disc
    coeffs = None
    if args.cache:
        cache = load_hcp_cache(args.cache)
        hit = cache.get(disc)
        if hit is not None:
            coeffs = tuple(hit)
    if coeffs is None:
        res = hilbert_class_polynomial(disc, prec=args.prec)
        coeffs = res.coeffs
        if args.cache:
            cache[disc] = coeffs
            store_hcp_cache(args.cache, cache)
    h = len(class_group_forms(disc))
    if args.csv:
        _emit_csv(["power", "coeff"], list(enumerate(coeffs)))
        return None
    inputs = {"disc": str(disc), "cache": args.cache}
    result = {
        "disc": str(disc),
        "degree": str(len(coeffs) - 1),
        "class_number": str(h),
        "coeffs": [str(v) for v in coeffs],
    }
    certs = [
        {"name": "degree_equals_class_number", "passed": len(coeffs) - 1 == h},
        {"name": "monic", "passed": coeffs[-1] == 1},
    ]
    return _envelope("hcp", inputs, result, certs, prec)


def _cmd_jval(args, prec: int):
    from .modular import j_value_with_bound

    tau = _parse_pair(args.tau, prec)
    ev = j_value_with_bound(tau, prec)
    inputs = {"tau": args.tau}
    result = {
        "j": _dec_c(ev.j, prec),
        "error_bound": _dec(ev.error_bound, 64),
        "truncation_order": str(ev.truncation_order),
        "working_prec": str(ev.working_prec),
    }
    certs = [{"name": "certified_error_bound",
              "value": _dec(ev.error_bound, 64), "passed": True}]
    return _envelope("jval", inputs, result, certs, prec)


def _cmd_weber(args, prec: int):
    from .elliptic import model_from_tau, torsion_points, weber_function

    c, inputs = _charge_from_args(args)
    inputs["n"] = str(args.n)
    ap = attractor_point(c)
    model = model_from_tau(ap.tau, prec=prec)
    pts = torsion_points(model, args.n)
    rows = []
    worst = mp.mpf(0)
    with mp.workprec(prec + 32):
        for p in pts:
            resid = abs((2 * p.y) ** 2
                        - (4 * p.x**3 + 4 * model.A * p.x + 4 * model.B))
            worst = max(worst, resid)
            rows.append((p, weber_function(model, p)))
    bound = mp.mpf(2) ** (-prec // 2 + 10)
    if args.csv:
        table = []
        for p, w in rows:
            a = int(p.lattice_coords[0] * args.n)
            b = int(p.lattice_coords[1] * args.n)
            table.append([a, b,
                          _dec(mp.re(p.x), prec), _dec(mp.im(p.x), prec),
                          _dec(mp.re(p.y), prec), _dec(mp.im(p.y), prec),
                          _dec(mp.re(w), prec), _dec(mp.im(w), prec)])
        _emit_csv(["a", "b", "x_re", "x_im", "y_re", "y_im", "weber_re", "weber_im"],
                  table)
        return None
    result = {
        "tau": _surd_str(ap.tau),
        "j": _dec_c(model.j, prec),
        "n": str(args.n),
        "points": [{
            "a": str(int(p.lattice_coords[0] * args.n)),
            "b": str(int(p.lattice_coords[1] * args.n)),
            "x": _dec_c(p.x, prec),
            "y": _dec_c(p.y, prec),
            "weber": _dec_c(w, prec),
        } for p, w in rows],
    }
    certs = [{
        "name": "wp_ode_max_residual",
        "value": _dec(worst, 64),
        "bound": _dec(bound, 64),
        "passed": bool(worst < bound),
    }]
    return _envelope("weber", inputs, result, certs, prec)


def _cmd_curve(args, prec: int):
    from .jacobian import CurveSignature, decompose_jacobian, genus

    sig = CurveSignature(args.d, args.k, args.l)
    factors = decompose_jacobian(sig)
    g = genus(sig)
    if args.csv:
        _emit_csv(["factor", "level", "dimension", "orbit_size"],
                  [[i, f.level, f.dimension, len(f.orbit)]
                   for i, f in enumerate(factors)])
        return None
    inputs = {"d": str(args.d), "k": str(args.k), "l": str(args.l)}
    recs = []
    for f in factors:
        rec = {
            "level": str(f.level),
            "dimension": str(f.dimension),
            "orbit_size": str(len(f.orbit)),
        }
        if args.orbits:
            rec["orbit"] = [[str(v) for v in idx] for idx in f.orbit]
            rec["cm_set"] = [str(a) for a in f.cm_set]
        recs.append(rec)
    result = {
        "genus": str(g),
        "num_factors": str(len(factors)),
        "factors": recs,
    }
    certs = [{"name": "dimensions_sum_to_genus",
              "passed": sum(f.dimension for f in factors) == g}]
    return _envelope("curve", inputs, result, certs, prec)


def _cmd_resolve(args, prec: int):
    from .cohomology import SingularCurveDatum, hj_expand, hj_reconstruct, resolution_contributions

    res = hj_expand(args.n, args.q)
    if args.csv:
        _emit_csv(["index", "step"], list(enumerate(res.steps)))
        return None
    inputs = {"n": str(args.n), "q": str(args.q)}
    result = {
        "n": str(args.n),
        "q": str(args.q),
        "steps": [str(b) for b in res.steps],
        "num_spheres": str(res.num_spheres),
    }
    if args.genus is not None:
        inputs["genus"] = str(args.genus)
        d2, d3 = resolution_contributions(
            [SingularCurveDatum(args.genus, args.n, args.q)])
        result["delta_h2"] = str(d2)
        result["delta_h3"] = str(d3)
    certs = [{"name": "reconstruction_round_trip",
              "passed": hj_reconstruct(res.steps) == Fraction(args.n, args.q)}]
    return _envelope("resolve", inputs, result, certs, prec)


def _cmd_fermat(args, prec: int):
    from .cohomology import fermat_hodge_numbers, fermat_primitive_dim

    dim = fermat_primitive_dim(args.d, args.dim)
    hodge = fermat_hodge_numbers(args.d, args.dim) if args.hodge else None
    if args.csv:
        if hodge is None:
            raise ValueError("--csv requires --hodge (the tabular output)")
        _emit_csv(["p", "hodge"], list(enumerate(hodge)))
        return None
    inputs = {"d": str(args.d), "dim": str(args.dim)}
    result = {
        "d": str(args.d),
        "dim": str(args.dim),
        "primitive_dimension": str(dim),
    }
    certs = []
    if hodge is not None:
        result["hodge"] = [str(v) for v in hodge]
        certs.append({"name": "hodge_sums_to_primitive",
                      "passed": sum(hodge) == dim})
    return _envelope("fermat", inputs, result, certs, prec)


def _cmd_sk_check(args, prec: int):
    from .cohomology import shioda_katsura_check

    chk = shioda_katsura_check(args.d, args.r, args.s)
    inputs = {"d": str(args.d), "r": str(args.r), "s": str(args.s)}
    result = {
        "d": str(args.d),
        "r": str(args.r),
        "s": str(args.s),
        "lhs_total": str(chk.lhs_total),
        "rhs_total": str(chk.rhs_total),
        "equal": chk.equal,
        "lhs_terms": [str(v) for v in chk.lhs_terms],
        "rhs_terms": [str(v) for v in chk.rhs_terms],
    }
    certs = [{"name": "dimension_identity", "passed": chk.equal}]
    return _envelope("sk-check", inputs, result, certs, prec)


def _cmd_flow(args, prec: int):
    from .flow import FlowConfig, export_trajectory, flow_integrate

    c, inputs = _charge_from_args(args)
    tau0 = complex(_parse_pair(args.tau0, 64))
    cfg = FlowConfig(step=args.step, tol=args.tol, max_steps=args.max_steps)
    res = flow_integrate(c, tau0, cfg)
    if args.trace:
        export_trajectory(res, args.trace)
    if args.csv:
        _emit_csv(["rho", "U", "re_tau", "im_tau", "Z2"],
                  [[f"{float(v):.17g}" for v in row] for row in res.trajectory])
        return None
    inputs.update({"tau0": args.tau0, "step": _dec_f(cfg.step),
                   "tol": _dec_f(cfg.tol), "max_steps": str(cfg.max_steps)})
    if args.trace:
        inputs["trace"] = args.trace
    end = res.final_state
    cert = res.certificate
    result = {
        "tau_end": {"re": _dec_f(end.tau.real), "im": _dec_f(end.tau.imag)},
        "z2_end": _dec_f(end.Z2),
        "rho_end": _dec_f(end.rho),
        "u_end": _dec_f(end.U),
        "steps": str(res.steps),
        "converged": res.converged,
        "tau_exact": _surd_str(cert.tau_exact),
        "entropy_exact": _dec_f(cert.entropy_exact),
    }
    certs = [
        {"name": "endpoint_vs_exact_attractor", "residual": _dec_f(cert.tau_error)},
        {"name": "entropy_vs_sqrt_disc", "residual": _dec_f(cert.entropy_error)},
        {"name": "central_charge_monotone", "passed": bool(cert.monotone),
         "max_increase": _dec_f(cert.max_z2_increase)},
        {"name": "converged", "passed": bool(res.converged)},
    ]
    return _envelope("flow", inputs, result, certs, prec)


def _add_charge_flags(sp):
    sp.add_argument("--p2", type=int, default=None, help="p.p invariant")
    sp.add_argument("--q2", type=int, default=None, help="q.q invariant")
    sp.add_argument("--pq", type=int, default=None, help="p.q invariant")
    sp.add_argument("--gram", default=None, help="JSON file with the Gram matrix")
    sp.add_argument("--p", default=None, help="comma-separated p vector")
    sp.add_argument("--q", default=None, help="comma-separated q vector")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None,
                        help="working precision in bits (default 256; env ATTRARITH_PREC)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON envelope output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV output where tabular")

    parser = argparse.ArgumentParser(
        prog="attrarith",
        description="attractor-point arithmetic: class fields, Weber values, "
                    "CM decompositions, resolutions, flows")
    sub = parser.add_subparsers(dest="cmd")

    sp = sub.add_parser("attract", parents=[common],
                        help="exact attractor point, form, class data")
    _add_charge_flags(sp)

    sp = sub.add_parser("certify", parents=[common],
                        help="CM certificate: class polynomial root residual")
    _add_charge_flags(sp)

    sp = sub.add_parser("hcp", parents=[common], help="Hilbert class polynomial")
    sp.add_argument("--disc", type=int, required=True)
    sp.add_argument("--cache", default=None, help="JSON cache file path")

    sp = sub.add_parser("jval", parents=[common], help="j(tau) with certified error bound")
    sp.add_argument("--tau", required=True, metavar="RE,IM")

    sp = sub.add_parser("weber", parents=[common],
                        help="Weber values at torsion points of the attractor curve")
    _add_charge_flags(sp)
    sp.add_argument("--n", type=int, required=True, help="torsion order")

    sp = sub.add_parser("curve", parents=[common],
                        help="CM decomposition of a Brieskorn-Pham Jacobian")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--orbits", action="store_true", help="include orbits and CM sets")

    sp = sub.add_parser("resolve", parents=[common],
                        help="Hirzebruch-Jung resolution of a cyclic singularity")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--genus", type=int, default=None,
                    help="genus of the singular curve, adds cohomology shifts")

    sp = sub.add_parser("fermat", parents=[common],
                        help="primitive cohomology of a Fermat hypersurface")
    sp.add_argument("--d", type=int, required=True, help="degree")
    sp.add_argument("--dim", type=int, required=True, help="dimension n")
    sp.add_argument("--hodge", action="store_true", help="include Hodge numbers")

    sp = sub.add_parser("sk-check", parents=[common],
                        help="dimension check of the inductive Fermat identity")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)

    sp = sub.add_parser("flow", parents=[common],
                        help="integrate the attractor flow from tau0")
    _add_charge_flags(sp)
    sp.add_argument("--tau0", required=True, metavar="RE,IM")
    sp.add_argument("--trace", default=None, help="write trajectory CSV here")
    sp.add_argument("--step", type=float, default=1e-2)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--max-steps", type=int, default=10**6, dest="max_steps")

    return parser


_HANDLERS = {
    "attract": _cmd_attract,
    "certify": _cmd_certify,
    "hcp": _cmd_hcp,
    "jval": _cmd_jval,
    "weber": _cmd_weber,
    "curve": _cmd_curve,
    "resolve": _cmd_resolve,
    "fermat": _cmd_fermat,
    "sk-check": _cmd_sk_check,
    "flow": _cmd_flow,
}

# subcommands with a tabular rendering; others reject --csv
_TABULAR = {"hcp", "weber", "curve", "resolve", "fermat", "flow"}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        prec = args.prec if args.prec is not None else int(
            os.environ.get("ATTRARITH_PREC", _DEFAULT_PREC))
        if prec < 64:
            raise ValueError(f"precision must be at least 64 bits, got {prec}")
        if args.csv and args.cmd not in _TABULAR:
            raise ValueError(f"{args.cmd} has no tabular output; use --json")
        envelope = _HANDLERS[args.cmd](args, prec)
    except ComputationFailure as exc:
        print(f"attrarith {args.cmd}: computation failed: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        return 0  # downstream consumer closed the stream
    except (AttrarithError, ValueError, OSError) as exc:
        print(f"attrarith {args.cmd}: {exc}", file=sys.stderr)
        return 2
    if envelope is not None:
        print(json.dumps(envelope, indent=2, ensure_ascii=False))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

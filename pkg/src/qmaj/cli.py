"""
Command-line interface.

Exit codes: 0 Majorized / Factors / verified, 1 NotMajorized / NoFactor /
rejected, 2 Undecided, 3 input error.  Decisions print a summary line
``VERDICT <word> margin=<float>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, Optional, Sequence

import numpy as np

from . import __version__
from .approx import (
    diamond_norm,
    min_conversion_error,
    min_post_factor_error,
)
from .channel import Channel, apply_to_factor, compose, eb_from_ensemble, validate
from .entropy import SolverError, check_density, hmin, lower_from_X, upper_from_omega
from .factorize import (
    FactorWitness,
    post_factor,
    pre_factor,
    verify_positive_witness,
    verify_separable_witness,
)
from .linalg import swap_factors, trace_norm
from .majorize import (
    DECISION_TOL,
    WITNESS_MIN_GAP,
    FamilyInstance,
    FamilyWitness,
    convert_family,
    is_majorized,
    verify_family_witness,
    witness_gap,
)

EXIT = {"Majorized": 0, "Factors": 0, "NotMajorized": 1, "NoFactor": 1, "Undecided": 2}
INPUT_ERROR = 3
CLAIM_TOL = 1e-6


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    return "%.17g" % float(x)


def _parse_num(v) -> float:
    if isinstance(v, bool):
        raise InputError("boolean where a number was expected")
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            raise InputError(f"not a number: {v!r}") from None
    raise InputError(f"unexpected entry {v!r}")


def matrix_to_json(X, kind: str = "operator", dims=None) -> Dict[str, object]:
    X = np.asarray(X, dtype=complex)
    doc: Dict[str, object] = {"kind": kind}
    if dims is not None:
        doc["dims"] = dims
    doc["data"] = [[[_num(z.real), _num(z.imag)] for z in row] for row in X]
    return doc


def matrix_from_json(doc) -> np.ndarray:
    try:
        rows = doc["data"]
    except (TypeError, KeyError):
        raise InputError("matrix object needs a 'data' field") from None
    if not isinstance(rows, list) or not rows:
        raise InputError("'data' must be a nonempty list of rows")
    n = len(rows)
    X = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f"row {i} does not have {n} entries")
        for j, z in enumerate(row):
            if isinstance(z, list) and len(z) == 2:
                X[i, j] = complex(_parse_num(z[0]), _parse_num(z[1]))
            else:
                X[i, j] = _parse_num(z)
    if not np.all(np.isfinite(X)):
        raise InputError("non-finite matrix entry")
    return X


def state_to_json(rho, dims) -> Dict[str, object]:
    return matrix_to_json(rho, "state", [int(d) for d in dims])


def channel_to_json(ch: Channel) -> Dict[str, object]:
    return matrix_to_json(ch.choi, "channel", {"d_in": ch.d_in, "d_out": ch.d_out})


def load_state(doc):
    if doc.get("kind") not in ("state", "operator"):
        raise InputError(f"expected a state, got kind {doc.get('kind')!r}")
    X = matrix_from_json(doc)
    dims = doc.get("dims", [X.shape[0]])
    if not isinstance(dims, list) or not 1 <= len(dims) <= 2:
        raise InputError("state dims must be [d] or [d_A, d_B]")
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != X.shape[0]:
        raise InputError(f"dims {dims} do not match a {X.shape[0]}x{X.shape[0]} matrix")
    return X, dims


def load_channel(doc) -> Channel:
    if doc.get("kind") != "channel":
        raise InputError(f"expected a channel, got kind {doc.get('kind')!r}")
    J = matrix_from_json(doc)
    dims = doc.get("dims")
    try:
        d_in, d_out = int(dims["d_in"]), int(dims["d_out"])
    except (TypeError, KeyError, ValueError):
        raise InputError("channel dims must be {\"d_in\": ..., \"d_out\": ...}") from None
    if d_in * d_out != J.shape[0]:
        raise InputError("channel dims do not match the Choi matrix")
    try:
        return Channel(d_in, d_out, J)
    except ValueError as err:
        raise InputError(str(err)) from None


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"malformed JSON in {path}: {err.msg} at line {err.lineno}") from None


def write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _bipartite(path: str, name: str):
    X, dims = load_state(read_json(path))
    if len(dims) != 2:
        raise InputError(f"{name} needs dims [d_A, d_B]")
    try:
        return check_density(X, dims, name), tuple(dims)
    except ValueError as err:
        raise InputError(str(err)) from None


def _ensemble_json(ch: Channel):
    povm, states = ch.ensemble
    return {"povm": [matrix_to_json(x) for x in povm],
            "states": [matrix_to_json(w) for w in states]}


def _ensemble_from_json(doc) -> Channel:
    try:
        povm = [matrix_from_json(x) for x in doc["povm"]]
        states = [matrix_from_json(w) for w in doc["states"]]
    except (TypeError, KeyError):
        raise InputError("witness needs 'povm' and 'states'") from None
    return eb_from_ensemble(povm, states)


def _base(command: str, verdict: str, margin: float) -> Dict[str, object]:
    return {"format": "qmaj-certificate", "tool_version": __version__, "command": command,
            "verdict": verdict, "margin": _num(margin)}


def _print_verdict(verdict: str, margin: float) -> None:
    print(f"VERDICT {verdict} margin={margin:.10g}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_hmin(args) -> int:
    rho, dims = _bipartite(args.state, "rho")
    res = hmin(rho, dims)
    print(f"H_min = {res.value_bits:.6f} bits")
    print(f"lambda = {res.lam:.6f}")
    if args.cert:
        doc = _base("hmin", "Computed", res.gap)
        doc.update({"value_bits": _num(res.value_bits), "lambda": _num(res.lam),
                    "gap": _num(res.gap), "omega": matrix_to_json(res.optimal_omega),
                    "dual_X": matrix_to_json(res.dual_X)})
        write_json(args.cert, doc)
    return 0


def cmd_majorize(args) -> int:
    rho, dims = _bipartite(args.rho, "rho")
    sigma, sdims = _bipartite(args.sigma, "sigma")
    if dims != sdims:
        raise InputError("rho and sigma have different dims")
    dec = is_majorized(rho, sigma, dims, tol=args.tol, factor=args.factor)
    _print_verdict(dec.verdict, dec.margin)
    if args.cert:
        doc = _base("majorize", dec.verdict, dec.margin)
        doc.update({"factor": dec.factor, "tol": _num(args.tol), "dims": list(dims),
                    "margins": _jsonable(dec.margins)})
        if dec.channel is not None:
            doc["channel"] = channel_to_json(dec.channel)
            doc["feas_residual"] = _num(dec.feas_residual)
        if dec.witness is not None:
            w = dec.witness
            doc["witness"] = {"type": "eb_channel", **_ensemble_json(w.eb_channel),
                              "hmin_rho": _num(w.hmin_rho), "hmin_sigma": _num(w.hmin_sigma),
                              "gap": _num(w.gap), "branch": w.branch,
                              "raw_dual": matrix_to_json(w.raw_dual)}
        write_json(args.cert, doc)
    return EXIT[dec.verdict]


def _load_family(path: str) -> FamilyInstance:
    doc = read_json(path)
    try:
        pairs = [(load_state(p["rho"])[0], load_state(p["sigma"])[0]) for p in doc["pairs"]]
    except (TypeError, KeyError):
        raise InputError("family file needs 'pairs': [{'rho': ..., 'sigma': ...}]") from None
    try:
        return FamilyInstance(tuple(pairs), doc.get("weights"))
    except ValueError as err:
        raise InputError(str(err)) from None


def cmd_convert_family(args) -> int:
    inst = _load_family(args.pairs)
    dec = convert_family(inst, tol=args.tol)
    _print_verdict(dec.verdict, dec.margin)
    if args.cert:
        doc = _base("convert-family", dec.verdict, dec.margin)
        doc.update({"tol": _num(args.tol), "margins": _jsonable(dec.margins)})
        if dec.channel is not None:
            doc["channel"] = channel_to_json(dec.channel)
        if isinstance(dec.witness, FamilyWitness):
            fw = dec.witness
            doc["witness"] = {"type": "family", "weights": [_num(w) for w in fw.weights],
                              "omegas": [matrix_to_json(w) for w in fw.omegas],
                              "hmin_rho": _num(fw.hmin_rho), "hmin_sigma": _num(fw.hmin_sigma),
                              "gap": _num(fw.gap)}
        write_json(args.cert, doc)
    return EXIT[dec.verdict]


def _factor_cert(name: str, dec, tol: float) -> Dict[str, object]:
    doc = _base(name, dec.verdict, dec.margin)
    doc.update({"tol": _num(tol), "margins": _jsonable(dec.margins)})
    if dec.middle is not None:
        doc["channel"] = channel_to_json(dec.middle)
        doc["residual"] = _num(dec.residual)
    fw = dec.witness
    if fw is not None:
        wit = {"type": fw.kind, "lhs": _num(fw.lhs), "rhs": _num(fw.rhs), "gap": _num(fw.gap)}
        if fw.kind == "SeparableState":
            wit["ensemble"] = [{"weight": _num(w), "omega": matrix_to_json(a),
                                "sigma": matrix_to_json(b)} for w, a, b in fw.ensemble]
        else:
            wit["x"] = matrix_to_json(fw.x)
        doc["witness"] = wit
    return doc


def cmd_factor(args, which: str) -> int:
    T = load_channel(read_json(args.T))
    S = load_channel(read_json(args.S))
    fn = post_factor if which == "post" else pre_factor
    dec = fn(T, S, tol=args.tol)
    _print_verdict(dec.verdict, dec.margin)
    if args.cert:
        write_json(args.cert, _factor_cert(f"factor-{which}", dec, args.tol))
    return EXIT[dec.verdict]


def cmd_diamond(args) -> int:
    T = load_channel(read_json(args.T))
    S = load_channel(read_json(args.S))
    if T.dims != S.dims:
        raise InputError("channels have different dimensions")
    val = diamond_norm(T.choi - S.choi, T.d_in, T.d_out)
    print(f"diamond = {val:.10g}")
    if args.cert:
        doc = _base("diamond", "Computed", val)
        doc["value"] = _num(val)
        write_json(args.cert, doc)
    return 0


def cmd_approx_convert(args) -> int:
    rho, dims = _bipartite(args.rho, "rho")
    sigma, sdims = _bipartite(args.sigma, "sigma")
    if dims != sdims:
        raise InputError("rho and sigma have different dims")
    res = min_conversion_error(rho, sigma, dims)
    print(f"delta_star = {res.delta_star:.10g}")
    print(f"achieved = {res.achieved:.10g}")
    if args.cert:
        doc = _base("approx-convert", "Computed", res.delta_star)
        doc.update({"delta_star": _num(res.delta_star), "achieved": _num(res.achieved),
                    "channel": channel_to_json(res.optimizer), "dims": list(dims)})
        write_json(args.cert, doc)
    return 0


def cmd_approx_factor(args) -> int:
    T = load_channel(read_json(args.T))
    S = load_channel(read_json(args.S))
    res = min_post_factor_error(T, S)
    print(f"delta_star = {res.delta_star:.10g}")
    print(f"achieved = {res.achieved:.10g}")
    if args.cert:
        doc = _base("approx-factor", "Computed", res.delta_star)
        doc.update({"delta_star": _num(res.delta_star), "achieved": _num(res.achieved),
                    "channel": channel_to_json(res.optimizer)})
        write_json(args.cert, doc)
    return 0


def cmd_random(args) -> int:
    from .oracle import random_cptp, random_density

    if args.what == "state":
        dims = args.dims or [args.dim]
        n = int(np.prod(dims))
        rank = n if args.rank is None else args.rank
        doc = state_to_json(random_density(n, rank, args.seed), dims)
    else:
        d_out = args.dim if args.d_out is None else args.d_out
        doc = channel_to_json(random_cptp(args.dim, d_out, args.env, args.seed))
    text = json.dumps(doc, indent=1)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_selftest(args) -> int:
    from .oracle import selftest_report

    text = selftest_report(args.n, args.seed)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    report = json.loads(text)
    ok = report["suites"][0]["failed"] == 0 and report["suites"][1]["passed"]
    return 0 if ok else 1


def cmd_docs(args) -> int:
    from .docs import build_docs

    for name in build_docs(args.output):
        print(f"wrote {args.output}/{name}")
    return 0


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


class Rejected(Exception):
    pass


def _claim(doc, key) -> float:
    try:
        return _parse_num(doc[key])
    except KeyError:
        raise InputError(f"certificate lacks {key!r}") from None


def _check_close(claimed: float, actual: float, what: str, tol: float = CLAIM_TOL) -> None:
    if not abs(claimed - actual) <= tol * max(1.0, abs(actual)):
        raise Rejected(f"{what}: certificate claims {claimed:.10g}, recomputed {actual:.10g}")


def _check_cptp(ch: Channel) -> None:
    flags = validate(ch, 1e-8)
    if not flags.cptp:
        raise Rejected("certificate channel is not CPTP")


def _verify_hmin(doc, inputs) -> float:
    rho, dims = _bipartite(inputs[0], "rho")
    omega = matrix_from_json(doc["omega"])
    X = matrix_from_json(doc["dual_X"])
    hi = upper_from_omega(rho, omega, dims)
    lo = lower_from_X(rho, X, dims)
    lam = _claim(doc, "lambda")
    if not (lo - CLAIM_TOL <= lam <= hi + CLAIM_TOL) or hi - lo > CLAIM_TOL:
        raise Rejected(f"lambda {lam:.10g} not certified by bounds [{lo:.10g}, {hi:.10g}]")
    _check_close(_claim(doc, "value_bits"), -np.log2(lam), "value_bits")
    return hi - lo


def _verify_majorize(doc, inputs) -> float:
    rho, dims = _bipartite(inputs[0], "rho")
    sigma, _ = _bipartite(inputs[1], "sigma")
    factor = doc.get("factor", "B")
    if factor == "A":
        rho, sigma = swap_factors(rho, dims), swap_factors(sigma, dims)
        dims = (dims[1], dims[0])
    verdict = doc.get("verdict")
    if verdict == "Majorized":
        ch = load_channel(doc["channel"])
        _check_cptp(ch)
        res = trace_norm(apply_to_factor(ch, rho, dims, "B") - sigma)
        if res > _claim(doc, "tol"):
            raise Rejected(f"channel misses sigma by {res:.3g} in trace norm")
        _check_close(_claim(doc, "margin"), res, "residual", 1e-9)
        return res
    if verdict == "NotMajorized":
        psi = _ensemble_from_json(doc["witness"])
        if psi.d_in != dims[0]:
            raise Rejected("witness acts on the wrong factor")
        h_r, h_s = witness_gap(psi, rho, sigma, dims)
        gap = h_r - h_s
        if gap < WITNESS_MIN_GAP:
            raise Rejected(f"recomputed witness gap {gap:.3g} below {WITNESS_MIN_GAP:g}")
        _check_close(_claim(doc["witness"], "gap"), gap, "witness gap")
        _check_close(_claim(doc, "margin"), gap, "margin")
        return gap
    raise Rejected(f"nothing to verify for verdict {verdict!r}")


def _verify_family(doc, inputs) -> float:
    inst = _load_family(inputs[0])
    verdict = doc.get("verdict")
    if verdict == "Majorized":
        ch = load_channel(doc["channel"])
        _check_cptp(ch)
        res = max(trace_norm(ch(r) - s) for r, s in inst.pairs)
        if res > _claim(doc, "tol"):
            raise Rejected(f"channel misses a pair by {res:.3g}")
        return res
    if verdict == "NotMajorized":
        w = doc["witness"]
        weights = tuple(_parse_num(v) for v in w["weights"])
        omegas = tuple(matrix_from_json(m) for m in w["omegas"])
        if len(weights) != len(inst) or len(omegas) != len(inst):
            raise Rejected("witness length does not match the family")
        if min(weights) < 0 or abs(sum(weights) - 1) > 1e-9:
            raise Rejected("weights are not a probability vector")
        for om in omegas:
            try:
                check_density(om, name="omega")
            except ValueError as err:
                raise Rejected(str(err)) from None
        fw = FamilyWitness(weights, omegas, 0.0, 0.0, None, None)
        h_r, h_s = verify_family_witness(inst, fw)
        gap = h_r - h_s
        if gap < WITNESS_MIN_GAP:
            raise Rejected(f"recomputed family gap {gap:.3g} below {WITNESS_MIN_GAP:g}")
        _check_close(_claim(w, "gap"), gap, "family gap")
        return gap
    raise Rejected(f"nothing to verify for verdict {verdict!r}")


def _verify_factor(doc, inputs, which: str) -> float:
    T = load_channel(read_json(inputs[0]))
    S = load_channel(read_json(inputs[1]))
    verdict = doc.get("verdict")
    if verdict == "Factors":
        phi = load_channel(doc["channel"])
        _check_cptp(phi)
        comp = compose(phi, T) if which == "post" else compose(T, phi)
        res = trace_norm(comp.choi - S.choi)
        if res > _claim(doc, "tol"):
            raise Rejected(f"composition misses S by {res:.3g}")
        return res
    if verdict == "NoFactor":
        w = doc["witness"]
        if which == "post":
            ens = tuple((_parse_num(e["weight"]), matrix_from_json(e["omega"]),
                         matrix_from_json(e["sigma"])) for e in w["ensemble"])
            fw = FactorWitness("SeparableState", 1.0, 1.0, ensemble=ens)
            try:
                lhs, rhs = verify_separable_witness(T, S, fw)
            except ValueError as err:
                raise Rejected(str(err)) from None
        else:
            fw = FactorWitness("PositiveOperator", 1.0, 1.0, x=matrix_from_json(w["x"]))
            try:
                lhs, rhs = verify_positive_witness(T, S, fw)
            except ValueError as err:
                raise Rejected(str(err)) from None
        gap = float(np.log2(lhs / rhs)) if lhs > 0 and rhs > 0 else -np.inf
        if gap < WITNESS_MIN_GAP:
            raise Rejected(f"recomputed gap {gap:.3g} below {WITNESS_MIN_GAP:g}")
        _check_close(_claim(w, "gap"), gap, "factor witness gap")
        return gap
    raise Rejected(f"nothing to verify for verdict {verdict!r}")


def _verify_approx_convert(doc, inputs) -> float:
    rho, dims = _bipartite(inputs[0], "rho")
    sigma, _ = _bipartite(inputs[1], "sigma")
    ch = load_channel(doc["channel"])
    _check_cptp(ch)
    err = trace_norm(apply_to_factor(ch, rho, dims, "B") - sigma)
    _check_close(_claim(doc, "achieved"), err, "achieved error")
    if err > _claim(doc, "delta_star") + CLAIM_TOL:
        raise Rejected("optimizer does not attain delta_star")
    return err


def _verify_diamond(doc, inputs) -> float:
    T = load_channel(read_json(inputs[0]))
    S = load_channel(read_json(inputs[1]))
    val = diamond_norm(T.choi - S.choi, T.d_in, T.d_out)
    _check_close(_claim(doc, "value"), val, "diamond norm")
    return val


def cmd_verify(args) -> int:
    doc = read_json(args.certificate)
    if not isinstance(doc, dict) or doc.get("format") != "qmaj-certificate":
        raise InputError("not a qmaj certificate")
    command = doc.get("command")
    need = {"hmin": 1, "majorize": 2, "convert-family": 1, "factor-post": 2,
            "factor-pre": 2, "approx-convert": 2, "diamond": 2}
    if command not in need:
        raise InputError(f"cannot verify certificates of command {command!r}")
    if len(args.inputs) != need[command]:
        raise InputError(f"{command} certificates need {need[command]} input file(s)")
    try:
        if command == "hmin":
            margin = _verify_hmin(doc, args.inputs)
        elif command == "majorize":
            margin = _verify_majorize(doc, args.inputs)
        elif command == "convert-family":
            margin = _verify_family(doc, args.inputs)
        elif command == "factor-post":
            margin = _verify_factor(doc, args.inputs, "post")
        elif command == "factor-pre":
            margin = _verify_factor(doc, args.inputs, "pre")
        elif command == "approx-convert":
            margin = _verify_approx_convert(doc, args.inputs)
        else:
            margin = _verify_diamond(doc, args.inputs)
    except (Rejected, ValueError, SolverError, KeyError) as err:
        msg = str(err).replace("\n", " ")
        print("VERDICT Rejected margin=nan")
        print(f"REJECTED {msg}", file=sys.stderr)
        return 1
    _print_verdict("Verified", margin)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _jsonable(d):
    out = {}
    for k, v in d.items():
        if isinstance(v, (float, np.floating)):
            out[k] = _num(v)
        elif isinstance(v, (int, np.integer)):
            out[k] = int(v)
        else:
            out[k] = str(v)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmaj", description=__doc__.strip().splitlines()[0])
    ap.add_argument("--version", action="version", version=f"qmaj {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hmin", help="conditional min-entropy of a bipartite state")
    p.add_argument("state")
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_hmin)

    p = sub.add_parser("majorize", help="decide sigma = (id x Phi)(rho)")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--factor", choices=["A", "B"], default="B")
    p.add_argument("--tol", type=float, default=DECISION_TOL)
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_majorize)

    p = sub.add_parser("convert-family", help="decide Phi(rho_i) = sigma_i for all i")
    p.add_argument("pairs")
    p.add_argument("--tol", type=float, default=DECISION_TOL)
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_convert_family)

    for name, which in (("factor-post", "post"), ("factor-pre", "pre")):
        p = sub.add_parser(name, help=f"{which}-processing factorization of S through T")
        p.add_argument("T")
        p.add_argument("S")
        p.add_argument("--tol", type=float, default=DECISION_TOL)
        p.add_argument("--cert")
        p.set_defaults(fn=(lambda w: (lambda a: cmd_factor(a, w)))(which))

    p = sub.add_parser("diamond", help="diamond norm of T - S")
    p.add_argument("T")
    p.add_argument("S")
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_diamond)

    p = sub.add_parser("approx-convert", help="min_Phi ||sigma - (id x Phi)(rho)||_1")
    p.add_argument("rho")
    p.add_argument("sigma")
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_approx_convert)

    p = sub.add_parser("approx-factor", help="min_Phi ||S - Phi o T||_diamond")
    p.add_argument("T")
    p.add_argument("S")
    p.add_argument("--cert")
    p.set_defaults(fn=cmd_approx_factor)

    p = sub.add_parser("verify", help="re-check a certificate against its inputs")
    p.add_argument("certificate")
    p.add_argument("inputs", nargs="*")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("random", help="generate a random state or channel")
    p.add_argument("what", choices=["state", "channel"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--dims", type=int, nargs=2)
    p.add_argument("--d-out", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--env", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_random)

    p = sub.add_parser("docs", help="render the reference documents")
    p.add_argument("-o", "--output", default="docs")
    p.set_defaults(fn=cmd_docs)

    p = sub.add_parser("selftest", help="run the oracle suites")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (InputError, ValueError) as err:
        msg = str(err).replace("\n", " ")
        print(f"ERROR input: {msg}", file=sys.stderr)
        return INPUT_ERROR
    except SolverError as err:
        print("VERDICT Undecided margin=nan")
        print(f"ERROR solver: {err}", file=sys.stderr)
        return 2


__math__: dict = {}
__plumbing__ = [
    "main", "build_parser", "matrix_to_json", "matrix_from_json", "state_to_json",
    "channel_to_json", "load_state", "load_channel", "read_json", "write_json",
]
__all__ = ["InputError"] + __plumbing__


if __name__ == "__main__":
    sys.exit(main())

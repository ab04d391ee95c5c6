"""Command-line entry point: dpwlab <command> [options].

Every report embeds the parsed configuration, its hash and the tolerances in
force; nothing time-dependent is written, so identical arguments give
identical bytes.  Exit codes: 0 ok, 1 verification failure, 2 input error.
"""

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from dpwlab import chart as C
from dpwlab import extensions as E
from dpwlab import genus2 as G2
from dpwlab import iwasawa as IW
from dpwlab import loops as L
from dpwlab import potential as PT
from dpwlab import synthesis as SY
from dpwlab import transport as T

OK, FAIL, INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _threads():
    return int(os.environ.get("DPWLAB_THREADS", os.cpu_count() or 1))


def _pmap(fn, items):
    """Order-preserving parallel map (results are reduced in input order)."""
    n = _threads()
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"not a complex number: {text!r}") from exc


def _clist(text):
    return [_complex(t) for t in text.split(",") if t.strip()]


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return str(x)
    return x


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    blob = json.dumps(_jsonable(cfg), sort_keys=True)
    return cfg, hashlib.sha256(blob.encode()).hexdigest()[:16]


def _write_json(path, payload):
    text = json.dumps(_jsonable(payload), indent=1, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _report(args, tolerances, body):
    cfg, digest = _config(args)
    return {"command": args.command, "config": cfg, "config_hash": digest,
            "tolerances": tolerances, **body}


def _out(args, suffix):
    if args.out in (None, "-"):
        return None
    base, ext = os.path.splitext(args.out)
    return base + suffix if ext in ("", ".json", ".csv", ".obj") else args.out + suffix


def _load_potential(args):
    if getattr(args, "lawson", None):
        a, g = _clist(args.lawson)
        return PT.lawson_potential(a, g, cap=args.trunc), None
    if not args.potential:
        raise InputError("--potential or --lawson is required")
    try:
        with open(args.potential) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read potential: {exc}") from exc
    raw.setdefault("entries", {})
    return PT.DPWPotential.from_dict(raw), raw


def _load_curve(args):
    if not args.curve:
        raise InputError("--curve is required")
    if args.curve == "z6m1":
        return E.lawson_curve()
    try:
        return G2.HyperellipticCurve.load(args.curve)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot read curve: {exc}") from exc


def _partition(text):
    first = tuple(int(t) for t in text.split(","))
    second = tuple(i for i in range(1, 7) if i not in first)
    try:
        return PT.SpinPartition(first, second)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _zeta_grid(args):
    return _clist(args.zeta_grid)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(args):
    pot, _ = _load_potential(args)
    x0, x1, y0, y1, n = [float(v) for v in args.grid.split(",")]
    x = np.linspace(x0, x1, int(n))
    y = np.linspace(y0, y1, int(n))
    frames = SY.extended_frame(pot, x, y, basepoint=_complex(args.basepoint), tol=args.tol,
                               trunc=args.trunc, raise_on_failure=False)
    status = OK
    if frames.failures:
        body = {"status": "iwasawa failure", "failures": frames.failures}
        _write_json(_out(args, ".json"), _report(args, {"tol": args.tol}, body))
        return FAIL
    surf = SY.sym_point_surface(frames)
    geo = SY.geometry_report(surf)
    if geo["degenerate"]:
        print("warning: surface is degenerate (constant map)", file=sys.stderr)
    geo.pop("hopf_field", None)
    obj = _out(args, ".obj")
    if obj:
        SY.write_obj(surf, obj)
        with open(_out(args, ".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "x1", "x2", "x3", "x4"])
            X = surf.r4()
            for j, yy in enumerate(y):
                for i, xx in enumerate(x):
                    w.writerow([f"{xx:.10g}", f"{yy:.10g}"] + [f"{v:.12g}" for v in X[j, i]])
    body = {"geometry": geo, "max_iwasawa_residual": float(np.max(frames.residuals)),
            "unitarity_defect": surf.unitarity_defect()}
    _write_json(_out(args, ".json"), _report(args, {"tol": args.tol}, body))
    return status


def cmd_holonomy(args):
    pot, _ = _load_potential(args)
    base = _complex(args.basepoint)
    if args.loops:
        with open(args.loops) as fh:
            loops = [T.Path.from_dict(d) for d in json.load(fh)]
    else:
        poles = pot.pole_locations()
        if not poles:
            raise InputError("potential has no poles; supply --loops")
        delta = T.default_delta(poles)
        loops = []
        for p in poles:
            gap = min([abs(p - q) for q in poles if q != p] + [1.0])
            loops.append(T.loop_around(p, max(0.3 * gap, 4 * delta), base))
    zetas = _zeta_grid(args)

    def run(zeta):
        hols = [T.holonomy(pot, lp, zeta, tol=args.tol) for lp in loops]
        return hols, T.abelianness_probe(hols)

    results = _pmap(run, zetas)
    rows = []
    worst_det = 0.0
    for zeta, (hols, probe) in zip(zetas, results):
        for k, h in enumerate(hols):
            tr = np.trace(h.value)
            worst_det = max(worst_det, h.det_defect)
            rows.append([f"{zeta.real:.12g}", f"{zeta.imag:.12g}", k,
                         f"{tr.real:.12g}", f"{tr.imag:.12g}", f"{h.det_defect:.3e}",
                         f"{probe:.12g}"])
    path = _out(args, ".csv")
    if path:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["zeta_re", "zeta_im", "loop", "trace_re", "trace_im", "det_defect",
                        "commutator_probe"])
            w.writerows(rows)
    probes = [float(p) for _, p in results]
    body = {"loops": len(loops), "commutator_probe": probes, "max_det_defect": worst_det}
    _write_json(_out(args, ".json"), _report(args, {"tol": args.tol}, body))
    return OK if worst_det < 1e-8 else FAIL


def cmd_residuals(args):
    spec = args.chart
    if spec.startswith("sphere:") or spec.startswith("clifford:"):
        kind, h = spec.split(":")
        data = C.sphere_data(float(h)) if kind == "sphere" else C.clifford_data(float(h))
    else:
        try:
            data = C.MinimalChartData.load(spec)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise InputError(f"cannot read chart data: {exc}") from exc
    zetas = _zeta_grid(args)
    rows = C.residual_rows(data, zetas)
    unit = max(C.unitarity_check(C.associated_family_form(data, z)) for z in zetas
               if abs(abs(z) - 1) < 1e-12) if any(abs(abs(z) - 1) < 1e-12 for z in zetas) else 0.0
    path = _out(args, ".csv")
    if path:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["zeta_re", "zeta_im", "r_minus", "r_zero", "r_plus", "flatness"])
            for z, *r in rows:
                w.writerow([f"{z.real:.12g}", f"{z.imag:.12g}"] + [f"{v:.6e}" for v in r])
    body = {"h": data.h, "coefficient_residuals": list(rows[0][1:4]) if rows else [],
            "flatness": [float(r[4]) for r in rows], "unitarity": unit}
    _write_json(_out(args, ".json"), _report(args, {"unitarity": 1e-12}, body))
    return OK if unit < 1e-12 else FAIL


def cmd_factorize_test(args):
    rng = np.random.default_rng(args.seed)
    loops = [IW.suite_loop(rng, args.deg) for _ in range(args.n)]
    reps = _pmap(lambda p: IW.split_report(p, tol=args.tol), loops)
    worst = max(max(r["reconstruction"], r["unitarity"]) for r in reps)
    b0 = all(r["b0_ok"] for r in reps)
    path = _out(args, ".csv")
    if path:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["loop", "reconstruction", "unitarity", "b0_ok", "blocks", "method"])
            for k, r in enumerate(reps):
                w.writerow([k, f"{r['reconstruction']:.3e}", f"{r['unitarity']:.3e}",
                            r["b0_ok"], r["blocks"], r["method"]])
    body = {"loops": args.n, "max_residual": worst, "b0_normalised": b0,
            "threshold": args.fail_above}
    _write_json(_out(args, ".json"), _report(args, {"tol": args.tol}, body))
    return OK if worst < args.fail_above and b0 else FAIL


def cmd_classify(args):
    curve = _load_curve(args)
    S = G2.spin_structure(_partition(args.partition), curve)
    ell = E.ExtensionFunctional(_clist(args.ell))
    Q = E.classify_to_quadratic(ell, S, curve, tol=args.tol)
    body = {"p": Q.p, "zero_fibers": [str(r) for r in Q.zero_fibers]}
    _write_json(args.out, _report(args, {"tol": args.tol}, body))
    return OK


def cmd_stability(args):
    curve = _load_curve(args)
    S = G2.spin_structure(_partition(args.partition), curve)
    Q = E.QuadraticDifferential(_clist(args.p))
    v = E.stability_check(Q, S, curve)
    _write_json(args.out, _report(args, {"witness": E.WITNESS_TOL, "member": E.MEMBER_TOL},
                                  v.to_dict()))
    return OK


def cmd_validate_potential(args):
    pot, raw = _load_potential(args)
    if args.partition:
        part = _partition(args.partition)
    elif pot.partition is not None:
        part = pot.partition
    else:
        raise InputError("no spin partition given")
    if args.weierstrass:
        locs = [np.inf if t.strip() == "inf" else _complex(t) for t in args.weierstrass.split(",")]
    elif raw is not None and "weierstrass" in raw:
        locs = [np.inf if w == "inf" else complex(*w) for w in raw["weierstrass"]]
    elif args.lawson:
        locs = list(PT.LAWSON_WEIERSTRASS)
    else:
        raise InputError("Weierstrass locations are required")
    rep = PT.validate_pole_structure(pot, part, locs)
    lead = PT.leading_term_check(pot)
    body = {"pole_report": rep.to_dict(),
            "leading_terms": {"passed": lead["passed"], "failures": lead["failures"],
                              "trace_residual": lead["trace_residual"]}}
    _write_json(args.out, _report(args, {"pole_tol": 1e-7}, body))
    return OK if rep.passed and lead["passed"] else FAIL


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="dpwlab")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tol=1e-10):
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path or prefix ('-' for stdout)")
        p.add_argument("--trunc", type=int, default=L.DEFAULT_TRUNCATION)

    p = sub.add_parser("synth", help="potential -> OBJ mesh and geometry report")
    common(p)
    p.add_argument("--potential")
    p.add_argument("--lawson", help="A,G constants of the Lawson family")
    p.add_argument("--grid", default="-0.5,0.5,-0.5,0.5,9", help="xmin,xmax,ymin,ymax,n")
    p.add_argument("--basepoint", default="0")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("holonomy", help="traces and commutator probes over a zeta grid")
    common(p)
    p.add_argument("--potential")
    p.add_argument("--lawson")
    p.add_argument("--loops", help="JSON list of closed paths")
    p.add_argument("--basepoint", default="0.3+0.2j")
    p.add_argument("--zeta-grid", default="1,0.7071067811865476+0.7071067811865476j,1j")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("residuals", help="flatness residuals of chart data")
    common(p)
    p.add_argument("--chart", required=True, help="JSON file, or sphere:h / clifford:h")
    p.add_argument("--zeta-grid", default="1,1j,-1,-1j")
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("factorize-test", help="Iwasawa residual suite on random loops")
    common(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--deg", type=int, default=8)
    p.add_argument("--fail-above", type=float, default=1e-9)
    p.set_defaults(func=cmd_factorize_test)

    p = sub.add_parser("classify", help="extension functional -> quadratic differential")
    common(p, 1e-8)
    p.add_argument("--curve", required=True, help="curve JSON or 'z6m1'")
    p.add_argument("--partition", required=True, help="first triple, e.g. 1,3,5")
    p.add_argument("--ell", required=True, help="three complex values")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("stability", help="stability verdict with witness")
    common(p)
    p.add_argument("--curve", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--p", required=True, help="coefficients of 1, z, z^2")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("validate-potential", help="pole-structure report")
    common(p)
    p.add_argument("--potential")
    p.add_argument("--lawson")
    p.add_argument("--partition")
    p.add_argument("--weierstrass", help="six locations, 'inf' allowed")
    p.set_defaults(func=cmd_validate_potential)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, PT.UnsupportedRepresentation,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT
    except (IW.FactorizationFailure, IW.NotPositiveDefinite, T.StiffnessFailure,
            T.PathTooClose, E.ClassificationFailure, E.UnhandledDegeneracy,
            E.QuadratureError, ArithmeticError) as exc:
        print(f"verification failure [{type(exc).__module__}.{type(exc).__name__}]: {exc}",
              file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())

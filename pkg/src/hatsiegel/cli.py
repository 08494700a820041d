"""``hatsiegel`` command line: JSON payload in, JSON document out.

Every command prints ``{"version", "command", "result", "diagnostics"}``.
Exit status is 0 on success, 1 when a check fails (a residual above its
threshold, a membership test that is false) and 2 on malformed input or a
domain error, in which case an ``{"error": {...}}`` object is printed.

Payloads come from ``--input FILE`` or, when that is absent, from stdin
(commands that need none, such as ``picard hodge``, do not read stdin).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from . import geometry as geo
from . import group as grp
from . import jsonio as jio
from . import picard as pic
from . import polarization as pol
from . import theta as th
from . import verify as ver
from .halfspace import (
    HatPoint,
    cayley_to_disk,
    cayley_to_halfspace,
    in_hat_disk,
    in_hat_h2,
    random_hat_point,
)
from .numeric import DomainError, NumericError, Tolerance, int_det, is_symplectic, pfaffian4

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Raised for malformed payloads or flags; maps to exit status 2."""


@dataclass
class Context:
    args: argparse.Namespace
    payload: dict
    tol: Tolerance
    threshold_override: float | None

    @property
    def seed(self) -> int:
        return 0 if self.args.seed is None else self.args.seed

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def threshold(self, default: float) -> float:
        return default if self.threshold_override is None else self.threshold_override

    def need(self, key: str):
        if key not in self.payload:
            raise UsageError(f"payload is missing {key!r}")
        return self.payload[key]

    def get(self, key: str, default=None):
        return self.payload.get(key, default)


def _point(ctx: Context, key: str = "point") -> HatPoint:
    """The point under ``key``, or the payload itself when it is a bare point."""
    if key in ctx.payload:
        return jio.hatpoint_from_json(ctx.payload[key])
    if key == "point" and ("tau" in ctx.payload or "matrix" in ctx.payload):
        return jio.hatpoint_from_json(ctx.payload)
    raise UsageError(f"payload is missing {key!r}")


def _spec(ctx: Context) -> pol.RiemannFormSpec:
    src = ctx.payload.get("spec", ctx.payload)
    return jio.spec_from_json(src)


def _residual_check(diag: dict, name: str, value: float, threshold: float) -> bool:
    diag.setdefault("residuals", {})[name] = value
    diag.setdefault("thresholds", {})[name] = threshold
    return bool(value <= threshold)


# -- geometry commands ---------------------------------------------------------------

def cmd_point(ctx: Context):
    if "random" in ctx.payload:
        n = int(ctx.payload["random"])
        rng = ctx.rng()
        return {"points": [random_hat_point(rng) for _ in range(n)]}, {"seed": ctx.seed}, True
    if "matrix" in ctx.payload:
        m = jio.complex_array_from_json(ctx.payload["matrix"])
        if not in_hat_h2(m, ctx.tol):
            return {"in_hat_h2": False}, {}, False
    p = _point(ctx)
    out = {"point": p, "in_hat_h2": True, "x": p.x, "y": p.y, "u": p.u, "v": p.v,
           "w1": p.plus, "w2": p.minus}
    return out, {"boundary_gap": p.y - abs(p.v)}, True


def cmd_act(ctx: Context):
    g = jio.ghat_from_json(ctx.need("element"))
    p = _point(ctx)
    image = g.act(p)
    pair_res = None
    if g.epsilon == 1:
        via = grp.act_via_split(grp.decompose_sl2_pair(g), p)
        pair_res = max(abs(via.tau - image.tau), abs(via.z - image.z))
    return {"point": image, "epsilon": g.epsilon}, {"split_agreement": pair_res}, True


def cmd_cayley(ctx: Context):
    if "disk" in ctx.payload:
        w = jio.complex_array_from_json(ctx.payload["disk"])
        if not in_hat_disk(w, ctx.tol):
            raise DomainError("W is not in the bounded model")
        out = cayley_to_halfspace(w, ctx.tol)
        back = cayley_to_disk(out, ctx.tol).w
        return {"point": out}, {"roundtrip_residual": float(np.abs(back - w).max())}, True
    p = _point(ctx)
    w = cayley_to_disk(p, ctx.tol).w
    back = cayley_to_halfspace(w, ctx.tol)
    res = float(np.abs(np.asarray(back.matrix() if isinstance(back, HatPoint) else back) - p.matrix()).max())
    return {"disk": w}, {"roundtrip_residual": res}, True


def cmd_group_check(ctx: Context):
    src = ctx.payload.get("element", ctx.payload)
    m = jio.real_matrix_from_json(src["matrix"] if isinstance(src, dict) else src, (4, 4))
    eps = grp.in_g_hat(m, ctx.tol)
    out = {"in_g_hat": eps is not None, "epsilon": eps, "symplectic": is_symplectic(m, ctx.tol),
           "stabilizer": grp.in_stabilizer(m, ctx.tol)}
    diag = {}
    if eps is not None:
        r1, r2 = grp.GHatElement(m, eps).scalar_relations()
        diag["scalar_relations"] = [r1, r2]
    return out, diag, eps is not None


def cmd_group_split(ctx: Context):
    g = jio.ghat_from_json(ctx.payload.get("element", ctx.payload))
    plus = g if g.epsilon == 1 else grp.GHatElement(grp.FLIP @ g.matrix, 1)
    pair = grp.decompose_sl2_pair(plus)
    det = max(abs(np.linalg.det(pair.m1) - 1), abs(np.linalg.det(pair.m2) - 1))
    return {"pair": pair, "epsilon": g.epsilon}, {"det_residual": det}, True


def cmd_group_fuse(ctx: Context):
    pair = jio.sl2pair_from_json(ctx.payload.get("pair", ctx.payload))
    eps = int(ctx.get("epsilon", 1))
    if eps not in (1, -1):
        raise UsageError("epsilon must be 1 or -1")
    g = grp.compose_sl2_pair(pair)
    if eps == -1:
        g = grp.GHatElement(grp.FLIP @ g.matrix, -1)
    return {"element": g}, {}, True


def cmd_group_sample(ctx: Context):
    n = int(ctx.get("count", 1))
    rng = ctx.rng()
    draw = grp.sample_g_hat_plus if ctx.get("plus_only", False) else grp.sample_g_hat
    return {"elements": [draw(rng) for _ in range(n)]}, {"seed": ctx.seed}, True


def cmd_dist(ctx: Context):
    d = geo.distance(_point(ctx, "p1"), _point(ctx, "p2"))
    out = {"rho": d.rho, "lambda": d.lam, "mu": d.mu, "A": d.A, "B": d.B,
           "log_lambda": d.log_lam, "log_mu": d.log_mu}
    return out, {}, True


def cmd_geodesic(ctx: Context):
    p1, p2 = _point(ctx, "p1"), _point(ctx, "p2")
    s0 = geo.distance(p1, p2).rho
    if "s" in ctx.payload:
        ss = [float(s) for s in ctx.payload["s"]]
    else:
        n = int(ctx.get("samples", 5))
        if n < 2:
            raise UsageError("samples must be at least 2")
        ss = [s0 * k / (n - 1) for k in range(n)]
    pts = [geo.geodesic_point(p1, p2, s) for s in ss]
    err = max(abs(geo.distance(p1, q).rho - s) for q, s in zip(pts, ss))
    diag = {}
    ok = _residual_check(diag, "arc_length_parametrisation", err, ctx.threshold(1e-6))
    return {"s0": s0, "s": ss, "points": pts}, diag, ok


def cmd_volume(ctx: Context):
    p = _point(ctx)
    out = {"density": geo.volume_density(p)}
    diag, ok = {}, True
    if "element" in ctx.payload:
        g = jio.ghat_from_json(ctx.payload["element"])
        ok = _residual_check(diag, "change_of_variables", geo.volume_change_residual(g.act, p),
                             ctx.threshold(1e-6))
    return out, diag, ok


LAPLACIAN_FUNCTIONS: dict[str, Callable[[HatPoint], float]] = {
    "probe": ver.laplacian_probe,
    "log_det_im": lambda p: float(np.log(p.y * p.y - p.v * p.v)),
    "y": lambda p: p.y,
    "x2u": lambda p: p.x * p.x * p.u + p.y * p.v * p.v,
}


def cmd_laplacian(ctx: Context):
    p = _point(ctx)
    name = ctx.get("function", "probe")
    if name not in LAPLACIAN_FUNCTIONS:
        raise UsageError(f"function must be one of {sorted(LAPLACIAN_FUNCTIONS)}")
    f = LAPLACIAN_FUNCTIONS[name]
    h = float(ctx.get("h", 1e-4))
    form = ctx.get("form", "beltrami")
    out = {"value": geo.laplacian_apply(f, p, h, form), "form": form}
    diag, ok = {"h": h}, True
    if "element" in ctx.payload:
        g = jio.ghat_from_json(ctx.payload["element"])
        ok = _residual_check(diag, "equivariance", geo.laplacian_equivariance_residual(g.act, f, p, h, form),
                             ctx.threshold(1e-4))
    return out, diag, ok


# -- bundle commands -----------------------------------------------------------------

def cmd_bundle_gram(ctx: Context):
    s, e = pol.gram_matrices(_spec(ctx))
    return {"S": s, "E": e}, {}, True


def cmd_bundle_check(ctx: Context):
    chk = pol.is_riemann_form(_spec(ctx), ctx.tol)
    out = {"riemann_form": chk.ok, "nondegenerate": chk.nondegenerate, "integral": chk.integral,
           "positive_definite": chk.positive_definite}
    return out, {"reasons": chk.reasons}, chk.ok


def _dim_spec(ctx: Context) -> pol.RiemannFormSpec:
    a = ctx.args
    if a.kind is None:
        return _spec(ctx)
    if a.imtau is None or a.imz is None:
        raise UsageError("--kind needs --imtau and --imz")
    pt = HatPoint(complex(a.retau, a.imtau), complex(a.rez, a.imz))
    return pol.RiemannFormSpec.of_kind(a.kind, pt)


def cmd_bundle_dim(ctx: Context):
    spec = _dim_spec(ctx)
    e = pol.integral_e(spec, ctx.tol)
    diag = {"pfaffian": pfaffian4(e), "det_E": int_det(e.tolist()), "kind": spec.kind.value}
    return {"dimension": pol.section_dimension(spec, ctx.tol)}, diag, True


def cmd_bundle_semichar(ctx: Context):
    spec = _spec(ctx)
    chi = pol.semicharacter_for(spec)
    bound = int(ctx.get("bound", 2))
    failures, worst = pol.semicharacter_law_box(chi, bound)
    out = {"E": chi.e_form, "base_values": chi.base_values}
    if "n" in ctx.payload:
        out["value"] = chi(jio.int_vector_from_json(ctx.payload["n"], 4))
    diag = {"box_bound": bound, "law_failures": failures, "phase_residual": worst}
    return out, diag, failures == 0


def cmd_bundle_factor(ctx: Context):
    spec = _spec(ctx)
    chi = pol.semicharacter_for(spec)
    alpha = jio.int_vector_from_json(ctx.need("alpha"), 4)
    z = jio.vector_from_json(ctx.need("z"), 2)
    value = pol.automorphic_factor(spec, chi, alpha, z)
    diag = {"seed": ctx.seed}
    res = pol.factor_cocycle_residual(spec, chi, int(ctx.get("trials", 100)), ctx.seed)
    ok = _residual_check(diag, "cocycle", res, ctx.threshold(1e-9))
    return {"value": value}, diag, ok


# -- theta commands -----------------------------------------------------------------

def cmd_theta_eval(ctx: Context):
    om = _point(ctx, "omega")
    z = jio.vector_from_json(ctx.need("z"), 2)
    radius = ctx.get("radius")
    val = th.theta_series(om, z, None if radius is None else int(radius), float(ctx.get("target", 1e-12)))
    out = {"value": val.value, "radius": val.radius, "tail_bound": val.tail_bound}
    return out, {"accurate": val.accurate}, val.accurate


def cmd_theta_qp(ctx: Context):
    om = _point(ctx, "omega")
    z = jio.vector_from_json(ctx.need("z"), 2)
    m = jio.int_vector_from_json(ctx.need("m"), 2)
    k = jio.int_vector_from_json(ctx.need("k"), 2)
    r = th.quasi_periodicity_residual(om, z, m, k)
    diag = {"radius": r.radius, "tail_bound": r.tail_bound, "conclusive": r.conclusive}
    ok = r.conclusive and _residual_check(diag, "quasi_periodicity", r.residual, ctx.threshold(1e-8))
    return {"residual": r.residual}, diag, ok


def cmd_theta_bridge(ctx: Context):
    om = _point(ctx, "omega")
    z = jio.vector_from_json(ctx.need("z"), 2)
    alpha = jio.int_vector_from_json(ctx.need("alpha"), 4)
    r = th.principal_bridge_residual(om, z, alpha)
    diag = {"conclusive": r.conclusive}
    ok = r.conclusive and _residual_check(diag, "bridge", r.residual, ctx.threshold(1e-8))
    return {"residual": r.residual, "twist": r.twist}, diag, ok


# -- picard commands ----------------------------------------------------------------

def cmd_picard_dual(ctx: Context):
    lat = pol.LatticeBasis(_point(ctx, "omega"))
    duals = pic.dual_basis(lat)
    pairing = pic.pairing_matrix(lat, duals)
    diag = {}
    ok = _residual_check(diag, "pairing", float(np.abs(pairing - np.eye(4)).max()), ctx.threshold(1e-10))
    return {"dual_basis": [d.c for d in duals]}, diag, ok


def cmd_picard_poincare(ctx: Context):
    lat = pol.LatticeBasis(_point(ctx, "omega"))
    trials = int(ctx.get("trials", 100))
    diag = {"seed": ctx.seed}
    law = pic.poincare_semicharacter_residual(lat, trials, ctx.seed)
    coc = pic.poincare_cocycle_residual(lat, trials, ctx.seed)
    rest = pic.poincare_restriction_residual(lat, trials, ctx.seed)
    ok = all([
        _residual_check(diag, "semicharacter_law", law, ctx.threshold(1e-10)),
        _residual_check(diag, "cocycle", coc, ctx.threshold(1e-9)),
        _residual_check(diag, "restriction", rest, ctx.threshold(1e-10)),
    ])
    return {"semicharacter_law": law, "cocycle": coc, "restriction": rest}, diag, ok


def cmd_picard_translate(ctx: Context):
    spec = _spec(ctx)
    a = jio.vector_from_json(ctx.need("a"), 2)
    ch = pic.translation_character(spec, a)
    return {"exponents": ch.exponents, "values": ch.values, "trivial": ch.is_trivial()}, {}, True


def cmd_picard_kernel(ctx: Context):
    spec = _spec(ctx)
    k = pic.kernel_subgroup(spec)
    pts = pic.kernel_points(spec) if k.order <= 10_000 else None
    out = {"divisors": list(k.divisors), "order": k.order, "structure": list(k.structure), "points": pts}
    return out, {"dimension": pol.section_dimension(spec)}, True


def cmd_picard_square(ctx: Context):
    spec = _spec(ctx)
    a = jio.vector_from_json(ctx.need("a"), 2)
    b = jio.vector_from_json(ctx.need("b"), 2)
    res = pic.square_theorem_residual(spec, pol.semicharacter_for(spec), a, b,
                                      int(ctx.get("trials", 100)), ctx.seed)
    diag = {"seed": ctx.seed}
    ok = _residual_check(diag, "square_theorem", res, ctx.threshold(1e-9))
    return {"residual": res}, diag, ok


def cmd_picard_curvature(ctx: Context):
    c = pic.curvature_matrix(_spec(ctx), seed=ctx.seed)
    diag = {}
    ok = _residual_check(diag, "constancy", c.constancy_residual, ctx.threshold(1e-6))
    return {"curvature": c.matrix}, diag, ok


def cmd_picard_hodge(ctx: Context):
    return pic.hodge_numbers(), {}, True


# -- verify -------------------------------------------------------------------------

def cmd_verify(ctx: Context):
    names = ctx.args.suite or ["all"]
    try:
        results = ver.run_suites(names, ctx.seed)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    out = {
        "suites": [
            {"name": r.name, "passed": r.passed,
             "checks": [{"name": c.name, "value": c.value, "threshold": c.threshold,
                         "relation": c.relation, "passed": c.passed} for c in r.checks],
             "info": r.info}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    diag = {"seed": ctx.seed, "suites_run": [r.name for r in results]}
    return out, diag, out["passed"]


# -- argument parsing ----------------------------------------------------------------

COMMANDS: dict[tuple[str, ...], tuple[Callable, bool]] = {
    # name -> (handler, reads a payload)
    ("point",): (cmd_point, True),
    ("act",): (cmd_act, True),
    ("cayley",): (cmd_cayley, True),
    ("group", "check"): (cmd_group_check, True),
    ("group", "split"): (cmd_group_split, True),
    ("group", "fuse"): (cmd_group_fuse, True),
    ("group", "sample"): (cmd_group_sample, False),
    ("dist",): (cmd_dist, True),
    ("geodesic",): (cmd_geodesic, True),
    ("volume",): (cmd_volume, True),
    ("laplacian",): (cmd_laplacian, True),
    ("bundle", "gram"): (cmd_bundle_gram, True),
    ("bundle", "check"): (cmd_bundle_check, True),
    ("bundle", "dim"): (cmd_bundle_dim, lambda a: a.kind is None),
    ("bundle", "semichar"): (cmd_bundle_semichar, True),
    ("bundle", "factor"): (cmd_bundle_factor, True),
    ("theta", "eval"): (cmd_theta_eval, True),
    ("theta", "qp"): (cmd_theta_qp, True),
    ("theta", "bridge"): (cmd_theta_bridge, True),
    ("picard", "dual"): (cmd_picard_dual, True),
    ("picard", "poincare"): (cmd_picard_poincare, True),
    ("picard", "translate"): (cmd_picard_translate, True),
    ("picard", "kernel"): (cmd_picard_kernel, True),
    ("picard", "square"): (cmd_picard_square, True),
    ("picard", "curvature"): (cmd_picard_curvature, True),
    ("picard", "hodge"): (cmd_picard_hodge, False),
    ("verify",): (cmd_verify, False),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_COMMON_FLAGS = ("input", "seed", "abs_tol", "rel_tol", "compact")


def _add_common(p: argparse.ArgumentParser, prefix: str = ""):
    """Shared flags; with a prefix they are stored under ``top_<name>``."""
    def dest(name):
        return prefix + name

    kw = {"default": None} if prefix else {"default": argparse.SUPPRESS}
    p.add_argument("--input", metavar="FILE", dest=dest("input"), **kw,
                   help="read the JSON payload from FILE instead of stdin")
    p.add_argument("--seed", type=int, dest=dest("seed"), **kw)
    p.add_argument("--abs-tol", type=float, dest=dest("abs_tol"), **kw)
    p.add_argument("--rel-tol", type=float, dest=dest("rel_tol"), **kw)
    p.add_argument("--compact", action="store_true", dest=dest("compact"),
                   default=False if prefix else argparse.SUPPRESS, help="print the output on one line")


def build_parser() -> argparse.ArgumentParser:
    """Flags may be given before or after the command; the later one wins."""
    common = _Parser(add_help=False)
    _add_common(common)
    parser = _Parser(prog="hatsiegel",
                     description="Special Siegel half-space and line bundles on its abelian surfaces.")
    _add_common(parser, "top_")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    groups: dict[str, argparse._SubParsersAction] = {}
    for path in COMMANDS:
        if len(path) == 1:
            leaf = sub.add_parser(path[0], parents=[common])
        else:
            if path[0] not in groups:
                grp_parser = sub.add_parser(path[0])
                groups[path[0]] = grp_parser.add_subparsers(dest="action", parser_class=_Parser,
                                                            metavar="ACTION")
            leaf = groups[path[0]].add_parser(path[1], parents=[common])
        leaf.set_defaults(path=path)
        if path == ("bundle", "dim"):
            leaf.add_argument("--kind", choices=["omega", "tau", "star"])
            leaf.add_argument("--imtau", type=float)
            leaf.add_argument("--imz", type=float)
            leaf.add_argument("--retau", type=float, default=0.0)
            leaf.add_argument("--rez", type=float, default=0.0)
        if path == ("verify",):
            leaf.add_argument("--suite", action="append", help="suite name or 'all' (repeatable); "
                              f"one of {', '.join(ver.SUITES)}")
    return parser


def _read_payload(args, stdin, wanted: bool) -> dict:
    if args.input is not None:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    elif wanted:
        text = stdin.read()
    else:
        return {}
    if not text.strip():
        return {}
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise UsageError("payload must be a JSON object")
    return payload


def _error(kind: str, message: str) -> dict:
    return {"version": __version__, "error": {"type": kind, "message": message}}


def run(argv: list[str] | None = None, stdin=None, stdout=None) -> int:
    """Entry point usable from tests; returns the exit status."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    compact = False
    try:
        args = build_parser().parse_args(argv)
        for name in _COMMON_FLAGS:
            if not hasattr(args, name):
                setattr(args, name, getattr(args, "top_" + name))
        compact = args.compact
        if getattr(args, "path", None) is None:
            raise UsageError("missing command")
        handler, wanted = COMMANDS[args.path]
        if callable(wanted):
            wanted = wanted(args)
        override = None
        if args.abs_tol is not None or args.rel_tol is not None:
            override = (args.abs_tol or 0.0) + (args.rel_tol or 0.0)
        tol = Tolerance(args.abs_tol if args.abs_tol is not None else Tolerance.abs_tol,
                        args.rel_tol if args.rel_tol is not None else Tolerance.rel_tol)
        ctx = Context(args, _read_payload(args, stdin, wanted), tol, override)
        result, diag, ok = handler(ctx)
        diag = {"tolerances": {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol}, **diag}
        doc = {"version": __version__, "command": " ".join(args.path), "result": result, "diagnostics": diag}
        status = EXIT_OK if ok else EXIT_CHECK
    except UsageError as exc:
        doc, status = _error("UsageError", str(exc)), EXIT_USAGE
    except (DomainError, NumericError) as exc:
        doc, status = _error(type(exc).__name__, str(exc)), EXIT_USAGE
    except OSError as exc:
        doc, status = _error("IOError", str(exc)), EXIT_USAGE
    except (KeyError, TypeError, ValueError) as exc:
        doc, status = _error("UsageError", f"invalid payload: {exc}"), EXIT_USAGE
    stdout.write(jio.dumps(doc, None if compact else 2) + "\n")
    return status


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

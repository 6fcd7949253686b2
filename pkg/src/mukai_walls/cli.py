"""Command-line interface.

Every command reads a surface configuration (JSON)::

    {"epsilon": 1, "gram": [[-2, 1], [1, 0]], "basis_names": ["sigma", "f"],
     "H": [1, 4], "beta": ["1/3", "-2/3"], "eta_direction": [1, -2]}

and prints one JSON document.  Rationals are written ``"p/q"``; floats are
refused.  Exit codes: 0 success, 1 user error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import fm_action, star_conditions, wallcross
from .central_charge import StabilityPoint
from .mukai_core import (
    BetaFrame,
    LatticeError,
    MukaiVector,
    NSClass,
    SignatureError,
    SurfaceData,
    frame_constants,
    orthogonal_basis,
)
from .plot import render_svg
from .serialize import (
    category_wall_json,
    equation_json,
    frame_json,
    ns_json,
    ns_parse,
    parse_list,
    parse_rational,
    q,
    slice_json,
    stability_wall_json,
    vector_json,
    vector_parse,
)
from .wall_engine import (
    Box,
    FixedBetaInterval,
    category_thresholds,
    category_walls_in_box,
    enumerate_R_beta,
    locate_chamber,
    make_box,
    stability_wall_candidates,
    walls_in_region,
)


class UserError(Exception):
    """Bad input that is not a lattice error (missing files, malformed JSON)."""


@dataclass(frozen=True)
class SurfaceConfig:
    surface: SurfaceData
    basis_names: tuple[str, ...]
    beta: NSClass
    eta_direction: NSClass

    def frame(self, beta: Optional[NSClass] = None) -> BetaFrame:
        return frame_constants(self.surface, self.beta if beta is None else beta)


def _int_matrix(rows) -> list[list[int]]:
    out = []
    for row in rows:
        vals = [parse_rational(x) for x in row]
        if any(v.denominator != 1 for v in vals):
            raise LatticeError("gram entries must be integers")
        out.append([int(v) for v in vals])
    return out


def load_config(data: dict) -> SurfaceConfig:
    for key in ("epsilon", "gram", "H"):
        if key not in data:
            raise UserError(f"config lacks {key!r}")
    epsilon = parse_rational(data["epsilon"])
    if epsilon not in (0, 1):
        raise LatticeError("epsilon must be 0 or 1")
    gram = _int_matrix(data["gram"])
    H = ns_parse(data["H"])
    surface = SurfaceData(int(epsilon), gram, H)
    names = tuple(data.get("basis_names") or [f"e{i}" for i in range(surface.rho)])
    if len(names) != surface.rho:
        raise UserError("basis_names has the wrong length")
    beta = ns_parse(data.get("beta") or [0] * surface.rho)
    if "eta_direction" in data and data["eta_direction"] is not None:
        direction = ns_parse(data["eta_direction"])
        if surface.degree(direction) != 0 or direction.is_zero():
            raise LatticeError("eta_direction must be a nonzero class orthogonal to H")
    else:
        basis = orthogonal_basis(surface)
        if not basis:
            direction = NSClass.zero(surface.rho)
        else:
            direction = basis[0]
    return SurfaceConfig(surface, names, beta, direction)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UserError(f"{path} is not valid JSON: {exc.msg}") from exc


def _ranges(text: str) -> list[tuple[Fraction, Fraction]]:
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise UserError(f"range {part!r} must be lo:hi")
        out.append((parse_rational(lo), parse_rational(hi)))
    return out


def _region(cfg: SurfaceConfig, frame: BetaFrame, args) -> Box:
    if args.s_range is None:
        raise UserError("--s-range lo:hi is required")
    (s_lo, s_hi), = _ranges(args.s_range)
    if getattr(args, "fixed_eta", None):
        return FixedBetaInterval(ns_parse(parse_list(args.fixed_eta)), s_lo, s_hi)
    if args.box is None:
        raise UserError("give --box or --fixed-eta")
    return make_box(cfg.surface, _ranges(args.box), (s_lo, s_hi))


def _point(frame: BetaFrame, eta_text: Optional[str], s_text: str) -> StabilityPoint:
    eta = ns_parse(parse_list(eta_text)) if eta_text else frame.eta_beta
    return StabilityPoint(frame, eta, parse_rational(s_text))


def _slice(cfg: SurfaceConfig, eq) -> dict:
    return slice_json(eq, cfg.surface, NSClass.zero(cfg.surface.rho), cfg.eta_direction)


# --- commands -------------------------------------------------------------------

def cmd_surface_validate(cfg: SurfaceConfig, args) -> dict:
    s = cfg.surface
    out = {"valid": True, "frame": frame_json(cfg.frame()), "basis_names": list(cfg.basis_names),
           "H_perp_basis": [ns_json(e) for e in orthogonal_basis(s)]}
    out["eta_direction"] = ns_json(cfg.eta_direction)
    return out


def cmd_walls_categories(cfg: SurfaceConfig, args) -> dict:
    beta = ns_parse(parse_list(args.beta)) if args.beta else None
    frame = cfg.frame(beta)
    if args.box is None and args.s_range is None:
        walls = enumerate_R_beta(frame)
        return {"beta": ns_json(frame.beta), "walls": [dict(category_wall_json(w), slice=_slice(cfg, w.equation))
                                                       for w in walls],
                "thresholds_half_s": [q(t) for t in category_thresholds(frame)]}
    region = _region(cfg, frame, args)
    walls = category_walls_in_box(cfg.surface, frame.b, region)
    return {"b": q(frame.b), "walls": [dict(category_wall_json(w), slice=_slice(cfg, w.equation)) for w in walls]}


def cmd_walls_stability(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    v = vector_parse(parse_list(args.v))
    walls = stability_wall_candidates(v, frame, _region(cfg, frame, args))
    return {"v": vector_json(v), "walls": [dict(stability_wall_json(w), slice=_slice(cfg, w.equation))
                                           for w in walls]}


def cmd_chamber_locate(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    v = vector_parse(parse_list(args.v)) if args.v else None
    p = _point(frame, args.eta, args.s)
    region = _region(cfg, frame, args)
    sig = locate_chamber(v, p, frame, region)
    return {"status": "boundary" if sig.boundary else "interior",
            "walls_through": [list(map(str, key[1])) + [key[0]] for key in sig.walls_through()],
            "signature": [{"wall": key[0], "class": [q(c) for c in key[1]], "sign": sign}
                          for key, sign in sig.entries]}


def _load_iso(cfg: SurfaceConfig, path: str) -> fm_action.MukaiIsometry:
    data = _read_json(path)
    target = load_config(data["target"]).surface if data.get("target") else None
    return fm_action.fm_build(int(parse_rational(data["r0"])), ns_parse(data["beta"]), ns_parse(data["beta_prime"]),
                              [[parse_rational(x) for x in row] for row in data["hat"]], cfg.surface, target,
                              bool(data.get("omega_hat_nef", False)))


def cmd_fm_apply(cfg: SurfaceConfig, args) -> dict:
    iso = _load_iso(cfg, args.iso)
    v = vector_parse(parse_list(args.v))
    return {"v": vector_json(v), "image": vector_json(iso.apply(v)),
            "shifted_image": vector_json(fm_action.fm_image_shift(iso, v))}


def cmd_fm_param(cfg: SurfaceConfig, args) -> dict:
    iso = _load_iso(cfg, args.iso)
    p = _point(cfg.frame(iso.beta), args.eta, args.s)
    image = fm_action.param_transform(iso, p)
    lhs, rhs = fm_action.param_invariant(iso, p)
    return {"eta": ns_json(image.eta), "b": q(image.frame.b), "s": q(image.s), "invariant": [q(lhs), q(rhs)]}


def _star_json(rep: star_conditions.StarReport) -> dict:
    return {"condition": rep.condition, "holds": rep.holds,
            "threshold_s": None if rep.threshold_s is None else q(rep.threshold_s), "note": rep.note,
            "witnesses": [{"r1": w.r1, "d1": q(w.d1), "a1": q(w.a1), "neg_D1_sq_max": q(w.neg_D1_sq_max)}
                          for w in rep.witnesses]}


def cmd_star_check(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    v = vector_parse(parse_list(args.v))
    s = parse_rational(args.s)
    checks = {"1": star_conditions.check_star1, "2": star_conditions.check_star2, "3": star_conditions.check_star3}
    if args.which == "all":
        rep = star_conditions.gieseker_report(v, frame, s)
        return {"report": rep.lines, "checks": [_star_json(r) for r in (rep.star1, rep.star2, rep.star3) if r]}
    return _star_json(checks[args.which](v, frame, s))


def _null_classes(text: Optional[str]) -> list[MukaiVector]:
    if not text:
        return []
    return [vector_parse(parse_list(part)) for part in text.split(";")]


def _decomp_json(d: wallcross.Decomposition, surface: SurfaceData) -> dict:
    return {"parts": [vector_json(x) for x in d.parts], "exponent": d.exponent(surface),
            "s_equivalent": d.s_equivalent}


def cmd_cross_decompose(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    v = vector_parse(parse_list(args.v))
    p = _point(frame, args.eta, args.s)
    nulls = _null_classes(args.null)
    decs = wallcross.decompositions_on_wall(v, p, frame, args.side, null_classes=nulls)
    return {"v": vector_json(v), "side": args.side, "decompositions": [_decomp_json(d, cfg.surface) for d in decs]}


def _oracle(source: str):
    if source == "symbolic":
        return wallcross.SymbolicOracle()
    return wallcross.TableOracle.from_json(_read_json(source))


def _value_json(x) -> object:
    if isinstance(x, wallcross.LaurentPolyQ):
        return {"poly": x.to_json(), "text": str(x)}
    return {"symbolic": str(x)}


def cmd_cross_count(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    v = vector_parse(parse_list(args.v))
    p = _point(frame, args.eta, args.s)
    nulls = _null_classes(args.null)
    oracle = _oracle(args.oracle)
    decs = wallcross.decompositions_on_wall(v, p, frame, args.side, null_classes=nulls)
    out = {"v": vector_json(v), "side": args.side,
           "wall_value": _value_json(wallcross.wall_value(v, oracle, p, args.side, decs, nulls))}
    if args.side == wallcross.MINUS:
        out["plus_count"] = _value_json(wallcross.crossing_solve(v, oracle, p, null_classes=nulls))
    return out


def cmd_plot_walls(cfg: SurfaceConfig, args) -> dict:
    frame = cfg.frame()
    (x_lo, x_hi), = _ranges(args.slice)
    t_max = parse_rational(args.t_max)
    if cfg.eta_direction.is_zero():
        raise UserError("plotting needs a nonzero eta_direction (Picard rank >= 2)")
    # walls accumulate as s -> 0, so the default strip starts at t = t_max / 4
    s_max = t_max * t_max * cfg.surface.H_sq
    s_min = s_max / 16 if args.s_min is None else parse_rational(args.s_min)
    box = make_box(cfg.surface, [(x_lo, x_hi)], (s_min, s_max), directions=[cfg.eta_direction])
    v = vector_parse(parse_list(args.v)) if args.v else None
    ws = walls_in_region(v, frame, box)
    walls = [("category", str(w.u), w.equation) for w in ws.category]
    walls += [("stability", str(w.v1), w.equation) for w in ws.stability]
    svg = render_svg(walls, cfg.surface, NSClass.zero(cfg.surface.rho), cfg.eta_direction, (x_lo, x_hi), t_max)
    Path(args.out).write_text(svg)
    return {"out": args.out, "walls": [{"type": k, "label": lab, "equation": equation_json(eq)}
                                       for k, lab, eq in walls]}


COMMANDS = {
    ("surface", "validate"): cmd_surface_validate,
    ("walls", "categories"): cmd_walls_categories,
    ("walls", "stability"): cmd_walls_stability,
    ("chamber", "locate"): cmd_chamber_locate,
    ("fm", "apply"): cmd_fm_apply,
    ("fm", "param"): cmd_fm_param,
    ("star", "check"): cmd_star_check,
    ("cross", "decompose"): cmd_cross_decompose,
    ("cross", "count"): cmd_cross_count,
    ("plot", "walls"): cmd_plot_walls,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mukai-walls", description=__doc__.splitlines()[0])
    parser.add_argument("--config", required=True, help="surface configuration JSON")
    groups = parser.add_subparsers(dest="group", required=True)

    def region_flags(p):
        p.add_argument("--box", help="coordinate ranges along a basis of H^perp, e.g. -1:1")
        p.add_argument("--fixed-eta", help="use the s-interval at this eta instead of a box")
        p.add_argument("--s-range", help="range of s = (omega^2), e.g. 1/10:4")

    sub = groups.add_parser("surface").add_subparsers(dest="action", required=True)
    sub.add_parser("validate")

    sub = groups.add_parser("walls").add_subparsers(dest="action", required=True)
    p = sub.add_parser("categories")
    p.add_argument("--beta")
    region_flags(p)
    p = sub.add_parser("stability")
    p.add_argument("--v", required=True, help="r,c1...,s")
    region_flags(p)

    sub = groups.add_parser("chamber").add_subparsers(dest="action", required=True)
    p = sub.add_parser("locate")
    p.add_argument("--v")
    p.add_argument("--eta")
    p.add_argument("--s", required=True)
    region_flags(p)

    sub = groups.add_parser("fm").add_subparsers(dest="action", required=True)
    p = sub.add_parser("apply")
    p.add_argument("--iso", required=True)
    p.add_argument("--v", required=True)
    p = sub.add_parser("param")
    p.add_argument("--iso", required=True)
    p.add_argument("--eta")
    p.add_argument("--s", required=True)

    sub = groups.add_parser("star").add_subparsers(dest="action", required=True)
    p = sub.add_parser("check")
    p.add_argument("--v", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--which", choices=["1", "2", "3", "all"], default="all")

    sub = groups.add_parser("cross").add_subparsers(dest="action", required=True)
    for name in ("decompose", "count"):
        p = sub.add_parser(name)
        p.add_argument("--v", required=True)
        p.add_argument("--eta")
        p.add_argument("--s", required=True)
        p.add_argument("--side", choices=[wallcross.MINUS, wallcross.PLUS], default=wallcross.MINUS)
        p.add_argument("--null", help="classes with Z = 0 at the point, separated by ';'")
        if name == "count":
            p.add_argument("--oracle", required=True, help="oracle JSON file or 'symbolic'")

    sub = groups.add_parser("plot").add_subparsers(dest="action", required=True)
    p = sub.add_parser("walls")
    p.add_argument("--v")
    p.add_argument("--slice", required=True, help="x range along eta_direction, e.g. -1/2:3/2")
    p.add_argument("--t-max", default="1")
    p.add_argument("--s-min", help="lower end of the s-range searched; default (t_max/4)^2 (H^2)")
    p.add_argument("--out", required=True)
    return parser


def _error(kind: str, message: str, code: int) -> tuple[int, str]:
    return code, json.dumps({"error": kind, "message": message})


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Execute a command; returns ``(exit code, JSON text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return _error("usage", "invalid command line", 1 if exc.code else 0)
    try:
        cfg = load_config(_read_json(args.config))
        result = COMMANDS[(args.group, args.action)](cfg, args)
    except SignatureError as exc:
        return _error("signature", str(exc), 1)
    except (LatticeError, UserError, KeyError, TypeError) as exc:
        return _error("input", str(exc), 1)
    except (AssertionError, ArithmeticError) as exc:
        return _error("internal", str(exc) or type(exc).__name__, 2)
    return 0, json.dumps(result, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""JSON forms of lattice objects and walls; every rational is a ``"p/q"`` string."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional, Sequence

from .mukai_core import BetaFrame, LatticeError, MukaiVector, NSClass, SurfaceData
from .wall_engine import CategoryWall, HalfSphere, Hyperplane, StabilityWall, WallEquation


def parse_rational(x: Any) -> Fraction:
    """An int or a string ``"p"``/``"p/q"``; floats and decimal strings are refused."""
    if isinstance(x, bool):
        raise LatticeError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if any(ch in text for ch in ".eE") or not text:
            raise LatticeError(f"rationals must be written p/q: {x!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise LatticeError(f"not a rational: {x!r}") from exc
    raise LatticeError(f"not a rational: {x!r}")


def parse_list(text: str) -> list[Fraction]:
    """Comma-separated rationals, as given on the command line."""
    return [parse_rational(t) for t in text.split(",")]


def q(x: Fraction) -> str:
    return str(Fraction(x))


def ns_json(x: NSClass) -> list[str]:
    return [q(c) for c in x]


def ns_parse(data: Sequence) -> NSClass:
    return NSClass(parse_rational(c) for c in data)


def vector_json(v: MukaiVector) -> list[str]:
    return [q(c) for c in v.coords()]


def vector_parse(data: Sequence) -> MukaiVector:
    return MukaiVector.from_coords(parse_rational(c) for c in data)


def equation_json(eq: WallEquation) -> dict:
    return {"P": q(eq.P), "w": ns_json(eq.w), "A": q(eq.A)}


def equation_parse(data: dict) -> WallEquation:
    return WallEquation(parse_rational(data["P"]), ns_parse(data["w"]), parse_rational(data["A"]))


def geometry_json(g) -> Optional[dict]:
    if g is None:
        return None
    if isinstance(g, HalfSphere):
        return {"kind": "half_sphere", "center": ns_json(g.center), "radius_sq": q(g.radius_sq)}
    return {"kind": "hyperplane", "normal": ns_json(g.normal), "offset": q(g.offset)}


def geometry_parse(data: Optional[dict]):
    if data is None:
        return None
    if data["kind"] == "half_sphere":
        return HalfSphere(ns_parse(data["center"]), parse_rational(data["radius_sq"]))
    return Hyperplane(ns_parse(data["normal"]), parse_rational(data["offset"]))


def slice_json(eq: WallEquation, surface: SurfaceData, origin: NSClass, direction: NSClass) -> dict:
    """The wall on the plane ``eta = origin + x direction``, ``t^2 = s/(H^2)``.

    For ``P != 0``: ``t^2 = c0 + c1 x + c2 x^2``; when ``c2 != 0`` the center
    and the squared half-axes are also given (a circle when ``c2 = -1``).
    For ``P = 0``: the vertical line ``x = x0`` if the wall meets the plane.
    """
    h2 = surface.H_sq
    if eq.P == 0:
        k = surface.form(direction, eq.w)
        rest = eq.A - surface.form(origin, eq.w)
        if k == 0:
            return {"kind": "none" if rest else "whole_plane"}
        return {"kind": "line", "x": q(rest / k)}
    geom = eq.geometry(surface)
    off = origin - geom.center
    c0 = (geom.radius_sq + surface.square(off)) / h2
    c1 = 2 * surface.form(direction, off) / h2
    c2 = surface.square(direction) / h2
    out = {"kind": "conic", "c0": q(c0), "c1": q(c1), "c2": q(c2)}
    if c2 != 0:
        x0 = -c1 / (2 * c2)
        t_sq = c0 - c1 * c1 / (4 * c2)
        out.update(center_x=q(x0), t_radius_sq=q(t_sq), x_radius_sq=q(t_sq / -c2))
    return out


def category_wall_json(w: CategoryWall) -> dict:
    return {"type": "category", "u": vector_json(w.u), "b": q(w.b), "equation": equation_json(w.equation),
            "geometry": geometry_json(w.geometry)}


def category_wall_parse(data: dict) -> CategoryWall:
    return CategoryWall(vector_parse(data["u"]), parse_rational(data["b"]), equation_parse(data["equation"]),
                        geometry_parse(data["geometry"]))


def stability_wall_json(w: StabilityWall) -> dict:
    return {"type": "stability", "v": vector_json(w.v), "v1": vector_json(w.v1),
            "members": [vector_json(m) for m in w.members], "equation": equation_json(w.equation),
            "geometry": geometry_json(w.geometry)}


def stability_wall_parse(data: dict) -> StabilityWall:
    return StabilityWall(vector_parse(data["v"]), vector_parse(data["v1"]),
                         tuple(vector_parse(m) for m in data["members"]), equation_parse(data["equation"]),
                         geometry_parse(data["geometry"]))


def frame_json(frame: BetaFrame) -> dict:
    s = frame.surface
    return {"epsilon": s.epsilon, "rho": s.rho, "H_sq": q(s.H_sq), "beta": ns_json(frame.beta), "b": q(frame.b),
            "eta_beta": ns_json(frame.eta_beta), "r0": frame.r0, "b0": frame.b0, "d_min": q(frame.d_min),
            "delta": q(frame.delta)}

"""JSON design files.

Rationals are written as ``{"num", "den", "decimal"}``; only num/den are
read back, the decimal is there for humans. Loading rebuilds the design
from its integers and checks the stored chain and breakpoints against it.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .exceptions import DomainError
from .flat import ModuliSet
from .layered import LayeredDesign, layered_from_pair

FORMAT = "rcrt-design/1"

__all__ = ["FORMAT", "rational_to_json", "rational_from_json", "design_to_dict", "design_from_dict", "dumps", "loads", "save", "load"]


def rational_to_json(value, precision: int = 12) -> dict:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator, "decimal": f"{float(value):.{precision}g}"}


def rational_from_json(obj) -> Fraction:
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    try:
        num, den = obj["num"], obj["den"]
    except (TypeError, KeyError) as exc:
        raise DomainError(f"not a rational: {obj!r}") from exc
    if not isinstance(num, int) or not isinstance(den, int) or den <= 0:
        raise DomainError(f"bad rational fields: {obj!r}")
    return Fraction(num, den)


def design_to_dict(design, precision: int = 12) -> dict:
    rat = lambda v: rational_to_json(v, precision)  # noqa: E731
    if isinstance(design, LayeredDesign):
        return {
            "format": FORMAT,
            "kind": "layered",
            "gammas": list(design.gammas),
            "m": rat(design.m),
            "K": design.K,
            "seed": None if design.d is None else {"d": design.d, "zeta": design.zeta},
            "method": design.method,
            "chain": list(design.sigma),
            "breakpoints": [rat(p) for p in design.breakpoints],
            "tolerances": [rat(t) for t in design.tolerances],
        }
    if isinstance(design, ModuliSet):
        return {
            "format": FORMAT,
            "kind": "flat",
            "gammas": list(design.gammas),
            "m": rat(design.m),
            "case": design.case,
            "range": rat(design.full_range),
            "tolerance": rat(design.full_tolerance),
        }
    raise TypeError(f"cannot serialise {type(design).__name__}")


def design_from_dict(obj: dict):
    if not isinstance(obj, dict) or obj.get("format") != FORMAT:
        raise DomainError(f"expected a {FORMAT} document")
    try:
        gammas = [int(g) for g in obj["gammas"]]
        m = rational_from_json(obj["m"])
        kind = obj["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed design file: {exc}") from exc
    if kind == "flat":
        return ModuliSet(tuple(gammas), m, obj.get("case"))
    if kind != "layered":
        raise DomainError(f"unknown design kind {kind!r}")
    if len(gammas) != 2:
        raise DomainError("layered designs have exactly two moduli")
    seed = obj.get("seed") or {}
    design = layered_from_pair(
        gammas[0], gammas[1], m, d=seed.get("d"), zeta=seed.get("zeta"), method=obj.get("method", "pair")
    )
    if "chain" in obj and tuple(obj["chain"]) != design.sigma:
        raise DomainError(f"stored chain {obj['chain']} does not match {design.sigma}")
    if "breakpoints" in obj:
        stored = tuple(rational_from_json(p) for p in obj["breakpoints"])
        if stored != design.breakpoints:
            raise DomainError("stored breakpoints do not match the moduli")
    return design


def dumps(design, precision: int = 12) -> str:
    return json.dumps(design_to_dict(design, precision), indent=2)


def loads(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from exc
    return design_from_dict(obj)


def save(design, path, precision: int = 12):
    with open(path, "w") as fh:
        fh.write(dumps(design, precision) + "\n")


def load(path):
    with open(path) as fh:
        return loads(fh.read())

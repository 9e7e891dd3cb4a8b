"""Declarative configuration for ``coindex verify`` (JSON, unknown keys rejected)."""

from __future__ import annotations

import json
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .coeffs import GaussRat, from_parts, parse_gauss
from .series import MapJet, MultiSeries, RationalMap


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Coefficient(_Strict):
    num_re: str = "0"
    den_re: str = "1"
    num_im: str = "0"
    den_im: str = "1"

    @field_validator("num_re", "den_re", "num_im", "den_im")
    @classmethod
    def _integer_string(cls, v: str) -> str:
        try:
            int(v)
        except ValueError:
            raise ValueError(f"{v!r} is not a decimal integer string") from None
        return v

    @field_validator("den_re", "den_im")
    @classmethod
    def _nonzero(cls, v: str) -> str:
        if int(v) == 0:
            raise ValueError("zero denominator")
        return v

    def value(self) -> GaussRat:
        return from_parts(self.num_re, self.den_re, self.num_im, self.den_im)


# A coefficient may also be written as a string such as "1/2" or "1/3+2/1i".
Coeff = Union[Coefficient, str]


def coeff_value(c) -> GaussRat:
    if isinstance(c, Coefficient):
        return c.value()
    try:
        return parse_gauss(c)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse coefficient {c!r}") from None


class Term(_Strict):
    exponents: List[int]
    coeff: Coeff


Polynomial = List[Term]


def to_series(p: Polynomial, nvars: int) -> MultiSeries:
    terms = {}
    for t in p:
        if len(t.exponents) != nvars:
            raise ConfigError(f"exponent {t.exponents} does not have {nvars} entries")
        if any(x < 0 for x in t.exponents):
            raise ConfigError(f"negative exponent {t.exponents}")
        e = tuple(t.exponents)
        terms[e] = terms.get(e, GaussRat(0)) + coeff_value(t.coeff)
    return MultiSeries(nvars, terms)


class RationalComponent(_Strict):
    num: Polynomial
    den: Optional[Polynomial] = None


class BlowupFamily(_Strict):
    kind: Literal["blowup"]
    n: int = Field(ge=2, le=5)
    F: List[Polynomial]
    G: List[Polynomial]


class ChartEntry(_Strict):
    id: int


class TransitionEntry(_Strict):
    source: int
    target: int
    components: List[RationalComponent]
    samples: List[List[Coeff]] = Field(default_factory=list)


class ChartMap(_Strict):
    chart: int
    target: int
    components: List[RationalComponent]


class AtlasFamily(_Strict):
    kind: Literal["atlas"]
    n: int = Field(ge=2)
    compact: bool = False
    charts: List[ChartEntry]
    transitions: List[TransitionEntry] = Field(default_factory=list)
    f: List[ChartMap]
    g: List[ChartMap]


Family = Annotated[Union[BlowupFamily, AtlasFamily], Field(discriminator="kind")]


class BranchEntry(_Strict):
    label: str
    y: Polynomial
    f: List[Polynomial]
    g: List[Polynomial]
    branch: List[Polynomial]
    variant: Literal["cs4", "cs5", "cs6"] = "cs4"
    expected: Optional[Coeff] = None


class Targets(_Strict):
    cs: Optional[Coeff] = None
    bb: Dict[str, Coeff] = Field(default_factory=dict)
    ls: Dict[str, Coeff] = Field(default_factory=dict)


class VerificationConfig(_Strict):
    family: Family
    theorems: List[Literal["cs", "bb", "ls"]] = Field(default_factory=lambda: ["cs"])
    variant: Literal["tangential", "split", "split_nu1"] = "tangential"
    phi: List[str] = Field(default_factory=list)
    order: Optional[int] = Field(default=None, ge=2, le=64)
    mode: Literal["exact", "float"] = "exact"
    candidates: Dict[str, List[List[Coeff]]] = Field(default_factory=dict)
    branches: List[BranchEntry] = Field(default_factory=list)
    targets: Targets = Field(default_factory=Targets)


def load_config(path) -> VerificationConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(raw)


def parse_config(raw: dict) -> VerificationConfig:
    try:
        return VerificationConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def polynomial_map(polys: List[Polynomial], nvars: int) -> MapJet:
    return MapJet(to_series(p, nvars) for p in polys)


def rational_map(comps: List[RationalComponent], nvars: int) -> RationalMap:
    out = []
    for c in comps:
        num = to_series(c.num, nvars)
        den = to_series(c.den, nvars) if c.den is not None else \
            MultiSeries.constant(GaussRat(1), nvars)
        out.append((num, den))
    return RationalMap(out)


def polynomial_json(s: MultiSeries) -> list:
    """Config-format polynomial from an exact series."""
    return s.to_json()["terms"]

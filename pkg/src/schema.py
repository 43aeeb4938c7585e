"""JSON models for the command-line output envelope."""

from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, ConfigDict

from src.laurent import BinomialFactorization, LaurentPoly
from src.verify import CheckReport

if TYPE_CHECKING:
    from src.linking import LinkingData


class FactorOut(BaseModel):
    exponents: list[int]
    multiplicity: int


class FactoredOut(BaseModel):
    nvars: int
    sign: int
    zero_mult: int
    factors: list[FactorOut]

    @classmethod
    def from_factorization(cls, f: BinomialFactorization) -> FactoredOut:
        return cls(
            nvars=f.nvars,
            sign=f.sign,
            zero_mult=f.zero_mult,
            factors=[FactorOut(exponents=list(e), multiplicity=m) for e, m in f.factors],
        )

    def to_factorization(self) -> BinomialFactorization:
        return BinomialFactorization.from_factors(
            self.nvars,
            ((factor.exponents, factor.multiplicity) for factor in self.factors),
            sign=self.sign,
            zero_mult=self.zero_mult,
        )


class TermOut(BaseModel):
    exponents: list[int]
    # decimal string, integers are unbounded
    coeff: str


class ExpandedOut(BaseModel):
    nvars: int
    terms: list[TermOut]

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> ExpandedOut:
        return cls(nvars=p.nvars, terms=[TermOut(exponents=list(e), coeff=str(c)) for e, c in p.terms])

    def to_poly(self) -> LaurentPoly:
        return LaurentPoly.from_dict(self.nvars, {tuple(term.exponents): int(term.coeff) for term in self.terms})


class InvariantOut(BaseModel):
    """One computed invariant. `rendered` is what the text output prints."""

    name: str
    status: Literal["ok", "zero", "indeterminate"]
    rendered: str
    factored: FactoredOut | None = None
    expanded: ExpandedOut | None = None
    flag: bool | None = None
    signs: dict[str, int] | None = None
    witness: list[int] | None = None
    detail: str | None = None


class PairOut(BaseModel):
    first: str
    second: str
    value: int


class LinkingOut(BaseModel):
    components: list[str]
    pairs: list[PairOut]
    vertices: list[PairOut]
    totals: dict[str, int]

    @classmethod
    def from_data(cls, data: LinkingData) -> LinkingOut:
        names = data.components
        return cls(
            components=list(names),
            pairs=[
                PairOut(first=names[i - 1], second=names[j - 1], value=value)
                for (i, j), value in sorted(data.pairs.items())
            ],
            vertices=[
                PairOut(first=names[i - 1], second=vertex, value=data.entry(i, vertex))
                for vertex in data.vertices
                for i in range(1, len(names) + 1)
            ],
            totals=data.totals(),
        )


class OutputEnvelope(BaseModel):
    version: str
    input_digest: str
    requested: list[str] = []
    results: list[InvariantOut] = []
    linking: LinkingOut | None = None
    reports: list[CheckReport] = []
    summary: dict[str, int] | None = None
    diagnostics: list[str] = []

    model_config = ConfigDict(extra="forbid")


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()

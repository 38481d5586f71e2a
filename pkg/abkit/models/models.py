import typing
from fractions import Fraction
from pydantic import BaseModel, ConfigDict, PositiveInt, NonNegativeInt, field_validator, model_validator
from abkit.core.config import Config
from abkit.core.computation_config import SUBCOMMANDS, DEFAULT_PRESENTATION_DEGREE, IMAGE_OF_B_CHAINS


def _fraction(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"{value!r} is not an exact rational; write it as a string like '1/3'")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"{value!r} is not a rational number") from e


class ABModuleDocument(BaseModel):
    """a_matrix entries are series in b, e.g. "5/6*b + b^2"; column i is a(e_i)."""
    model_config = ConfigDict(extra="forbid")

    a_matrix: typing.List[typing.List[str]]
    b_truncation: PositiveInt

    @field_validator("a_matrix")
    @classmethod
    def square(cls, rows):
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("a_matrix must be square")
        return rows


class PresentationDocument(BaseModel):
    """Relations are lists of words in a, b, one word per generator."""
    model_config = ConfigDict(extra="forbid")

    generators: PositiveInt
    relations: typing.List[typing.List[str]] = []
    degree: PositiveInt = DEFAULT_PRESENTATION_DEGREE

    @field_validator("relations")
    @classmethod
    def one_word_per_generator(cls, relations, info):
        generators = info.data.get("generators")
        if generators is not None and any(len(relation) != generators for relation in relations):
            raise ValueError(f"every relation needs one word per generator ({generators})")
        return relations


class Command(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    subcommand: typing.Literal[tuple(SUBCOMMANDS)]
    poly: typing.Optional[str] = None
    vars: typing.Optional[typing.List[str]] = None
    params: typing.List[str] = []
    param_order: PositiveInt = Config.DEFAULT_PARAM_ORDER
    points: typing.List[typing.List[Fraction]] = []
    weights: typing.Optional[typing.List[Fraction]] = None
    max_degree: PositiveInt = Config.DEFAULT_MAX_DEGREE
    b_order: PositiveInt = Config.DEFAULT_B_ORDER
    max_steps: PositiveInt = Config.DEFAULT_MAX_STEPS
    max_n: PositiveInt = 6
    na: typing.Optional[PositiveInt] = None
    nb: PositiveInt = 8
    left: typing.Optional[str] = None
    right: typing.Optional[str] = None
    module_json: typing.Optional[ABModuleDocument] = None
    presentation_json: typing.Optional[PresentationDocument] = None
    lambdas: typing.List[Fraction] = []
    k: NonNegativeInt = 0
    which: typing.Literal["a", "b"] = "a"
    power: PositiveInt = 1
    checks: bool = True
    chains: PositiveInt = IMAGE_OF_B_CHAINS
    seed: typing.Optional[int] = None
    output: typing.Optional[str] = None

    @field_validator("points", mode="before")
    @classmethod
    def parse_points(cls, points):
        if points is None:
            return []
        return [[_fraction(c) for c in (point if isinstance(point, (list, tuple)) else [point])] for point in points]

    @field_validator("weights", "lambdas", mode="before")
    @classmethod
    def parse_fractions(cls, values):
        if values is None:
            return values
        return [_fraction(value) for value in values]

    @field_validator("weights")
    @classmethod
    def positive_weights(cls, values):
        if values is not None and any(value <= 0 for value in values):
            raise ValueError("weights must be positive")
        return values

    @model_validator(mode="after")
    def required_inputs(self):
        needs_poly = {"brieskorn", "quasi-iso"}
        if self.subcommand in needs_poly and not self.poly:
            raise ValueError(f"{self.subcommand} needs --poly")
        if self.subcommand in ("spectrum", "hom-xi") and not (self.poly or self.module_json):
            raise ValueError(f"{self.subcommand} needs --poly or --module-json")
        if self.subcommand == "torsion" and not (self.poly or self.presentation_json):
            raise ValueError("torsion needs --poly or --presentation-json")
        if self.subcommand == "mul" and not (self.left and self.right):
            raise ValueError("mul needs --left and --right")
        if self.subcommand == "hom-xi" and not self.lambdas:
            raise ValueError("hom-xi needs --lambdas")
        return self

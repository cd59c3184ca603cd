"""Scenario files for the command line.

A scenario is a JSON document:

    {
      "atoms": [{"label": "w1", "weight": "3/5"}, {"label": "w2", "weight": "2/5"}],
      "generators": [{"name": "X", "values": ["1", "-1"]}],
      "cone_kind": "cone"
    }

With a "product" block ({rows, cols, marginal1, marginal2}) the atoms are
the cells of the product, labelled "row,col"; cells that are not listed or
carry weight 0 are outside the support of P0. Row and column labels may
not contain ",". Generators are then derived from the marginals and must
not be given.

A measure file is {"weights": [...]} in the scenario's atom order, or
{"weights": {"label": weight, ...}} keyed by atom label.
"""

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union
import json
import logging

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError, field_validator, model_validator

from src.conecert.marginals.marginals import MarginalPair, ProductSpace, build_marginal_cone
from src.conecert.space.space import (
    ConeKind,
    ConeSpec,
    FiniteProbSpace,
    Measure,
    RationalParseError,
    parse_rational,
)


# Configure module logger
logger = logging.getLogger(__name__)

RationalText = Union[StrictInt, StrictStr]


class ScenarioError(ValueError):
    """Raised when a scenario or measure file cannot be read or validated."""
    pass


def _rational(value: RationalText) -> Fraction:
    try:
        return parse_rational(value)
    except RationalParseError as e:
        raise ValueError(str(e)) from None


class AtomModel(BaseModel):
    """One atom and its reference weight."""
    model_config = ConfigDict(extra="forbid")

    label: StrictStr = Field(..., min_length=1, description="Atom label")
    weight: RationalText = Field(..., description="Reference weight, e.g. \"3/7\"")

    @field_validator("weight")
    @classmethod
    def _exact_weight(cls, value: RationalText) -> RationalText:
        _rational(value)
        return value


class GeneratorModel(BaseModel):
    """One generating payoff."""
    model_config = ConfigDict(extra="forbid")

    name: StrictStr = Field(..., min_length=1, description="Generator name")
    values: List[RationalText] = Field(..., description="One value per atom")

    @field_validator("values")
    @classmethod
    def _exact_values(cls, values: List[RationalText]) -> List[RationalText]:
        for value in values:
            _rational(value)
        return values


class ProductModel(BaseModel):
    """Product structure and prescribed marginals."""
    model_config = ConfigDict(extra="forbid")

    rows: List[StrictStr] = Field(..., min_length=1)
    cols: List[StrictStr] = Field(..., min_length=1)
    marginal1: List[RationalText]
    marginal2: List[RationalText]

    @field_validator("rows", "cols")
    @classmethod
    def _no_separator(cls, labels: List[str]) -> List[str]:
        for label in labels:
            if "," in label:
                raise ValueError(f"label {label!r} must not contain \",\"")
        return labels

    @model_validator(mode="after")
    def _marginals_match(self) -> "ProductModel":
        for name, labels, weights in (
            ("marginal1", self.rows, self.marginal1),
            ("marginal2", self.cols, self.marginal2),
        ):
            if len(weights) != len(labels):
                raise ValueError(f"{name} has {len(weights)} entries for {len(labels)} labels")
            parsed = [_rational(w) for w in weights]
            if any(w < 0 for w in parsed) or sum(parsed, Fraction(0)) != 1:
                raise ValueError(f"{name} must be nonnegative and sum to 1")
        return self


class ScenarioModel(BaseModel):
    """A complete scenario file."""
    model_config = ConfigDict(extra="forbid")

    atoms: List[AtomModel] = Field(..., min_length=1)
    generators: List[GeneratorModel] = Field(default_factory=list)
    cone_kind: Literal["cone", "linear"] = "cone"
    product: Optional[ProductModel] = None

    @model_validator(mode="after")
    def _consistent(self) -> "ScenarioModel":
        weights = [_rational(a.weight) for a in self.atoms]
        for i, w in enumerate(weights):
            if w < 0 or (w == 0 and self.product is None):
                raise ValueError(f"atoms[{i}].weight must be positive, got {w}")
        total = sum(weights, Fraction(0))
        if total != 1:
            raise ValueError(f"atom weights sum to {total}, not 1")
        for j, generator in enumerate(self.generators):
            if len(generator.values) != len(self.atoms):
                raise ValueError(
                    f"generators[{j}] has {len(generator.values)} values for {len(self.atoms)} atoms"
                )
        if self.product is not None and self.generators:
            raise ValueError("generators must be omitted when a product block is given")
        return self


class MeasureFileModel(BaseModel):
    """A measure given either as one weight per atom in the scenario's atom
    order, or as a mapping from atom label to weight."""
    model_config = ConfigDict(extra="forbid")

    weights: Union[List[RationalText], Dict[StrictStr, RationalText]]

    @field_validator("weights")
    @classmethod
    def _exact_weights(cls, values):
        if not values:
            raise ValueError("at least one weight is required")
        for value in (values.values() if isinstance(values, dict) else values):
            _rational(value)
        return values


@dataclass(frozen=True)
class Scenario:
    """A validated scenario.

    Attributes:
        space: The finite space (support cells in product mode)
        cone: The cone or linear space of payoffs
        product: The product structure, when given
        marginals: The prescribed marginals, when given
        labels: Atom labels in the order the file lists them
    """
    space: FiniteProbSpace
    cone: ConeSpec
    product: Optional[ProductSpace] = None
    marginals: Optional[MarginalPair] = None
    labels: Tuple[str, ...] = ()


def _describe(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        location = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{location}: {err['msg']}")
    return "; ".join(parts)


def _read_json(path: Union[str, Path]) -> object:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"{path}: cannot read file: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def build_scenario(model: ScenarioModel) -> Scenario:
    """Turn a validated model into domain objects."""
    weights = [_rational(a.weight) for a in model.atoms]
    if model.product is None:
        try:
            space = FiniteProbSpace(
                atoms=tuple(a.label for a in model.atoms),
                weights=tuple(weights),
            )
        except ValueError as e:
            raise ScenarioError(f"atoms: {e}") from None
        cone = ConeSpec(
            space=space,
            generators=tuple(
                space.random_variable([_rational(v) for v in g.values]) for g in model.generators
            ),
            kind=ConeKind(model.cone_kind),
            names=tuple(g.name for g in model.generators),
        )
        return Scenario(space=space, cone=cone, labels=space.atoms)

    block = model.product
    cells = {}
    for i, (atom, w) in enumerate(zip(model.atoms, weights)):
        row, sep, col = atom.label.partition(",")
        if not sep:
            raise ScenarioError(f"atoms[{i}].label: expected \"row,col\", got {atom.label!r}")
        if (row, col) in cells:
            raise ScenarioError(f"atoms[{i}].label: cell {atom.label!r} is listed twice")
        cells[(row, col)] = w
    try:
        ps = ProductSpace.from_cells(block.rows, block.cols, cells)
        marginals = MarginalPair.from_weights(
            ps,
            [_rational(w) for w in block.marginal1],
            [_rational(w) for w in block.marginal2],
        )
    except ValueError as e:
        raise ScenarioError(f"product: {e}") from None
    return Scenario(
        space=ps.space,
        cone=build_marginal_cone(ps, marginals),
        product=ps,
        marginals=marginals,
        labels=tuple(a.label for a in model.atoms),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read, validate and build a scenario file.

    Raises:
        ScenarioError: With the file position or field path of the problem
    """
    raw = _read_json(path)
    try:
        model = ScenarioModel.model_validate(raw)
    except ValidationError as e:
        raise ScenarioError(f"{path}: {_describe(e)}") from None
    scenario = build_scenario(model)
    logger.debug(
        f"Loaded scenario {path}: {scenario.space.size} atoms, {scenario.cone.dimension} generators"
    )
    return scenario


def load_measure(
    path: Union[str, Path],
    space: FiniteProbSpace,
    labels: Optional[Sequence[str]] = None,
) -> Measure:
    """Read a measure file as a measure on ``space``.

    A weight list is matched to ``labels`` (the scenario's atom order,
    ``space.atoms`` when None) and then placed on the atoms of ``space`` by
    label. Labels outside ``space`` (cells off the support) must carry 0.

    Raises:
        ScenarioError: If the file is malformed, a label is unknown or missing,
            or the weights are not a measure
    """
    raw = _read_json(path)
    try:
        model = MeasureFileModel.model_validate(raw)
    except ValidationError as e:
        raise ScenarioError(f"{path}: {_describe(e)}") from None

    order = tuple(space.atoms if labels is None else labels)
    if isinstance(model.weights, dict):
        given = {label: _rational(w) for label, w in model.weights.items()}
        unknown = sorted(set(given) - set(order))
        if unknown:
            raise ScenarioError(f"{path}: weights: unknown atom labels {unknown}")
    else:
        if len(model.weights) != len(order):
            raise ScenarioError(
                f"{path}: weights: {len(model.weights)} entries for {len(order)} atoms"
            )
        given = {label: _rational(w) for label, w in zip(order, model.weights)}

    missing = [a for a in space.atoms if a not in given]
    if missing:
        raise ScenarioError(f"{path}: weights: no weight for atoms {missing}")
    outside = [label for label, w in given.items() if label not in space.atoms and w != 0]
    if outside:
        raise ScenarioError(f"{path}: weights: atoms {outside} are outside the support")
    try:
        return Measure(space=space, weights=tuple(given[a] for a in space.atoms))
    except ValueError as e:
        raise ScenarioError(f"{path}: weights: {e}") from None

"""Machine-checkable reports produced by the casebook."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union
import json
import logging

from src.conecert.config.settings import DEFAULT_FLOAT_DIGITS


# Configure module logger
logger = logging.getLogger(__name__)

ClaimValue = Union[Fraction, int, float, bool, str, Sequence[str], None]


class ClaimStatus(Enum):
    """Outcome of a single claim."""
    VERIFIED = "verified"
    REFUTED = "refuted"
    INFORMATIONAL = "informational"


def render_value(value: ClaimValue, float_digits: int = DEFAULT_FLOAT_DIGITS):
    """Exact values as "p/q" strings; floats quarantined behind a "~" prefix."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return f"~{value:.{float_digits}g}"
    if isinstance(value, (int, Fraction)):
        return str(value)
    if isinstance(value, str):
        return value
    return [render_value(v, float_digits) for v in value]


@dataclass(frozen=True)
class Claim:
    """One checked statement of a case.

    Attributes:
        label: What is claimed
        status: verified, refuted or informational
        value: The exact (or "~"-marked floating) value behind the claim
        checked_by: The operation(s) that performed the check
        tolerance: Floating tolerance used, if any
    """
    label: str
    status: ClaimStatus
    value: ClaimValue
    checked_by: str
    tolerance: Optional[float] = None

    def to_dict(self, float_digits: int = DEFAULT_FLOAT_DIGITS) -> Dict[str, object]:
        return {
            "label": self.label,
            "status": self.status.value,
            "value": render_value(self.value, float_digits),
            "tolerance": None if self.tolerance is None else render_value(self.tolerance, float_digits),
            "checked_by": self.checked_by,
        }


@dataclass
class CaseReport:
    """Claims checked by one run of a case.

    Attributes:
        case: Registry name of the case
        parameters: Parameters the case ran with, rendered as text
        claims: Claims in the order they were checked
    """
    case: str
    parameters: Dict[str, str]
    claims: List[Claim] = field(default_factory=list)

    @property
    def report_type(self) -> str:
        return "case"

    def check(
        self,
        label: str,
        holds: bool,
        value: ClaimValue,
        checked_by: str,
        tolerance: Optional[float] = None,
    ) -> Claim:
        """Record a claim as verified or refuted."""
        status = ClaimStatus.VERIFIED if holds else ClaimStatus.REFUTED
        claim = Claim(label, status, value, checked_by, tolerance)
        self.claims.append(claim)
        logger.info(f"[{self.case}] {label}: {status.value}")
        return claim

    def inform(self, label: str, value: ClaimValue, checked_by: str) -> Claim:
        """Record a value that is reported but not asserted."""
        claim = Claim(label, ClaimStatus.INFORMATIONAL, value, checked_by)
        self.claims.append(claim)
        logger.info(f"[{self.case}] {label}: {value}")
        return claim

    def claim(self, label: str) -> Claim:
        """Look up a claim by label."""
        for claim in self.claims:
            if claim.label == label:
                return claim
        raise KeyError(f"No claim labelled {label!r}")

    @property
    def refuted(self) -> List[Claim]:
        return [c for c in self.claims if c.status is ClaimStatus.REFUTED]

    @property
    def all_verified(self) -> bool:
        """True if no claim was refuted."""
        return not self.refuted

    def to_dict(self, float_digits: int = DEFAULT_FLOAT_DIGITS) -> Dict[str, object]:
        return {
            "case": self.case,
            "parameters": dict(self.parameters),
            "claims": [c.to_dict(float_digits) for c in self.claims],
        }

    def to_json(self, float_digits: int = DEFAULT_FLOAT_DIGITS) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(float_digits), indent=2)

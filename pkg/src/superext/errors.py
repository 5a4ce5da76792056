"""Exception types shared across the engine."""


class SuperextError(Exception):
    """Base class for all engine errors."""


class ExprSyntaxError(SuperextError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbol(SuperextError):
    """Identifier not declared in the chart."""


class NonRationalExpression(SuperextError):
    """A verdict-level computation met ln (or an unresolvable fractional power)."""


class SingularPoint(SuperextError):
    """Evaluation hit a vanishing denominator or a negative radicand."""


class PerfectSquareRadicand(SuperextError):
    """A declared radicand is a perfect square; zero-testing would be unsound."""


class DegenerateMetric(SuperextError):
    """det g is identically zero."""


class SlotOutOfRange(SuperextError):
    """Tensor slot index outside the tensor's order."""


class MixedVariance(SuperextError):
    """(Anti)symmetrization across slots of different variance."""


class WrongOrder(SuperextError):
    """Operation requires a tensor of a specific order."""


class GradientsDependent(SuperextError):
    """The potential family's gradient matrix is identically singular."""


class NonPolynomialBlowup(SuperextError):
    """Canonical forms exceeded the configured size bound."""


class NotExtendable(SuperextError):
    """Requested the non-degenerate extension of a system with nonzero obstruction."""


class NotClosed(SuperextError):
    """Path integration of a 1-form that is not closed."""


class SingularPath(SuperextError):
    """An integration path cannot avoid the singular set."""


class PathDependence(SuperextError):
    """Two homotopic paths disagree beyond tolerance; integrability is broken."""


class FamilyNotContained(SuperextError):
    """Input family fails to embed in the reconstructed solution space."""


class FitFailed(SuperextError):
    """Candidate dictionary cannot represent the sampled extension."""


class UnknownCheck(SuperextError):
    """check --only received a name outside the registry."""


class DescriptionError(SuperextError):
    """System-description file is malformed; message carries the line number."""

"""Exception hierarchy shared by all refleq modules."""


class RefleqError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RefleqError):
    """A field or map was used outside its declared domain, or the domain
    does not have the required shape (e.g. not symmetric about 0)."""


class UnsupportedCaseError(RefleqError):
    """The coefficient configuration is outside the supported theory
    (vanishing reflection coefficient, wrong case for an operation, or an
    ambiguous near-degenerate classification)."""


class NonUniqueSolutionError(RefleqError):
    """The initial value problem has no unique solution (the homogeneous
    solution vanishes at the initial point)."""


class DegenerateProblemError(RefleqError):
    """A closed-form solver hit a degenerate parameter combination."""


class ResonanceError(RefleqError):
    """The boundary value problem is resonant: the homogeneous problem has
    nontrivial solutions and no Green's function exists."""


class QuadratureError(RefleqError):
    """Adaptive quadrature failed to converge within the depth limit."""


class ConvergenceError(RefleqError):
    """An iterative solver exceeded its iteration budget."""


class ContractionGateError(RefleqError):
    """The fixed-point solver's convergence certificate failed; iteration
    was not attempted (pass force=True to iterate anyway)."""

    def __init__(self, constant: float):
        self.constant = constant
        super().__init__(
            f"contraction constant {constant:.6g} >= 1: convergence is not "
            "guaranteed (pass force=True to iterate at your own risk)"
        )


class CannotShootError(RefleqError):
    """The shooting oracle found no bracketing interval; the boundary value
    problem is likely resonant."""


class ParseError(RefleqError):
    """Expression source could not be parsed. Carries the byte offset."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class EvalDomainError(RefleqError):
    """Expression evaluation hit a real-domain violation (log/sqrt/atanh
    out of range, division by zero); never returns a silent NaN."""


class VerificationError(RefleqError):
    """An internal cross-check (analytic claim vs. sampled evidence)
    failed; indicates a bug or an inadmissible input."""

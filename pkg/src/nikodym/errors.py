"""Typed errors shared across the workbench.

Every error that a verdict or CLI exit code depends on gets its own class;
generic bad input goes through ParseError / ValidationError.
"""


class NikodymError(Exception):
    pass


class ParseError(NikodymError):
    """Malformed textual input (s-expression or JSON spec)."""


class ValidationError(NikodymError):
    """Well-formed input violating a structural invariant."""


class EvalError(NikodymError):
    """Expression evaluation failed (division by zero, non-integer exponent, ...)."""


class MagnitudeOverflow(NikodymError):
    """A value is too large to materialize exactly; callers may retry lazily."""


class UnsupportedAsymptotics(NikodymError):
    """Expression falls outside the certified closed-form fragment."""


class EmptyMeasure(NikodymError):
    """Operation needs at least one atom."""


class HasPFAtom(NikodymError):
    """Operation is defined only for measures supported on the naturals."""


class UndefinedAt(NikodymError):
    def __init__(self, point):
        super().__init__(f"map undefined at {point}")
        self.point = point


class OutOfGround(NikodymError):
    pass


class GroundTooLarge(NikodymError):
    def __init__(self, size, bound):
        super().__init__(f"ground set of size {size} exceeds bound {bound}")
        self.size = size
        self.bound = bound


class NotBlockStructured(NikodymError):
    """Ideal has no block generator to enumerate."""


class BlockTooLarge(NikodymError):
    def __init__(self, index, size):
        super().__init__(f"block {index} has {size} points; refusing to materialize")
        self.index = index
        self.size = size


class HorizonExhausted(NikodymError):
    def __init__(self, stage, reached):
        super().__init__(f"{stage}: horizon exhausted at step {reached}")
        self.stage = stage
        self.reached = reached


class BoundedSubmeasure(NikodymError):
    """Greedy unbounded-interval search cannot continue.

    status is 'bounded-certified' when a finite bound on the submeasure was
    certified, 'not-certified' when unboundedness could not be established.
    """

    def __init__(self, status, step, detail=""):
        super().__init__(f"submeasure not certifiably unbounded ({status}) at step {step} {detail}")
        self.status = status
        self.step = step


class MassMismatch(NikodymError):
    pass


class AtomTooLarge(NikodymError):
    pass


class NormMismatch(NikodymError):
    def __init__(self, index, left, right):
        super().__init__(f"norms differ at block {index}: {left} vs {right}")
        self.index = index


class AtomConditionFails(NikodymError):
    def __init__(self, violations):
        super().__init__(f"atom condition fails at blocks {sorted(violations)[:8]}")
        self.violations = violations


class NonPositiveValue(NikodymError):
    def __init__(self, name, index, value):
        super().__init__(f"{name}({index}) = {value} must be positive")
        self.index = index
        self.value = value


class NormTooSmall(NikodymError):
    def __init__(self, index, needed):
        super().__init__(f"no block of norm >= {needed} found from index {index} on")
        self.index = index
        self.needed = needed


class DominationFails(NikodymError):
    def __init__(self, worst):
        super().__init__(f"domination inequality fails up to the horizon; greatest violation at n = {worst}")
        self.worst = worst


class NotPseudoUnion(NikodymError):
    def __init__(self, value):
        super().__init__(f"fiber over {value} minus the pseudo-union does not stabilize below the horizon")
        self.value = value


class NotFiniteToOne(NikodymError):
    pass


class DomainTooSmall(NikodymError):
    def __init__(self, point):
        super().__init__(f"reduction table does not cover point {point}")
        self.point = point


class AllZeroPrefix(NikodymError):
    pass


class HypothesisFails(NikodymError):
    def __init__(self, index, which):
        super().__init__(f"hypothesis '{which}' fails first at n = {index}")
        self.index = index
        self.which = which


class ConditionFails(NikodymError):
    def __init__(self, index, detail=""):
        super().__init__(f"growth condition fails at n = {index} {detail}".rstrip())
        self.index = index


class NotAnIdeal(NikodymError):
    def __init__(self, detail):
        super().__init__(f"total weight converges; the family is not a proper ideal construction: {detail}")
        self.detail = detail


class InconsistentVerdicts(NikodymError):
    def __init__(self, detail):
        super().__init__(f"membership verdicts violate an implication that must hold: {detail}")
        self.detail = detail

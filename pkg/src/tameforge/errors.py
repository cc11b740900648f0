"""Exception types shared across the package."""


class TameforgeError(Exception):
    """Base class for every construction or verification failure."""


class NonFiniteEvaluation(TameforgeError, ArithmeticError):
    pass


class LengthMismatch(TameforgeError, ValueError):
    pass


class NodeCollision(TameforgeError, ValueError):
    pass


class StageCollision(NodeCollision):
    def __init__(self, stage, msg=""):
        self.stage = stage
        super().__init__(f"argument values collide at stage {stage}" + (f": {msg}" if msg else ""))


class TooManyNodes(TameforgeError, ValueError):
    pass


class ZeroDirection(TameforgeError, ValueError):
    pass


class InvalidShear(TameforgeError, ValueError):
    """Raised when a shear's functional does not annihilate its direction."""


class FirstCoordinateMismatch(TameforgeError, ValueError):
    pass


class GenericityFailure(TameforgeError, RuntimeError):
    pass


class NotVolumePreserving(TameforgeError, ValueError):
    pass


class InjectivityViolation(TameforgeError, ValueError):
    pass


class ChartSingularity(TameforgeError, RuntimeError):
    pass


class OverflowGuard(TameforgeError, ValueError):
    pass


class OffVariety(TameforgeError, ValueError):
    pass


class DampingExhausted(TameforgeError, RuntimeError):
    def __init__(self, measured, target):
        self.measured = measured
        self.target = target
        super().__init__(f"damping exhausted: deviation {measured:.3e} > eps {target:.3e}")


class DuplicatePoints(TameforgeError, ValueError):
    pass


class ScheduleInfeasible(TameforgeError, ValueError):
    """No box radius separates the matched targets from the next pair."""


class ConfigError(TameforgeError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    pass

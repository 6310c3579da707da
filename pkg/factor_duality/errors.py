from collections.abc import Sequence


class FactorDualityError(Exception):
    """Basic exception for errors raised by factor-duality"""

    def __str__(self) -> str:
        return self.args[0]


class InvalidRangeError(FactorDualityError, ValueError):
    """The half-open range [lo, hi) is empty or out of bounds"""

    def __init__(self, lo: int, hi: int) -> None:
        super(InvalidRangeError, self).__init__(
            f"Invalid range [{lo}, {hi}): need 1 <= lo < hi <= 2^63.",
        )
        self.lo = lo
        self.hi = hi


class RangeTooLargeError(FactorDualityError):
    """The requested sieve range exceeds the memory budget"""

    def __init__(self, lo: int, hi: int, budget: int) -> None:
        super(RangeTooLargeError, self).__init__(
            f"The range [{lo}, {hi}) needs {max(hi - lo, 0)} table entries "
            f"(or base primes up to sqrt({hi})), "
            f"but the memory budget allows at most {budget}.\n"
            "Sweep the range with `map_segments` or raise the budget.",
        )
        self.lo = lo
        self.hi = hi
        self.budget = budget


class OutOfRangeError(FactorDualityError, KeyError):
    """n is not covered by the table"""

    def __init__(self, n: int, lo: int, hi: int) -> None:
        super(OutOfRangeError, self).__init__(
            f"n = {n} is outside of the table range [{lo}, {hi}).",
        )
        self.n = n
        self.lo = lo
        self.hi = hi


class CeilingExceededError(FactorDualityError, ValueError):
    """x is above the configured sieve ceiling"""

    def __init__(self, x: int, ceiling: int, what: str = "x") -> None:
        super(CeilingExceededError, self).__init__(
            f"{what} = {x} exceeds the ceiling of {ceiling}.",
        )
        self.x = x
        self.ceiling = ceiling


class InvalidResidueError(FactorDualityError, ValueError):
    """Residue pair (j, l) violates 1 <= j <= l, l >= 2, gcd(j, l) = 1"""

    def __init__(self, j: int, modulus: int, reason: str) -> None:
        super(InvalidResidueError, self).__init__(
            f"The residue class {j} mod {modulus} is invalid. Reason: {reason}",
        )
        self.j = j
        self.modulus = modulus


class UnsupportedOrderError(FactorDualityError, ValueError):
    """Order (k, power, ...) outside of the supported range"""

    def __init__(self, name: str, value: int, lower: int, upper: int) -> None:
        super(UnsupportedOrderError, self).__init__(
            f"{name} = {value} is not supported, "
            f"it has to satisfy {lower} <= {name} <= {upper}.",
        )
        self.name = name
        self.value = value


class UnitArgumentError(FactorDualityError, ValueError):
    """The operation is undefined for n = 1 (no prime factors)"""

    def __init__(self, operation: str, n: int) -> None:
        super(UnitArgumentError, self).__init__(
            f"{operation} needs an n with at least one prime factor, got n = {n}.",
        )
        self.n = n


class UnknownPrimeError(FactorDualityError, KeyError):
    """Explicit-table weight queried at a prime it does not define"""

    def __init__(self, p: int) -> None:
        super(UnknownPrimeError, self).__init__(
            f"The explicit weight table has no value for the prime {p}.",
        )
        self.p = p


class StepTooCoarseError(FactorDualityError, ValueError):
    def __init__(self, step: float, coarsest: float) -> None:
        super(StepTooCoarseError, self).__init__(
            f"Step {step} is too coarse (or does not divide 1), "
            f"use 1/N with step <= {coarsest}.",
        )
        self.step = step


class AlphaOutOfRangeError(FactorDualityError, ValueError):
    def __init__(self, alpha: float, alpha_max: float) -> None:
        super(AlphaOutOfRangeError, self).__init__(
            f"alpha = {alpha} is outside of the supported range [0, {alpha_max}].",
        )
        self.alpha = alpha


class UnderdeterminedFitError(FactorDualityError):
    """Checkpoint window cannot determine the requested model"""

    def __init__(self, n_points: int, n_params: int, decades: float) -> None:
        super(UnderdeterminedFitError, self).__init__(
            f"The checkpoint window has {n_points} points spanning "
            f"{decades:.2f} decades for a model with {n_params} coefficients.\n"
            "A fit needs at least 8 checkpoints spanning at least 3 decades "
            "and more checkpoints than coefficients.",
        )
        self.n_points = n_points
        self.n_params = n_params


class UnknownModelError(FactorDualityError, ValueError):
    def __init__(self, descriptor: str, presets: Sequence[str]) -> None:
        super(UnknownModelError, self).__init__(
            f"The model '{descriptor}' is neither a preset "
            f"({', '.join(presets)}) nor a list of 'd:e' terms.",
        )
        self.descriptor = descriptor


class UnknownSumKindError(FactorDualityError, ValueError):
    def __init__(self, name: str, kinds: Sequence[str]) -> None:
        super(UnknownSumKindError, self).__init__(
            f"Unknown sum kind '{name}', choose one of: {', '.join(kinds)}.",
        )
        self.name = name


class InvalidCheckpointsError(FactorDualityError, ValueError):
    def __init__(self, grid: str, reason: str) -> None:
        super(InvalidCheckpointsError, self).__init__(
            f"The checkpoint grid '{grid}' is invalid. Reason: {reason}",
        )
        self.grid = grid


class BigRunRequiredError(FactorDualityError):
    """x above the default experiment limit without --big"""

    def __init__(self, x: int, limit: int) -> None:
        super(BigRunRequiredError, self).__init__(
            f"x = {x} is above {limit}. "
            "Long-running experiments have to be requested with `--big`.",
        )
        self.x = x

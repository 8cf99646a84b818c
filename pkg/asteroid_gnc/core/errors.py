class AsteroidGncError(Exception):
    """Common root so the CLI can map failure families to exit codes."""


class ConfigError(AsteroidGncError, ValueError):
    pass


class MeshParseError(AsteroidGncError, ValueError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class MeshStructureError(AsteroidGncError, ValueError):
    pass


class OnSurfaceError(AsteroidGncError, ValueError):
    pass


class GravitySingularityError(AsteroidGncError, ArithmeticError):
    pass


class DegenerateLongitudeError(AsteroidGncError, ValueError):
    pass


class InfeasibleBoundaryError(AsteroidGncError, ValueError):
    def __init__(self, message: str, discriminant: float):
        self.discriminant = discriminant
        super().__init__(f"{message} (discriminant={discriminant!r})")


class AmbiguousAttitudeError(AsteroidGncError, ValueError):
    pass


class DivergenceError(AsteroidGncError, RuntimeError):
    def __init__(self, message: str, log=None):
        self.log = log
        super().__init__(message)


class InvalidLaunchError(AsteroidGncError, ValueError):
    pass


class HopConvergenceError(AsteroidGncError, RuntimeError):
    def __init__(self, message: str, best_velocity, best_residual: float, iterations: int):
        self.best_velocity = best_velocity
        self.best_residual = best_residual
        self.iterations = iterations
        super().__init__(f"{message} (best residual {best_residual:.6g} m after {iterations} iterations)")


class ConditioningError(AsteroidGncError, RuntimeError):
    pass


# Exit codes used by main.py
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_CONVERGENCE = 4
EXIT_UNEXPECTED = 1


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, (HopConvergenceError, ConditioningError)):
        return EXIT_CONVERGENCE
    if isinstance(error, (DivergenceError, GravitySingularityError, AmbiguousAttitudeError)):
        return EXIT_PHYSICS
    if isinstance(error, AsteroidGncError):
        return EXIT_CONFIG
    return EXIT_UNEXPECTED

"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ChabautyError(Exception):
    """Base class for all errors raised by this package."""


# p-adic arithmetic
class PrecisionExhausted(ChabautyError):
    """A computation needed more p-adic digits than were available."""


class DivisionByZero(ChabautyError, ZeroDivisionError):
    """Division by an element that is zero at its stated precision."""


class NotAUnit(ChabautyError):
    """An operation that needs a p-adic unit received a non-unit."""


class SingularRoot(ChabautyError):
    """Hensel lifting was attempted at a root where the derivative vanishes mod p."""


class NoRoot(ChabautyError):
    """The starting residue is not a root mod p."""


class SingularJacobian(ChabautyError):
    """Multivariate Hensel lifting met a Jacobian that is not invertible mod p."""


class RepeatedRootModP(ChabautyError):
    """The reduction mod p of a polynomial has a repeated root."""


class DegreeBoundExceeded(ChabautyError):
    """Samples are not explained by a polynomial of the permitted degree."""


class InsufficientSamples(ChabautyError, ValueError):
    """Interpolation was given fewer samples than the degree bound requires."""


# curves and divisors
class RamifiedDisk(ChabautyError):
    """The x-coordinate is not a valid disk parameter here (2y + h(x) vanishes mod p)."""


class PoleAtBeta(ChabautyError):
    """The odd-degree model change is undefined at the chosen Weierstrass point."""


class NoFifthRoot(ChabautyError):
    """The leading coefficient of the transformed model has no fifth root in Z_p."""


class DimensionMismatch(ChabautyError, ValueError):
    """Vector or matrix sizes do not agree."""


class PoleHit(ChabautyError):
    """A rational function was evaluated at one of its zeros or poles."""


class NoSplitFound(ChabautyError):
    """No multiple n <= n_max of a divisor splits into Q_p-rational points."""


# heights and biextension
class NoSolution(ChabautyError):
    """A linear system from fixture data has no solution."""


class NonUniqueSolution(ChabautyError):
    """A linear system from fixture data has more than one solution."""


class MissingFixture(ChabautyError, KeyError):
    """A value that must come from fixture data is absent."""

    def __str__(self) -> str:  # KeyError would otherwise quote the message
        return Exception.__str__(self)


class LegMismatch(ChabautyError):
    """Biextension points do not share the leg that must stay fixed."""


class FitMismatch(ChabautyError):
    """A polynomial reconstruction disagrees with direct evaluation."""


class NotInDisk(ChabautyError):
    """A point does not belong to the residue disk being parametrized."""


# disk solver and configuration
class NoUnitPivot(ChabautyError):
    """No embedding coordinate has a unit linear coefficient."""


class EnumerationTooLarge(ChabautyError):
    """Exhaustive search over F_p^r would exceed the configured guard."""


class SchemaError(ChabautyError, ValueError):
    """A configuration or fixture file does not match its schema."""


class InvariantViolation(ChabautyError):
    """A configuration violates a mathematical precondition."""

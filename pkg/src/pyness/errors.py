# pyNESS
#
# Copyright (C) 2026 pyNESS developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import abc
from typing import Any


class CustomException(Exception, abc.ABC):
    exit_code: int = 1

    def __init__(self, message: str, *args: object) -> None:
        self.message = message
        super().__init__(message, *args)

    @property
    def details(self) -> Any:
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            'error': type(self).__name__,
            'message': self.message,
            'details': self.details
        }


# Invalid input

class InvalidInputError(CustomException, abc.ABC):
    exit_code = 2


class InvalidModelError(InvalidInputError):
    def __init__(self, message: str, violations: list | None = None) -> None:
        self.violations = violations or []
        super().__init__(message)

    @property
    def details(self) -> Any:
        return [v.to_dict() for v in self.violations]


class InvalidModelFileError(InvalidInputError):
    pass


class InvalidGridError(InvalidInputError):
    pass


class InsufficientPoints(InvalidInputError):
    pass


class NonpositiveResistance(InvalidInputError):
    pass


class NotBoundaryDriven(InvalidInputError):
    pass


# Solver failures

class SolverError(CustomException, abc.ABC):
    exit_code = 1


class NonDiagonalizable(SolverError):
    pass


class NonDissipativePair(SolverError):
    def __init__(self, message: str, pair: tuple[int, int]) -> None:
        self.pair = pair
        super().__init__(message)

    @property
    def details(self) -> Any:
        return list(self.pair)


class SingularSystem(SolverError):
    pass


class SingularLindbladian(SolverError):
    pass


class ConsistencyFailure(SolverError):
    pass


class NonRealOccupation(SolverError):
    pass


class MemoryBudgetExceeded(SolverError):
    pass


class OracleSizeExceeded(SolverError):
    pass


class StepTooLarge(SolverError):
    pass


class ZeroCurrent(SolverError):
    pass

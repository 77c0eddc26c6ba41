"""Symmetry class β and its compact group."""

from enum import IntEnum

from app.errors import DomainError


class BetaClass(IntEnum):
    """β = 1, 2, 4 selects the orthogonal, unitary or symplectic group."""

    ORTHOGONAL = 1
    UNITARY = 2
    SYMPLECTIC = 4

    @classmethod
    def parse(cls, value: "int | str | BetaClass") -> "BetaClass":
        try:
            return cls(int(value))
        except (TypeError, ValueError) as exc:
            raise DomainError(f"beta must be one of 1, 2, 4, got {value!r}") from exc

    @property
    def group(self) -> str:
        return {1: "O(N)", 2: "U(N)", 4: "Sp(N/2)"}[int(self)]

    @property
    def half(self) -> float:
        """β/2."""
        return self.value / 2.0

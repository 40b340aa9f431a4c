"""Black-box time evolution access with exact cost accounting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bell import DoubledState
from .linalg import evolve
from .pauli import PauliSum


class CapabilityError(RuntimeError):
    """A query needed an access mode the oracle was not granted."""

    def __init__(self, flag: str):
        super().__init__(f"oracle access '{flag}' is not enabled")
        self.flag = flag


@dataclass(frozen=True)
class AccessFlags:
    forward: bool = True
    inverse: bool = False
    controlled: bool = False

    @classmethod
    def parse(cls, text: str) -> "AccessFlags":
        names = {s.strip() for s in text.split(",") if s.strip()}
        unknown = names - {"forward", "inverse", "controlled"}
        if unknown:
            raise ValueError(f"unknown access flag(s): {', '.join(sorted(unknown))}")
        return cls("forward" in names, "inverse" in names, "controlled" in names)

    def names(self) -> list[str]:
        return [n for n in ("forward", "inverse", "controlled") if getattr(self, n)]


FORWARD_ONLY = AccessFlags(True, False, False)
FULL_ACCESS = AccessFlags(True, True, True)


@dataclass
class TranscriptEntry:
    duration: float
    inverse: bool
    controlled: bool
    count: int = 1

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "direction": "inv" if self.inverse else "fwd",
            "controlled": self.controlled,
            "count": self.count,
        }


@dataclass
class Transcript:
    """Run-length encoded log of oracle applications.

    ``total_evolution_time`` is a left fold over entries in append order; an
    entry of ``count`` identical queries contributes ``count * duration``.
    """

    entries: list[TranscriptEntry] = field(default_factory=list)

    @property
    def query_count(self) -> int:
        return sum(e.count for e in self.entries)

    @property
    def total_evolution_time(self) -> float:
        total = 0.0
        for e in self.entries:
            total += e.count * e.duration
        return total

    def record(self, duration: float, inverse: bool, controlled: bool, count: int = 1):
        if count <= 0:
            return
        last = self.entries[-1] if self.entries else None
        if last and (last.duration, last.inverse, last.controlled) == (duration, inverse, controlled):
            last.count += count
        else:
            self.entries.append(TranscriptEntry(duration, inverse, controlled, count))

    def extend(self, other: "Transcript"):
        for e in other.entries:
            self.record(e.duration, e.inverse, e.controlled, e.count)

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "query_count": self.query_count,
            "total_evolution_time": self.total_evolution_time,
        }


class ControlledPair(NamedTuple):
    """Branches of a doubled state entangled with one control qubit."""

    off: DoubledState
    on: DoubledState


class EvolutionOracle:
    """Applies I (x) exp(-/+ i H tau) to doubled states and charges for it.

    The Hamiltonian is only reachable through :meth:`query`.
    """

    def __init__(self, hamiltonian: PauliSum, flags: AccessFlags = FORWARD_ONLY):
        self._hamiltonian = hamiltonian
        self._matrix = hamiltonian.matrix()
        self._unitaries: dict[float, np.ndarray] = {}
        self.flags = flags
        self.transcript = Transcript()
        self.n = hamiltonian.n

    def _unitary(self, signed_duration: float) -> np.ndarray:
        U = self._unitaries.get(signed_duration)
        if U is None:
            U = evolve(self._matrix, signed_duration)
            self._unitaries[signed_duration] = U
        return U

    def _check(self, inverse: bool, controlled: bool):
        if not inverse and not self.flags.forward:
            raise CapabilityError("forward")
        if inverse and not self.flags.inverse:
            raise CapabilityError("inverse")
        if controlled and not self.flags.controlled:
            raise CapabilityError("controlled")

    def query(
        self,
        state,
        duration: float,
        *,
        inverse: bool = False,
        controlled: bool = False,
        repeat: int = 1,
    ):
        """Apply one timed query to ``state`` and charge ``repeat`` queries.

        ``repeat > 1`` stands for that many independent trials that hold the
        same state at this point, so one application serves all of them.
        ``state=None`` charges without simulating, for queries whose effect
        is accounted for in closed form.  A :class:`ControlledPair` gets the
        unitary on its ``on`` branch only; a plain state passed with
        ``controlled=True`` is taken to be that branch.
        """
        if not duration > 0:
            raise ValueError("query duration must be positive")
        self._check(inverse, controlled)
        self.transcript.record(float(duration), inverse, controlled, repeat)
        if state is None:
            return None
        U = self._unitary(duration if inverse is False else -duration)
        if isinstance(state, ControlledPair):
            if not controlled:
                raise ValueError("controlled state needs a controlled query")
            return ControlledPair(state.off, state.on.apply_right(U))
        return state.apply_right(U)

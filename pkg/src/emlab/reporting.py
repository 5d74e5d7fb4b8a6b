"""Per-equation residual norm reports used by every diagnostic."""

from __future__ import annotations

import io
from dataclasses import dataclass, field


RESIDUAL_CSV_HEADER = "equation,max_norm,l2_norm,h,dt,time,v0x,v0y,v0z"


@dataclass(frozen=True)
class ResidualEntry:
    equation: str
    max_norm: float
    l2_norm: float
    h: float
    dt: float | None = None
    time: float | None = None
    v0: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.max_norm < 0.0 or self.l2_norm < 0.0:
            raise ValueError("norms must be nonnegative")


@dataclass
class ResidualReport:
    entries: list[ResidualEntry] = field(default_factory=list)

    def add(self, entry: ResidualEntry) -> None:
        self.entries.append(entry)

    def by_equation(self) -> dict[str, ResidualEntry]:
        return {e.equation: e for e in self.entries}

    def __getitem__(self, equation: str) -> ResidualEntry:
        for e in self.entries:
            if e.equation == equation:
                return e
        raise KeyError(equation)

    def to_csv(self) -> str:
        def fmt(x):
            return "" if x is None else repr(float(x))

        buf = io.StringIO()
        buf.write(RESIDUAL_CSV_HEADER + "\n")
        for e in self.entries:
            v0 = e.v0 if e.v0 is not None else (None, None, None)
            row = [e.equation, fmt(e.max_norm), fmt(e.l2_norm), fmt(e.h),
                   fmt(e.dt), fmt(e.time), fmt(v0[0]), fmt(v0[1]), fmt(v0[2])]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

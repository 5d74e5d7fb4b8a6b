"""Force predictions for a static charge pair seen by a moving observer.

Four predictions are computed side by side: the rest-frame Coulomb force,
the moving-observer force with the motion-induced electric field included,
the textbook moving-observer force without it, and relativistic
charge-scaling variants of both (perpendicular geometry only).  Machine
output labels each row by what it computes; none is tagged "correct".
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .constants import PhysicalConstants

PERP_TOL = 1e-9  # |u.r| / (|u||r|) below this counts as perpendicular


@dataclass
class TwoChargeScenario:
    """Charges q1 at position_1 and q2 at position_2; observer moving at u."""

    q1: float
    q2: float
    position_1: np.ndarray
    position_2: np.ndarray
    u: np.ndarray = field(default_factory=lambda: np.zeros(3))
    constants: PhysicalConstants = field(default_factory=PhysicalConstants.si)

    def __post_init__(self):
        self.position_1 = np.asarray(self.position_1, dtype=np.float64)
        self.position_2 = np.asarray(self.position_2, dtype=np.float64)
        self.u = np.asarray(self.u, dtype=np.float64)
        for name in ("position_1", "position_2", "u"):
            if getattr(self, name).shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
        if not np.any(self.position_2 - self.position_1):
            raise ValueError("the two charges must sit at distinct points")

    @property
    def r_vec(self) -> np.ndarray:
        return self.position_2 - self.position_1

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.r_vec))

    @property
    def beta(self) -> float:
        """Observer speed over light speed; recomputed, never cached."""
        return float(np.linalg.norm(self.u)) / self.constants.c

    def u_perpendicular_to_r(self, tol: float = PERP_TOL) -> bool:
        speed = float(np.linalg.norm(self.u))
        if speed == 0.0:
            return True
        return abs(float(self.u @ self.r_vec)) <= tol * speed * self.r

    def swapped(self) -> "TwoChargeScenario":
        return TwoChargeScenario(
            q1=self.q2, q2=self.q1, position_1=self.position_2.copy(),
            position_2=self.position_1.copy(), u=self.u.copy(), constants=self.constants,
        )


def rest_forces(s: TwoChargeScenario) -> tuple[np.ndarray, np.ndarray]:
    """Coulomb forces on charge 1 and charge 2; equal and opposite exactly."""
    f2 = s.q1 * s.q2 * s.r_vec / (4.0 * np.pi * s.constants.eps0 * s.r**3)
    return -f2, f2


@dataclass(frozen=True)
class ObserverFields:
    """Fields of charge 1 at the location of charge 2, in the observer frame."""

    B1: np.ndarray
    E11: np.ndarray   # Coulomb part
    E12: np.ndarray   # part induced by the motion of B1


def observer_fields(s: TwoChargeScenario) -> ObserverFields:
    """Fields seen by an observer moving at u relative to the static pair.

    Charge 1 appears as the current -q1*u, giving B1 = -(mu0 q1/4 pi r^3) u x r;
    that field itself moves at -u, inducing E12 = -(-u) x B1 on top of the
    Coulomb field E11.
    """
    k = s.constants
    r_vec, r = s.r_vec, s.r
    b1 = -k.mu0 * s.q1 / (4.0 * np.pi * r**3) * np.cross(s.u, r_vec)
    e11 = s.q1 * r_vec / (4.0 * np.pi * k.eps0 * r**3)
    e12 = -np.cross(-s.u, b1)
    return ObserverFields(B1=b1, E11=e11, E12=e12)


def force_modified_terms(s: TwoChargeScenario) -> dict[str, np.ndarray]:
    """The three contributions to the moving-observer force on charge 2."""
    fields = observer_fields(s)
    return {
        "magnetic": -s.q2 * np.cross(s.u, fields.B1),
        "coulomb": s.q2 * fields.E11,
        "motion_field": s.q2 * fields.E12,
    }


def force_modified(s: TwoChargeScenario) -> np.ndarray:
    """Moving-observer force with the motion-induced field included.

    The magnetic and motion-field terms cancel, leaving the rest-frame
    Coulomb force for every sub-light u.
    """
    terms = force_modified_terms(s)
    return terms["magnetic"] + terms["coulomb"] + terms["motion_field"]


def force_classical_naive(s: TwoChargeScenario) -> np.ndarray:
    """Textbook moving-observer force, motion-induced field omitted.

    Reduces to (1 - beta^2) times the rest force when u is perpendicular to
    the separation.
    """
    fields = observer_fields(s)
    return s.q2 * fields.E11 + np.cross(-s.q2 * s.u, fields.B1)


FORCE_TABLE_CSV_HEADER = "prediction,fx,fy,fz,ratio_to_rest"

PREDICTION_ORDER = (
    "rest",
    "moving_with_motion_field",
    "moving_without_motion_field",
    "relativistic_without_motion_field",
    "relativistic_with_motion_field",
)


@dataclass
class ForceComparison:
    beta: float
    forces: dict[str, np.ndarray]

    def ratio_to_rest(self, name: str) -> float:
        rest = float(np.linalg.norm(self.forces["rest"]))
        return float(np.linalg.norm(self.forces[name])) / rest

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(FORCE_TABLE_CSV_HEADER + "\n")
        for name in PREDICTION_ORDER:
            f = self.forces[name]
            buf.write(f"{name},{f[0]!r},{f[1]!r},{f[2]!r},{self.ratio_to_rest(name)!r}\n")
        return buf.getvalue()


def force_relativistic_comparison(s: TwoChargeScenario) -> ForceComparison:
    """All five force vectors for the perpendicular geometry.

    The relativistic rows scale the charge product by 1/(1 - beta^2):
    applied to the motion-field-free force this recovers the rest force;
    applied to the motion-field-complete force it exceeds the rest force by
    that same factor.  The latter row is this package's reading of the
    charge-scaling recipe, not a printed formula.
    """
    beta = s.beta
    if beta >= 1.0:
        raise ValueError(f"relativistic scaling needs beta < 1, got beta={beta:g}")
    if not s.u_perpendicular_to_r():
        raise ValueError(
            "relativistic rows are defined only for u perpendicular to the separation"
        )
    k = s.constants
    _, f2 = rest_forces(s)
    scaled_charge_product = s.q1 * s.q2 / (1.0 - beta**2)
    coulomb_scaled = scaled_charge_product * s.r_vec / (4.0 * np.pi * k.eps0 * s.r**3)
    forces = {
        "rest": f2,
        "moving_with_motion_field": force_modified(s),
        "moving_without_motion_field": force_classical_naive(s),
        "relativistic_without_motion_field": coulomb_scaled * (1.0 - beta**2),
        "relativistic_with_motion_field": coulomb_scaled,
    }
    return ForceComparison(beta=beta, forces=forces)


def summarize(comparison: ForceComparison) -> str:
    """Human-readable companion to the CSV table."""
    lines = [
        f"beta = {comparison.beta:.6g}",
        "prediction                              |F|/|F_rest|",
    ]
    for name in PREDICTION_ORDER:
        lines.append(f"{name:<40}{comparison.ratio_to_rest(name):.12g}")
    lines.append(
        "note: the relativistic_with_motion_field row applies the charge-scaling"
        " recipe to the motion-field-complete force; it is an interpretation,"
        " not a printed formula."
    )
    return "\n".join(lines)

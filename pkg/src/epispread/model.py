"""Susceptible/infective epidemic dynamics with mutual-interference exponents.

The model couples a susceptible count x1 and an infective count x2 through

    dx1/dt = -beta * x1^m1 * x2^m2 - S(x1)
    dx2/dt =  beta * x1^m1 * x2^m2 - gamma * P(x2)

where beta is the per-contact infection parameter, gamma scales the recovery
term, the exponents m1 and m2 express mutual interference between the two
groups, S is a vaccination/control removal rate and P a recovery function.
S and P must satisfy S(0) >= 0, S non-decreasing, P(0) = 0, P non-decreasing.
Solutions form a well-posed dynamical system when m1 >= 1/2 and m2 >= 1/2;
those exponent ranges are what `validate_params` calls admissible.

For sublinear exponents (0 < m_k < 1) the substitution u_k = x_k^(1-m_k)
removes the sublinearity; `to_transformed`, `from_transformed` and
`transformed_rhs` implement that change of coordinates and the substituted
vector field.
"""

import math
from dataclasses import dataclass

from .errors import SingularityFault

__all__ = [
    "ControlSpec",
    "RecoverySpec",
    "ModelParams",
    "State",
    "TransformedState",
    "validate_params",
    "is_admissible",
    "rhs",
    "rate_of_spread",
    "to_transformed",
    "from_transformed",
    "transformed_rhs",
]


def _pow(b, e):
    """Real power with 0^positive = 0 and NaN for negative base, fractional
    exponent (Python's ** would promote those to complex)."""
    if b > 0.0:
        return math.pow(b, e)
    if b == 0.0:
        if e > 0.0:
            return 0.0
        if e == 0.0:
            return 1.0
        return math.inf
    if e == math.floor(e):
        return math.pow(b, e)
    return math.nan


@dataclass(frozen=True)
class ControlSpec:
    """Vaccination/control removal rate S(x1).

    Variants: "none" (S = 0), "constant" (S = u) and "saturating"
    (S = x1^p / (v + x1^p) with vaccination-effort constant v).
    """

    kind: str
    u: float = 0.0
    p: float = 1.0
    v: float = 1.0

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def constant(cls, u):
        return cls("constant", u=float(u))

    @classmethod
    def saturating(cls, p, v=1.0):
        return cls("saturating", p=float(p), v=float(v))

    def value(self, x1):
        if self.kind == "none":
            return 0.0
        if self.kind == "constant":
            return self.u
        if self.kind == "saturating":
            xp = _pow(x1, self.p)
            return xp / (self.v + xp)
        raise ValueError(f"unknown control kind {self.kind!r}")

    def violations(self):
        if self.kind == "none":
            return []
        if self.kind == "constant":
            return [] if self.u >= 0.0 else ["constant control rate u must be >= 0"]
        if self.kind == "saturating":
            out = []
            if not self.p > 0.0:
                out.append("saturating control exponent p must be > 0")
            if not self.v > 0.0:
                out.append("saturating control effort v must be > 0")
            return out
        return [f"unknown control kind {self.kind!r}"]


@dataclass(frozen=True)
class RecoverySpec:
    """Recovery function P(x2): "linear" (P = x2) or "power_law" (P = x2^q)."""

    kind: str
    q: float = 1.0

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def power_law(cls, q):
        return cls("power_law", q=float(q))

    def value(self, x2):
        if self.kind == "linear":
            return x2
        if self.kind == "power_law":
            return _pow(x2, self.q)
        raise ValueError(f"unknown recovery kind {self.kind!r}")

    def violations(self):
        if self.kind == "linear":
            return []
        if self.kind == "power_law":
            return [] if self.q > 0.0 else ["power-law recovery exponent q must be > 0"]
        return [f"unknown recovery kind {self.kind!r}"]


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the epidemic system."""

    beta: float
    gamma: float
    m1: float
    m2: float
    control: ControlSpec = ControlSpec.none()
    recovery: RecoverySpec = RecoverySpec.linear()


@dataclass(frozen=True)
class State:
    """Population state: susceptible count x1, infective count x2."""

    x1: float
    x2: float


@dataclass(frozen=True)
class TransformedState:
    """State in substituted coordinates u_k = x_k^(1-m_k)."""

    u1: float
    u2: float


def validate_params(params):
    """Collect admissibility violations; an empty list means admissible.

    Violations are data, not errors: every failed condition is reported, so
    callers can surface all problems at once.
    """
    out = []
    for name in ("beta", "gamma", "m1", "m2"):
        if not math.isfinite(getattr(params, name)):
            out.append(f"{name} must be finite")
    if not params.beta > 0.0:
        out.append("beta must be positive")
    if params.gamma < 0.0:
        out.append("gamma must be non-negative")
    if params.m1 < 0.5:
        out.append("m1 below 1/2")
    if params.m2 < 0.5:
        out.append("m2 below 1/2")
    out.extend(params.control.violations())
    out.extend(params.recovery.violations())
    return out


def is_admissible(params):
    return not validate_params(params)


def rhs(params, state):
    """Time derivative (dx1/dt, dx2/dt) of the epidemic system."""
    w = params.beta * _pow(state.x1, params.m1) * _pow(state.x2, params.m2)
    d1 = -w - params.control.value(state.x1)
    d2 = w - params.gamma * params.recovery.value(state.x2)
    return d1, d2


def rate_of_spread(params, state):
    """Instantaneous flow from susceptible to infective:
    beta * x1^m1 * x2^m2."""
    return params.beta * _pow(state.x1, params.m1) * _pow(state.x2, params.m2)


def _check_sublinear(params):
    for name in ("m1", "m2"):
        m = getattr(params, name)
        if not 0.0 < m < 1.0:
            raise ValueError(
                f"coordinate transform requires 0 < {name} < 1, got {m}"
            )


def to_transformed(state, params):
    """Map (x1, x2) to (u1, u2) = (x1^(1-m1), x2^(1-m2)).

    Only defined for 0 < m_k < 1; for m_k >= 1 the exponent 1-m_k is
    non-positive and the map is singular or undefined at zero.
    """
    _check_sublinear(params)
    if state.x1 < 0.0 or state.x2 < 0.0:
        raise ValueError("state must be non-negative")
    return TransformedState(
        _pow(state.x1, 1.0 - params.m1), _pow(state.x2, 1.0 - params.m2)
    )


def from_transformed(tstate, params):
    """Inverse map (u1, u2) -> (x1, x2) = (u1^(1/(1-m1)), u2^(1/(1-m2)))."""
    _check_sublinear(params)
    if tstate.u1 < 0.0 or tstate.u2 < 0.0:
        raise ValueError("transformed state must be non-negative")
    return State(
        _pow(tstate.u1, 1.0 / (1.0 - params.m1)),
        _pow(tstate.u2, 1.0 / (1.0 - params.m2)),
    )


def transformed_rhs(params, tstate):
    """Time derivative (du1/dt, du2/dt) of the substituted system.

    Substituting x_k = u_k^(1/(1-m_k)) into the epidemic equations gives

        du1/dt = -(1-m1) * [beta * u2^(m2/(1-m2))
                            + u1^(-m1/(1-m1)) * S(u1^(1/(1-m1)))]
        du2/dt =  (1-m2) * [beta * u1^(m1/(1-m1))
                            - gamma * u2^(-m2/(1-m2)) * P(u2^(1/(1-m2)))]

    The negative exponents make the field singular on the axes, so both
    coordinates must be strictly positive.
    """
    _check_sublinear(params)
    u1, u2 = tstate.u1, tstate.u2
    if u1 <= 0.0 or u2 <= 0.0:
        raise SingularityFault(
            f"transformed field is singular at u1={u1}, u2={u2}"
        )
    m1, m2 = params.m1, params.m2
    x1 = _pow(u1, 1.0 / (1.0 - m1))
    x2 = _pow(u2, 1.0 / (1.0 - m2))
    d1 = -(1.0 - m1) * (
        params.beta * _pow(u2, m2 / (1.0 - m2))
        + _pow(u1, -m1 / (1.0 - m1)) * params.control.value(x1)
    )
    d2 = (1.0 - m2) * (
        params.beta * _pow(u1, m1 / (1.0 - m1))
        - params.gamma * (_pow(u2, -m2 / (1.0 - m2)) * params.recovery.value(x2))
    )
    return d1, d2

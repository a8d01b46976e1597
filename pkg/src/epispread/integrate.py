"""Fixed-step RK4 integration of the epidemic system.

A fixed step (default h = 0.001) is used instead of an adaptive solver so
trajectories are exactly reproducible; identical inputs give bit-identical
output.  The inner stepping loop runs in the selected kernel backend.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import IntegrationFault, SingularityFault
from .model import to_transformed

__all__ = ["IntegrationConfig", "Trajectory", "integrate", "integrate_transformed"]

STOP_RULES = ("none", "stop_when_x1_nonpositive", "clamp_at_zero")

_CONTROL_CODES = {"none": 0, "constant": 1, "saturating": 2}
_RECOVERY_CODES = {"linear": 0, "power_law": 1}


@dataclass(frozen=True)
class IntegrationConfig:
    """Horizon, step size, output decimation and boundary stop rule.

    stop_rule:
      "none"                      run the full horizon, fault on non-finite
      "stop_when_x1_nonpositive"  truncate when a step would take x1 <= 0
      "clamp_at_zero"             clamp both components at zero each step
    """

    t_end: float
    step: float = 0.001
    sample_every: int = 1
    stop_rule: str = "none"

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if self.step >= self.t_end:
            raise ValueError("step must be smaller than t_end")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError("sample_every must be an integer >= 1")
        if self.stop_rule not in STOP_RULES:
            raise ValueError(
                f"stop_rule must be one of {STOP_RULES}, got {self.stop_rule!r}"
            )

    @property
    def n_steps(self):
        return int(round(self.t_end / self.step))


@dataclass
class Trajectory:
    """Sampled solution: times and matching (x1, x2) states.

    ``truncated_at`` records the time at which a stop rule fired, or None
    when the full horizon was integrated.
    """

    times: np.ndarray
    states: np.ndarray
    truncated_at: float | None = None

    @property
    def x1(self):
        return self.states[:, 0]

    @property
    def x2(self):
        return self.states[:, 1]

    def __len__(self):
        return len(self.times)

    def to_csv(self, path):
        """Write `t,x1,x2` rows at full double precision."""
        with open(path, "w") as fh:
            fh.write("t,x1,x2\n")
            for t, (a, b) in zip(self.times, self.states):
                fh.write(f"{t:.17g},{a:.17g},{b:.17g}\n")

    @classmethod
    def from_csv(cls, path):
        raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(times=raw[:, 0].copy(), states=raw[:, 1:3].copy())


def _kernel_args(params):
    ck = _CONTROL_CODES.get(params.control.kind)
    rk = _RECOVERY_CODES.get(params.recovery.kind)
    if ck is None:
        raise ValueError(f"unknown control kind {params.control.kind!r}")
    if rk is None:
        raise ValueError(f"unknown recovery kind {params.recovery.kind!r}")
    c = params.control
    return (
        params.beta, params.gamma, params.m1, params.m2,
        ck, c.u, c.p, c.v, rk, params.recovery.q,
    )


def _run(params, y1, y2, config, transformed):
    n_steps = config.n_steps
    if n_steps < 1:
        raise ValueError("horizon shorter than one step")
    max_samples = n_steps // config.sample_every + 1
    times = np.empty(max_samples, dtype=np.float64)
    states = np.empty((max_samples, 2), dtype=np.float64)
    count, status, event_step = kernels.integrate_si(
        *_kernel_args(params), y1, y2, config.step, n_steps,
        config.sample_every, STOP_RULES.index(config.stop_rule),
        1 if transformed else 0, times, states,
    )
    t_event = event_step * config.step
    if status == kernels.STATUS_NONFINITE:
        raise IntegrationFault(f"non-finite state at t={t_event:g}")
    if status == kernels.STATUS_SINGULAR:
        raise SingularityFault(
            f"transformed coordinate reached zero near t={t_event:g}"
        )
    truncated_at = t_event if status == kernels.STATUS_STOPPED else None
    return times[:count].copy(), states[:count].copy(), truncated_at


def integrate(params, init, config):
    """Integrate the epidemic system from ``init`` and sample the result.

    The first sample is t=0 with the initial state; thereafter every
    ``sample_every``-th RK4 step is emitted.  Raises IntegrationFault when
    the state leaves the finite range (e.g. a fractional power of a negative
    component under stop_rule "none").
    """
    if init.x1 < 0.0 or init.x2 < 0.0:
        raise ValueError("initial state must be non-negative")
    times, states, truncated_at = _run(params, init.x1, init.x2, config, False)
    return Trajectory(times=times, states=states, truncated_at=truncated_at)


def integrate_transformed(params, init, config):
    """Integrate in the substituted coordinates and map samples back.

    The stepping happens on (u1, u2) = (x1^(1-m1), x2^(1-m2)); every emitted
    sample is mapped back through x_k = u_k^(1/(1-m_k)).  Requires
    0 < m_k < 1 and a strictly positive initial state; raises
    SingularityFault if a transformed coordinate reaches zero.
    """
    if not (init.x1 > 0.0 and init.x2 > 0.0):
        raise ValueError("transformed integration needs a strictly positive state")
    u0 = to_transformed(init, params)
    times, ustates, truncated_at = _run(params, u0.u1, u0.u2, config, True)
    states = np.empty_like(ustates)
    states[:, 0] = np.power(ustates[:, 0], 1.0 / (1.0 - params.m1))
    states[:, 1] = np.power(ustates[:, 1], 1.0 / (1.0 - params.m2))
    # the t=0 sample is the caller's exact initial state, not a round trip
    states[0, 0] = init.x1
    states[0, 1] = init.x2
    return Trajectory(times=times, states=states, truncated_at=truncated_at)

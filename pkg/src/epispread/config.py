"""Flat `key = value` experiment configuration files.

Recognized keys: beta, gamma, m1, m2, control, recovery, u, v, p, q,
x1_0, x2_0, step, t_end, sample_every, stop_rule, seed.  Blank lines and
`#` comments are allowed; step defaults to 0.001, sample_every to 1,
stop_rule to none and seed to 0.  Three ready-made configurations ship with the
package and can be referenced by bare name: model1, model2 and rate1.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .integrate import IntegrationConfig
from .model import ControlSpec, ModelParams, RecoverySpec, State

__all__ = [
    "ExperimentConfig",
    "parse_config_text",
    "load_config",
    "builtin_config_path",
    "BUILTIN_CONFIGS",
]

BUILTIN_CONFIGS = ("model1", "model2", "rate1")

_KEYS = {
    "beta", "gamma", "m1", "m2", "control", "recovery", "u", "v", "p", "q",
    "x1_0", "x2_0", "step", "t_end", "sample_every", "stop_rule", "seed",
}
_REQUIRED = {"beta", "gamma", "m1", "m2", "x1_0", "x2_0", "t_end"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment file: model, initial state, integrator, master seed."""

    params: ModelParams
    init: State
    integration: IntegrationConfig
    seed: int


def parse_config_text(text, source="<string>"):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not value:
            raise ValueError(f"{source}:{lineno}: expected `key = value`, got {raw!r}")
        if key not in _KEYS:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    missing = _REQUIRED - entries.keys()
    if missing:
        raise ValueError(f"{source}: missing required keys {sorted(missing)}")

    def num(key, default=None):
        value = entries.get(key, default)
        if value is None:
            raise ValueError(f"{source}: key {key!r} is required here")
        return float(value)

    control_kind = entries.get("control", "none")
    if control_kind == "none":
        control = ControlSpec.none()
    elif control_kind == "constant":
        control = ControlSpec.constant(num("u"))
    elif control_kind == "saturating":
        control = ControlSpec.saturating(num("p"), num("v", default="1.0"))
    else:
        raise ValueError(f"{source}: unknown control {control_kind!r}")

    recovery_kind = entries.get("recovery", "linear")
    if recovery_kind == "linear":
        recovery = RecoverySpec.linear()
    elif recovery_kind == "powerlaw":
        recovery = RecoverySpec.power_law(num("q"))
    else:
        raise ValueError(f"{source}: unknown recovery {recovery_kind!r}")

    params = ModelParams(
        beta=num("beta"),
        gamma=num("gamma"),
        m1=num("m1"),
        m2=num("m2"),
        control=control,
        recovery=recovery,
    )
    init = State(x1=num("x1_0"), x2=num("x2_0"))
    integration = IntegrationConfig(
        t_end=num("t_end"),
        step=num("step", default="0.001"),
        sample_every=int(entries.get("sample_every", 1)),
        stop_rule=entries.get("stop_rule", "none"),
    )
    return ExperimentConfig(
        params=params,
        init=init,
        integration=integration,
        seed=int(entries.get("seed", 0)),
    )


def builtin_config_path(name):
    """Filesystem path of a shipped configuration."""
    name = name.removesuffix(".cfg")
    if name not in BUILTIN_CONFIGS:
        raise ValueError(f"no built-in config {name!r}; have {BUILTIN_CONFIGS}")
    return Path(resources.files("epispread") / "configs" / f"{name}.cfg")


def load_config(path_or_name):
    """Load a config file; bare built-in names resolve to the shipped files."""
    path = Path(path_or_name)
    if not path.exists() and str(path_or_name) in BUILTIN_CONFIGS:
        path = builtin_config_path(str(path_or_name))
    return parse_config_text(path.read_text(), source=str(path))

"""Strict JSON run-configuration parsing.

The document has sections grid, motion, one of params/dimensional,
initial, run, and optionally output.  Unknown keys are rejected at every
level and cross-field invariants are enforced after parsing.
"""

import json
import math
from dataclasses import dataclass, field

from . import params as params_mod
from .discretization import Grid
from .errors import ValidationError
from .geometry import MotionPreset
from .timestepper import (
    DEFAULT_CFL_SAFETY,
    DEFAULT_OUTPUT_EVERY,
    RunConfig,
)

_TOP_KEYS = {"grid", "motion", "params", "dimensional", "initial", "run", "output"}
_GRID_KEYS = {"Nx", "Ny"}
_MOTION_KEYS = {"kind", "a", "b", "v_tau", "H", "P_x"}
_PARAM_KEYS = {"delta_omega", "delta_gamma", "delta_gamma_p", "delta_k", "delta_kp"}
_DIM_KEYS = {"D_L", "D_Gamma", "D_GammaP", "k_on", "k_off", "L", "S", "U", "W", "Z"}
_RUN_KEYS = {"T_final", "cfl_safety", "output_every"}
_OUTPUT_KEYS = {"directory", "prefix", "snapshots"}
_FIELD_KEYS = {
    "constant": {"type", "value"},
    "gaussian": {"type", "center", "width", "height", "offset"},
    "expression": {"type", "formula"},
}


@dataclass
class OutputSpec:
    directory: str = "."
    prefix: str = "run"
    snapshots: bool = False


@dataclass
class ParsedConfig:
    run_config: RunConfig
    output: OutputSpec
    metadata: dict = field(default_factory=dict)


def _check_keys(section, doc, allowed, required=()):
    if not isinstance(doc, dict):
        raise ValidationError(f"section [{section}] must be an object")
    unknown = set(doc) - allowed
    if unknown:
        raise ValidationError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
        )
    missing = set(required) - set(doc)
    if missing:
        raise ValidationError(
            f"missing key(s) in [{section}]: {', '.join(sorted(missing))}"
        )


def _check_field_spec(name, spec):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValidationError(f"initial.{name} must be an object with a 'type' key")
    kind = spec["type"]
    if kind not in _FIELD_KEYS:
        raise ValidationError(
            f"initial.{name}.type must be one of {sorted(_FIELD_KEYS)}, got {kind!r}"
        )
    _check_keys(f"initial.{name}", spec, _FIELD_KEYS[kind])
    if kind == "constant" and "value" not in spec:
        raise ValidationError(f"initial.{name}: constant needs a 'value'")
    if kind == "gaussian":
        for k in ("center", "width", "height"):
            if k not in spec:
                raise ValidationError(f"initial.{name}: gaussian needs '{k}'")
    if kind == "expression" and "formula" not in spec:
        raise ValidationError(f"initial.{name}: expression needs a 'formula'")


def parse_config_dict(doc):
    """Validate a parsed JSON document and build the run configuration."""
    _check_keys("top level", doc, _TOP_KEYS, required=("grid", "motion", "initial", "run"))
    if ("params" in doc) == ("dimensional" in doc):
        raise ValidationError("exactly one of [params] or [dimensional] is required")

    _check_keys("grid", doc["grid"], _GRID_KEYS, required=_GRID_KEYS)
    _check_keys("motion", doc["motion"], _MOTION_KEYS, required={"kind"})
    _check_keys("run", doc["run"], _RUN_KEYS, required={"T_final"})
    _check_keys("initial", doc["initial"], {"u", "w", "z"}, required={"u", "w", "z"})
    for name in ("u", "w", "z"):
        _check_field_spec(name, doc["initial"][name])

    motion = dict(doc["motion"])
    motion.setdefault("H", 1.0)
    motion.setdefault("P_x", 2.0 * math.pi)
    preset = MotionPreset(**motion)
    grid = Grid(Nx=int(doc["grid"]["Nx"]), Ny=int(doc["grid"]["Ny"]), P_x=preset.P_x)

    metadata = {}
    if "params" in doc:
        _check_keys("params", doc["params"], _PARAM_KEYS, required=_PARAM_KEYS)
        sys_params = params_mod.SystemParameters(**doc["params"])
    else:
        _check_keys("dimensional", doc["dimensional"], _DIM_KEYS, required=_DIM_KEYS)
        dim = params_mod.DimensionalParameters(**doc["dimensional"])
        sys_params, gamma, gamma_p = params_mod.nondimensionalize(dim)
        metadata["nondimensionalized"] = {
            "delta_omega": sys_params.delta_omega,
            "delta_gamma": sys_params.delta_gamma,
            "delta_gamma_p": sys_params.delta_gamma_p,
            "delta_k": sys_params.delta_k,
            "delta_kp": sys_params.delta_kp,
            "gamma": gamma,
            "gamma_p": gamma_p,
        }

    run_sec = doc["run"]
    run_config = RunConfig(
        grid=grid,
        preset=preset,
        params=sys_params,
        T_final=float(run_sec["T_final"]),
        initial=doc["initial"],
        cfl_safety=float(run_sec.get("cfl_safety", DEFAULT_CFL_SAFETY)),
        output_every=float(run_sec.get("output_every", DEFAULT_OUTPUT_EVERY)),
    )

    output = OutputSpec()
    if "output" in doc:
        _check_keys("output", doc["output"], _OUTPUT_KEYS)
        sec = doc["output"]
        output = OutputSpec(
            directory=str(sec.get("directory", ".")),
            prefix=str(sec.get("prefix", "run")),
            snapshots=bool(sec.get("snapshots", False)),
        )
    return ParsedConfig(run_config=run_config, output=output, metadata=metadata)


def parse_config(path):
    """Read, validate, and build the run configuration from a JSON file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ValidationError(
            f"malformed JSON in {path} at line {err.lineno}: {err.msg}"
        ) from err
    try:
        return parse_config_dict(doc)
    except TypeError as err:
        raise ValidationError(str(err)) from err

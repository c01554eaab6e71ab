"""
Factory for a ready-to-use :class:`workfringe.core.RunConfig` instance.

Two entry points share one validation path:

* :meth:`ConfigMaker.make` - keyword switches, handy from Python;
* :meth:`ConfigMaker.from_file` / :meth:`ConfigMaker.from_mapping` - the JSON
  config file consumed by the ``workfringe`` CLI.

Example config
--------------
.. code-block:: json

    {
      "protocol": {"mode": "discrete", "omega_over_Omega": 1.5, "steps": 7},
      "beta": 1.2,
      "scheme": "split"
    }

Sweeps replace a single value by a list under ``sweep``::

    {"protocol": {"mode": "discrete", "steps": 7},
     "sweep": {"beta": [0.1, 0.5, 1.2], "omega_over_Omega": [0.5, 1.5, 3.0]}}

Every rejected input raises :class:`~workfringe.core.errors.ConfigError`.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .core import Preparation, RunConfig, Scheme
from .core.config import PROTOCOL_TYPE, REFERENCE_TAU, SWEEP_AXES, SWEEP_TYPE
from .core.errors import ConfigError

_TOP_KEYS = frozenset(
    {
        "protocol",
        "beta",
        "preparation",
        "scheme",
        "indices",
        "sweep",
        "output",
        "format",
        "threads",
        "inject_corruption",
    }
)
_PROTOCOL_KEYS = frozenset(
    {"mode", "omega_over_Omega", "Omega_over_omega", "tau", "steps", "dimension", "schedule"}
)
_SWEEP_KEYS = frozenset(SWEEP_AXES) | {"Omega_over_omega"}
_FORMATS = ("csv", "json")


# --------------------------------------------------------------------------- #
# Scalar checks
# --------------------------------------------------------------------------- #


def _positive(value: Any, label: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{label} must be a number, got {value!r}")
    number = float(value)
    if not (math.isfinite(number) and number > 0):
        raise ConfigError(f"{label} must be finite and > 0, got {value!r}")
    return number


def _count(value: Any, label: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{label} must be an integer, got {value!r}")
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{label} must be an integer, got {value!r}")
    if value < 1:
        raise ConfigError(f"{label} must be >= 1, got {value!r}")
    return int(value)


def _values(raw: Any, label: str) -> list[Any]:
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"sweep.{label} must be a list, got {type(raw).__name__}")
    if not raw:
        raise ConfigError(f"sweep.{label} is empty: nothing to evaluate")
    return list(raw)


def _unknown(data: Mapping[str, Any], allowed: frozenset[str], where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"Unknown {where} key(s): {', '.join(extra)}")


# --------------------------------------------------------------------------- #
# Protocol descriptor
# --------------------------------------------------------------------------- #


def _custom_steps(raw: Any, dimension: Any) -> tuple[list[tuple[np.ndarray, float]], int]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("protocol.schedule must be a non-empty list of {matrix, dt}")
    steps: list[tuple[np.ndarray, float]] = []
    dim: int | None = None if dimension is None else _count(dimension, "protocol.dimension")
    for k, item in enumerate(raw):
        if not isinstance(item, Mapping) or set(item) != {"matrix", "dt"}:
            raise ConfigError(f"protocol.schedule[{k}] must have exactly the keys matrix, dt")
        try:
            entries = np.asarray(item["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"protocol.schedule[{k}].matrix is not real: {exc}") from exc
        size = math.isqrt(entries.size)
        if size * size != entries.size or size == 0:
            raise ConfigError(
                f"protocol.schedule[{k}].matrix has {entries.size} entries, not a square"
            )
        if dim is None:
            dim = size
        elif size != dim:
            raise ConfigError(f"protocol.schedule[{k}] is {size}x{size}, expected {dim}x{dim}")
        if not np.all(np.isfinite(entries)):
            raise ConfigError(f"protocol.schedule[{k}].matrix has non-finite entries")
        steps.append((entries.reshape(size, size), _positive(item["dt"], f"schedule[{k}].dt")))
    assert dim is not None
    return steps, dim


def _protocol(
    raw: Mapping[str, Any], sweep: Mapping[str, Any]
) -> tuple[PROTOCOL_TYPE, SWEEP_TYPE]:
    """Normalise the protocol block; returns it together with the normalised sweep."""
    _unknown(raw, _PROTOCOL_KEYS, "protocol")
    _unknown(sweep, _SWEEP_KEYS, "sweep")
    out_sweep: SWEEP_TYPE = {}

    if "beta" in sweep:
        out_sweep["beta"] = [_positive(b, "sweep.beta") for b in _values(sweep["beta"], "beta")]

    if "schedule" in raw:
        clash = sorted({"omega_over_Omega", "Omega_over_omega", "tau", "steps"} & set(raw))
        clash += sorted({"omega_over_Omega", "Omega_over_omega", "steps"} & set(sweep))
        if clash:
            raise ConfigError(f"A custom schedule cannot be combined with {', '.join(clash)}")
        if raw.get("mode", "discrete") != "discrete":
            raise ConfigError("A custom schedule is always discrete")
        steps, dim = _custom_steps(raw["schedule"], raw.get("dimension"))
        protocol: PROTOCOL_TYPE = {
            "mode": "discrete",
            "schedule": steps,
            "dimension": dim,
            "tau": sum(dt for _, dt in steps),
        }
        return protocol, out_sweep

    if raw.get("dimension", 2) != 2:
        raise ConfigError(f"The rotation protocol is a qubit (dimension 2), got {raw['dimension']}")

    # Velocity: exactly one of omega_over_Omega / Omega_over_omega, either single or swept.
    given = [k for k in ("omega_over_Omega", "Omega_over_omega") if k in raw]
    swept = [k for k in ("omega_over_Omega", "Omega_over_omega") if k in sweep]
    if len(given) + len(swept) != 1:
        raise ConfigError(
            "Give exactly one of omega_over_Omega / Omega_over_omega "
            f"(protocol: {given or 'none'}, sweep: {swept or 'none'})"
        )
    if given:
        key = given[0]
        ratio = _positive(raw[key], f"protocol.{key}")
        ratios = [ratio if key == "omega_over_Omega" else 1.0 / ratio]
    else:
        key = swept[0]
        values = [_positive(v, f"sweep.{key}") for v in _values(sweep[key], key)]
        ratios = values if key == "omega_over_Omega" else [1.0 / v for v in values]
        out_sweep["omega_over_Omega"] = ratios

    tau = _positive(raw.get("tau", REFERENCE_TAU), "protocol.tau")

    if "steps" in raw and "steps" in sweep:
        raise ConfigError("steps given both in protocol and sweep")
    has_steps = "steps" in raw or "steps" in sweep
    mode = raw.get("mode", "discrete" if has_steps else "continuous")
    if mode not in ("discrete", "continuous"):
        raise ConfigError(f"protocol.mode must be 'discrete' or 'continuous', got {mode!r}")
    if mode == "continuous" and has_steps:
        raise ConfigError("A continuous protocol takes no steps")
    if mode == "discrete" and not has_steps:
        raise ConfigError("A discrete protocol needs steps (protocol.steps or sweep.steps)")

    protocol = {"mode": mode, "tau": tau, "dimension": 2}
    if not swept:
        protocol["omega_over_Omega"] = ratios[0]
    if "steps" in raw:
        protocol["steps"] = _count(raw["steps"], "protocol.steps")
    elif "steps" in sweep:
        out_sweep["steps"] = [_count(n, "sweep.steps") for n in _values(sweep["steps"], "steps")]
    else:
        protocol["steps"] = None
    return protocol, out_sweep


# --------------------------------------------------------------------------- #
# Factory
# --------------------------------------------------------------------------- #


class ConfigMaker:
    """Helper that builds a fully validated :class:`~workfringe.core.RunConfig`."""

    # pylint: disable=too-many-arguments
    @staticmethod
    def make(
        *,
        omega_over_Omega: float | None = None,
        Omega_over_omega: float | None = None,  # noqa: N803
        tau: float = REFERENCE_TAU,
        steps: int | None = None,
        schedule: Sequence[Mapping[str, Any]] | None = None,
        beta: float | None = None,
        preparation: Preparation | str = Preparation.THERMAL,
        scheme: Scheme | str = Scheme.SPLIT,
        indices: tuple[int, int] | None = None,
        sweep: Mapping[str, Sequence[Any]] | None = None,
        output: str | None = None,
        output_format: str = "csv",
        threads: int | None = None,
        inject_corruption: bool = False,
    ) -> RunConfig:
        """
        Assemble and return a :class:`~workfringe.core.RunConfig`.

        Parameters
        ----------
        omega_over_Omega, Omega_over_omega : float | None
            Protocol velocity; give one of them unless it is swept.
        tau : float
            Protocol duration; ``Ω = π / (2τ)``.
        steps : int | None
            Number of steps, ``None`` for the continuous rotation.
        schedule : list of {matrix, dt} | None
            Explicit real d-level schedule instead of the qubit rotation.
        beta : float | None
            Inverse temperature in ``(ħΩ)⁻¹``.
        sweep : mapping | None
            Lists for ``beta``, ``omega_over_Omega`` (or ``Omega_over_omega``)
            and ``steps``.
        inject_corruption : bool
            Test hook: corrupt one step so ``verify`` must fail.
        """
        protocol: dict[str, Any] = {"tau": tau}
        if schedule is not None:
            protocol = {"schedule": [dict(item) for item in schedule]}
        if omega_over_Omega is not None:
            protocol["omega_over_Omega"] = omega_over_Omega
        if Omega_over_omega is not None:
            protocol["Omega_over_omega"] = Omega_over_omega
        if steps is not None:
            protocol["steps"] = steps

        data: dict[str, Any] = {
            "protocol": protocol,
            "preparation": Preparation(preparation).value,
            "scheme": Scheme(scheme).value,
            "format": output_format,
            "inject_corruption": inject_corruption,
        }
        optional = {
            "beta": beta,
            "indices": None if indices is None else list(indices),
            "sweep": None if sweep is None else {k: list(v) for k, v in sweep.items()},
            "output": output,
            "threads": threads,
        }
        data.update({k: v for k, v in optional.items() if v is not None})
        return ConfigMaker.from_mapping(data)

    @staticmethod
    def from_file(path: str | Path) -> RunConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"Cannot read config {path}: {exc.strerror or exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from exc
        return ConfigMaker.from_mapping(data)

    @staticmethod
    def from_mapping(data: Any) -> RunConfig:
        """Validate a parsed config object and build the run description."""
        if not isinstance(data, Mapping):
            raise ConfigError(f"Config must be an object, got {type(data).__name__}")
        _unknown(data, _TOP_KEYS, "config")
        if "protocol" not in data or not isinstance(data["protocol"], Mapping):
            raise ConfigError("Config needs a 'protocol' object")

        sweep = data.get("sweep", {})
        if not isinstance(sweep, Mapping):
            raise ConfigError("sweep must be an object of lists")
        protocol, axes = _protocol(data["protocol"], sweep)

        beta: float | None = None
        if "beta" in data and "beta" in sweep:
            raise ConfigError("beta given both at top level and in sweep")
        if "beta" in data:
            beta = _positive(data["beta"], "beta")
        elif "beta" not in sweep:
            raise ConfigError("Config needs beta (or sweep.beta)")

        try:
            preparation = Preparation(data.get("preparation", Preparation.THERMAL.value))
            scheme = Scheme(data.get("scheme", Scheme.SPLIT.value))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        indices: tuple[int, int] | None = None
        if preparation is Preparation.PURE:
            raw = data.get("indices")
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise ConfigError("A pure preparation needs indices [n, m]")
            if any(isinstance(i, bool) or not isinstance(i, int) or i < 0 for i in raw):
                raise ConfigError(f"indices must be non-negative integers, got {raw!r}")
            dim = protocol["dimension"]
            if max(raw) >= dim:
                raise ConfigError(f"indices {raw!r} out of range for dimension {dim}")
            indices = (raw[0], raw[1])
        elif "indices" in data:
            raise ConfigError("indices only apply to a pure preparation")

        output_format = data.get("format", "csv")
        if output_format not in _FORMATS:
            raise ConfigError(f"format must be one of {', '.join(_FORMATS)}, got {output_format!r}")

        threads = data.get("threads")
        if threads is not None:
            threads = _count(threads, "threads")
        output = data.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigError(f"output must be a path string, got {output!r}")
        corruption = data.get("inject_corruption", False)
        if not isinstance(corruption, bool):
            raise ConfigError(f"inject_corruption must be a boolean, got {corruption!r}")

        return RunConfig(
            protocol=protocol,
            beta=beta,
            preparation=preparation,
            scheme=scheme,
            indices=indices,
            sweep=axes,
            output=output,
            output_format=output_format,
            threads=threads,
            inject_corruption=corruption,
        )

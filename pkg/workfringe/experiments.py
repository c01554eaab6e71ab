"""
Grid evaluation behind the CLI sub-commands.

:class:`ExperimentRunner` turns one :class:`~workfringe.core.RunConfig` into a
:class:`~workfringe.dataset.Dataset`. Grid points are independent and run on a
thread pool; results are gathered back in grid order, so the output does not
depend on the worker count.

Units of every table: ``beta`` in ``(ħΩ)⁻¹``, work and bounds in ``ħω``
(raw energy units for a custom schedule).
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar, cast

from .core import HamiltonianSchedule, OracleReport, Preparation, RunConfig, Scheme
from .core.config import REFERENCE_TAU
from .core.errors import ConfigError, NumericFailure
from .core.interfero import (
    FullForward,
    FullReversed,
    SchemeMode,
    SplitHalf,
    complementarity_report,
    detector_states,
    dissipation_bounds,
    reconstruct_work_distribution,
    run_pure,
    run_thermal,
    visibility_matrix,
)
from .core.matcore import hermitian_eig
from .core.oracle import run_audits
from .core.protocol import QubitRotationProtocol, custom_schedule
from .core.thermo import WorkDistribution, dissipative_work
from .dataset import Cell, Dataset

LOG = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

WORKDIST_COLUMNS = ["beta", "omega_over_Omega", "steps", "W_over_hbar_omega", "probability"]
BOUNDS_COLUMNS = [
    "beta",
    "omega_over_Omega",
    "steps",
    "W_diss",
    "B2",
    "Blog",
    "alpha",
    "V",
    "D_marginal",
    "B2_equality",
    "Blog_equality",
]
CONVERGENCE_COLUMNS = ["beta", "omega_over_Omega", "steps", "P0_difference"]
VERIFY_COLUMNS = ["check", "max_deviation", "threshold", "passed", "worst_point"]

COMMANDS = ("workdist", "bounds", "convergence", "verify")

_NORMALISATION_ATOL = 1e-10


def scheme_mode(scheme: Scheme) -> SchemeMode:
    if scheme is Scheme.SPLIT:
        return SplitHalf()
    if scheme is Scheme.FULL:
        return FullForward()
    return FullReversed()


@dataclass(frozen=True)
class _Point:
    """One grid point, labelled in config units and resolved to internal units."""

    beta_label: float
    ratio_label: float | str
    steps_label: int | None
    schedule: HamiltonianSchedule
    beta: float
    unit: float

    def labels(self) -> tuple[Cell, Cell, Cell]:
        return self.beta_label, self.ratio_label, self.steps_label

    def sort_key(self) -> tuple[float, float, float]:
        ratio = self.ratio_label if isinstance(self.ratio_label, float) else 0.0
        steps = math.inf if self.steps_label is None else float(self.steps_label)
        return self.beta_label, ratio, steps


class ExperimentRunner:
    """
    Facade running the sub-commands of one configuration.

    Call sequence
    -------------
    1. construct with a validated :class:`RunConfig` (see ``ConfigMaker``)
    2. :meth:`run` or one of the ``cmd_*`` methods -> :class:`Dataset`
    3. after ``verify``: :attr:`last_reports` holds the oracle reports
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.last_reports: list[OracleReport] = []

    # ------------------------------------------------------------------ #
    # Internals
    # ------------------------------------------------------------------ #

    @property
    def workers(self) -> int:
        return self.config.THREADS or os.cpu_count() or 1

    def _map(self, func: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Ordered map over a thread pool."""
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(func, items))

    def _points(self) -> list[_Point]:
        cfg = self.config
        if cfg.is_custom:
            schedule = custom_schedule(cfg.PROTOCOL["schedule"])
            points = [
                _Point(float(b), "custom", schedule.n_steps, schedule, float(b), 1.0)
                for b in cfg.axis("beta")
            ]
        else:
            tau = cfg.PROTOCOL.get("tau", REFERENCE_TAU)
            points = []
            for gp in cfg.grid():
                protocol = QubitRotationProtocol.from_ratio(gp.omega_over_Omega, tau, gp.steps)
                points.append(
                    _Point(
                        gp.beta,
                        gp.omega_over_Omega,
                        gp.steps,
                        protocol.schedule(),
                        gp.beta / protocol.Omega,
                        protocol.omega,
                    )
                )
        if not points:
            raise ConfigError("The configuration describes an empty grid")
        return sorted(points, key=_Point.sort_key)

    def _distribution(self, point: _Point) -> WorkDistribution:
        """Work distribution rebuilt from the interferometer visibilities."""
        schedule = point.schedule
        visibilities = visibility_matrix(schedule, scheme_mode(self.config.SCHEME))
        return reconstruct_work_distribution(
            visibilities, schedule.initial_hamiltonian, schedule.final_hamiltonian, point.beta
        )

    def _require_thermal(self, command: str) -> None:
        if self.config.PREPARATION is not Preparation.THERMAL:
            raise ConfigError(f"'{command}' needs a thermal preparation")

    # ------------------------------------------------------------------ #
    # Sub-commands
    # ------------------------------------------------------------------ #

    def cmd_workdist(self) -> Dataset:
        """
        ``(W, P(W))`` rows per grid point.

        With a pure preparation ``(n, m)`` each grid point yields the single
        transition ``W = E_m(τ) - E_n(0)`` weighted by ``V² = p_{m|n}``.
        """
        points = self._points()
        LOG.info("workdist: %d grid point(s) on %d worker(s)", len(points), self.workers)

        if self.config.PREPARATION is Preparation.PURE:
            assert self.config.INDICES is not None
            n, m = self.config.INDICES
            mode = scheme_mode(self.config.SCHEME)

            def transition(point: _Point) -> list[tuple[Cell, ...]]:
                schedule = point.schedule
                e0 = hermitian_eig(schedule.initial_hamiltonian).eigenvalues[n]
                e1 = hermitian_eig(schedule.final_hamiltonian).eigenvalues[m]
                v = run_pure(schedule, mode, n, m).visibility
                return [(*point.labels(), float(e1 - e0) / point.unit, v**2)]

            groups = self._map(transition, points)
        else:

            def distribution(point: _Point) -> list[tuple[Cell, ...]]:
                dist = self._distribution(point)
                return [
                    (*point.labels(), float(w) / point.unit, p) for w, p in dist.support
                ]

            groups = self._map(distribution, points)

        dataset = Dataset("workdist", WORKDIST_COLUMNS, [row for rows in groups for row in rows])
        if self.config.PREPARATION is Preparation.THERMAL:
            for key, total in distribution_sum(dataset).items():
                if abs(total - 1.0) > _NORMALISATION_ATOL:
                    raise NumericFailure(f"P(W) at {key} sums to {total!r}")
        return dataset

    def cmd_bounds(self) -> Dataset:
        """``<W_diss>`` against both visibility bounds, measured and equality variants."""
        self._require_thermal("bounds")
        points = self._points()
        mode = scheme_mode(self.config.SCHEME)
        LOG.info("bounds: %d grid point(s) on %d worker(s)", len(points), self.workers)

        def bounds(point: _Point) -> tuple[Cell, ...]:
            schedule, beta = point.schedule, point.beta
            htau = schedule.final_hamiltonian
            w_diss = dissipative_work(self._distribution(point))

            run = run_thermal(schedule, mode, beta)
            report = complementarity_report(run, detector_states(schedule, beta, mode))
            d_marginal = math.sqrt(max(report.d_marginal_squared, 0.0))
            measured = dissipation_bounds(run, beta, htau, allow_underflow=True)
            equality = dissipation_bounds(
                run, beta, htau, d_marginal=d_marginal, allow_underflow=True
            )
            unit = point.unit
            return (
                *point.labels(),
                w_diss / unit,
                measured.b2 / unit,
                measured.blog / unit,
                measured.alpha,
                measured.visibility,
                d_marginal,
                equality.b2 / unit,
                equality.blog / unit,
            )

        return Dataset("bounds", BOUNDS_COLUMNS, self._map(bounds, points))

    def cmd_convergence(self) -> Dataset:
        """``|P_N(W=0) - P_cont(W=0)|`` per velocity and step count."""
        self._require_thermal("convergence")
        if self.config.is_custom or self.config.is_continuous:
            raise ConfigError("'convergence' compares step protocols with the continuous one")
        points = self._points()
        LOG.info("convergence: %d grid point(s) on %d worker(s)", len(points), self.workers)

        references: dict[tuple[float, float | str], _Point] = {}
        for point in points:
            key = (point.beta_label, point.ratio_label)
            if key not in references:
                assert isinstance(point.ratio_label, float)
                tau = self.config.PROTOCOL.get("tau", REFERENCE_TAU)
                protocol = QubitRotationProtocol.from_ratio(point.ratio_label, tau)
                references[key] = _Point(
                    point.beta_label,
                    point.ratio_label,
                    None,
                    protocol.schedule(),
                    point.beta,
                    point.unit,
                )

        def p_zero(point: _Point) -> float:
            return self._distribution(point).probability_at(0.0)

        continuous = dict(zip(references, self._map(p_zero, references.values())))
        discrete = self._map(p_zero, points)
        rows = [
            (*point.labels(), abs(p - continuous[(point.beta_label, point.ratio_label)]))
            for point, p in zip(points, discrete)
        ]
        return Dataset("convergence", CONVERGENCE_COLUMNS, rows)

    def cmd_verify(self) -> Dataset:
        """
        Run every oracle audit over the grid.

        The reports are kept in :attr:`last_reports`; the caller decides the
        exit status from :attr:`OracleReport.passed`.
        """
        if self.config.is_custom:
            raise ConfigError("'verify' audits the qubit rotation protocol only")
        grid = self.config.grid()
        if not grid:
            raise ConfigError("The configuration describes an empty grid")
        tau = self.config.PROTOCOL.get("tau", REFERENCE_TAU)
        LOG.info("verify: %d grid point(s) on %d worker(s)", len(grid), self.workers)
        self.last_reports = run_audits(
            grid, corrupt=self.config.INJECT_CORRUPTION, mapper=self._map, tau=tau
        )
        failed = [r.name for r in self.last_reports if not r.passed]
        if failed:
            LOG.warning("verification failed: %s", ", ".join(failed))
        rows = [
            (r.name, r.deviation, r.threshold, r.passed, r.context) for r in self.last_reports
        ]
        return Dataset("verify", VERIFY_COLUMNS, rows)

    def run(self, command: str) -> Dataset:
        if command not in COMMANDS:
            raise ConfigError(f"Unknown command {command!r}; expected one of {COMMANDS}")
        handler: Callable[[], Dataset] = getattr(self, f"cmd_{command}")
        return handler()


def distribution_sum(dataset: Dataset) -> dict[tuple[Cell, Cell, Cell], float]:
    """Total probability per ``(beta, omega_over_Omega, steps)`` group of a workdist table."""
    sums: dict[tuple[Cell, Cell, Cell], float] = {}
    for row in dataset.rows:
        key = (row[0], row[1], row[2])
        sums[key] = sums.get(key, 0.0) + cast(float, row[4])
    return sums

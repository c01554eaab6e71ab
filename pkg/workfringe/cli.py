"""
workfringe CLI
==============

Command-line front-end around :py:mod:`workfringe`: simulate the work
interferometer over a parameter grid and write plotter-ready datasets.

Typical usage
-------------
>>> workfringe workdist --config fig3a.json --out fig3a.csv
>>> workfringe bounds --config fig3b.json --format json --out fig3b.json
>>> workfringe convergence --config fig3c.json
>>> workfringe verify --config grid.json --threads 8

Exit status
-----------
* **0** - success
* **1** - at least one verification check failed (``verify`` only)
* **2** - the config file is missing, malformed or out of range
* **3** - a numerical contract was violated

Datasets go to ``--out`` (or standard output); logs and the verification
table go to standard error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from numpy.linalg import LinAlgError
from rich.console import Console
from rich.logging import RichHandler

from workfringe import ConfigMaker, ExperimentRunner
from workfringe.color import HighlighterPipeline
from workfringe.color.stages import VerdictHighlighter
from workfringe.core.errors import ConfigError, WorkFringeError
from workfringe.experiments import COMMANDS
from workfringe.table_render import make_report_renderer

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _make_highlighter(disable_color: bool) -> HighlighterPipeline:
    """Empty pipeline for ``--no-color``, otherwise the verdict stage."""
    if disable_color:
        return HighlighterPipeline([])
    return HighlighterPipeline([VerdictHighlighter()])


def _setup_logging(verbosity: int, console: Console) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=False)
    root = logging.getLogger("workfringe")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def _build_parser() -> argparse.ArgumentParser:
    """
    Construct the :pyclass:`argparse.ArgumentParser` for the CLI.

    Every sub-command takes the same options; what differs is the table it
    writes.
    """
    p = argparse.ArgumentParser(
        prog="workfringe",
        description="Interferometric simulation of quantum work distributions",
    )
    p.add_argument(
        "command",
        choices=COMMANDS,
        help="workdist: P(W) per grid point; bounds: <W_diss> vs B2/Blog; "
        "convergence: |P_N(0) - P_cont(0)|; verify: oracle audits",
    )
    p.add_argument("--config", required=True, help="Path to the JSON run configuration")

    # Output options
    p.add_argument("--out", default=None, help="Output path (default: config 'output' or stdout)")
    p.add_argument(
        "--format",
        choices=("csv", "json"),
        default=None,
        help="Dataset format (default: config 'format' or csv)",
    )
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Worker threads for the grid (default: available parallelism)",
    )
    p.add_argument(
        "--no-color",
        action="store_true",
        help="Disable ANSI colors even if the terminal supports them",
    )
    p.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress (-v) or numerical details (-vv) to standard error",
    )
    return p


def main(argv: list[str] | None = None) -> int:
    """
    CLI entry-point (``workfringe`` console script).

    Parameters
    ----------
    argv :
        Argument vector **excluding** the executable name; ``sys.argv[1:]``
        when *None*.

    Returns
    -------
    int
        The exit status (also passed to :func:`sys.exit` by the script).
    """
    args = _build_parser().parse_args(argv)
    err = Console(stderr=True, no_color=args.no_color, highlight=False)
    _setup_logging(args.verbose, err)
    log = logging.getLogger("workfringe.cli")

    try:
        # 1. Build and override the configuration
        config = ConfigMaker.from_file(args.config)
        if args.format is not None:
            config.FORMAT = args.format
        if args.out is not None:
            config.OUTPUT = args.out
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"--threads must be >= 1, got {args.threads}")
            config.THREADS = args.threads
        log.debug("%r", config)

        # 2. Evaluate the grid
        runner = ExperimentRunner(config)
        dataset = runner.run(args.command)
    except ConfigError as exc:
        err.print(f"workfringe: config error: {exc}", markup=False)
        return EXIT_CONFIG
    except (WorkFringeError, LinAlgError) as exc:
        err.print(f"workfringe: numeric failure: {exc}", markup=False)
        return EXIT_NUMERIC

    # 3. Write the dataset
    if config.OUTPUT:
        try:
            path = dataset.write(config.OUTPUT, config.FORMAT)
        except OSError as exc:
            err.print(f"workfringe: cannot write {config.OUTPUT}: {exc}", markup=False)
            return EXIT_CONFIG
        log.info("wrote %d row(s) to %s", len(dataset), path)
    else:
        sys.stdout.write(dataset.render(config.FORMAT))

    # 4. Verification verdict
    if args.command == "verify":
        renderer = make_report_renderer(colorize_pipeline=_make_highlighter(args.no_color))
        err.print(renderer.rich_render(runner.last_reports))
        if not all(r.passed for r in runner.last_reports):
            return EXIT_VERIFY_FAILED
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

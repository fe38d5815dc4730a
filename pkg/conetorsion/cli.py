"""The ``torsionctl`` command line tool.

Usage::

    torsionctl spectrum --k 2 --cutoff 100 --out s.txt
    torsionctl green --k 1 --degree 0 --flavor absolute --checks all
    torsionctl heat --k 2 --times 0.05,0.2,1.0 --pairs 20 --seed 7
    torsionctl torsion --circle --L 6.2831853
    torsionctl torsion --spindle --k 2 --compare

Exit codes: 0 all checks passed, 1 usage error, 2 check failure, 3 numerical
failure.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

from conetorsion import __version__
from conetorsion.cohomology import harmonic_dim_check
from conetorsion.coneCalculus import cone_indices
from conetorsion.defaults import defaults
from conetorsion.greenKernels import (RadialKernel, boundary_residuals,
                                      fit_and_validate_bound, jump_condition_check,
                                      kernel_rows, ode_residual, sample_bound_pairs,
                                      symmetry_residual)
from conetorsion.heatKernels import duhamel_compare, make_solver, sample_pairs
from conetorsion.linkSpectrum import (circle_quotient_spectrum, load_spectrum,
                                      sphere_spectrum, validate_spectrum,
                                      weyl_count_deviation, write_spectrum)
from conetorsion.runConfig import CHECKS, build_config
from conetorsion.status import NumericalError, SpectrumValidationError, ZetaPoleError
from conetorsion.zetaTorsion import (circle_torsion, spindle_residue_check,
                                     spindle_torsion, torsion_compare)

logger = logging.getLogger(__name__)

EXIT_CODES = {"pass": 0, "usage": 1, "check": 2, "numerical": 3}

_GREEN_TOLERANCE = 1e-10
_CIRCLE_TOLERANCE = 1e-6


class UsageError(Exception):
    """Invalid command line."""


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Check:
    """A named check with its measured value and tolerance.

    Attributes:
        name (str): check name
        measured (float): measured value
        tolerance (float): threshold
        passed (bool): verdict
        relation (str): ``"<="`` or ``">"`` between measured and tolerance
    """

    name: str
    measured: float
    tolerance: float
    passed: bool
    relation: str = "<="

    @classmethod
    def below(cls, name, measured, tolerance):
        return cls(name, float(measured), float(tolerance), bool(measured <= tolerance))

    @classmethod
    def above(cls, name, measured, tolerance):
        return cls(name, float(measured), float(tolerance), bool(measured > tolerance), ">")

    def to_dict(self):
        return {"name": self.name, "measured": self.measured, "tolerance": self.tolerance,
                "passed": self.passed, "relation": self.relation}


@dataclass
class Report:
    """Result of one subcommand.

    Attributes:
        command (str): subcommand
        config (dict): configuration echo
        checks (list): :py:class:`Check` instances
        payload (dict): computed data
        version (str): package version
    """

    command: str
    config: dict
    checks: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self):
        """bool: True if every check passed."""
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self):
        """int: 0 if all checks passed, else 2."""
        return EXIT_CODES["pass"] if self.passed else EXIT_CODES["check"]

    def to_dict(self):
        return {"command": self.command, "config": self.config, "version": self.version,
                "checks": [check.to_dict() for check in self.checks],
                "passed": self.passed, "payload": self.payload}

    def to_json(self):
        """Serialize with sorted keys."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=_json_default)

    def to_text(self):
        """Plain text table of the checks."""
        lines = ["torsionctl %s %s" % (self.command, self.version)]
        for check in self.checks:
            lines.append("%-28s %-4s %.6g %s %.3g" % (
                check.name, "PASS" if check.passed else "FAIL", check.measured,
                check.relation, check.tolerance))
        return "\n".join(lines)


def _json_default(value):
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "item"):
        return value.item()
    raise TypeError("Cannot serialize %r" % (value,))


def _spectrum_for(config, cutoff):
    if config.m is not None and config.m > 1:
        return sphere_spectrum(config.m, cutoff)
    return circle_quotient_spectrum(config.k or 1, cutoff)


def cmd_spectrum(config):
    """Build, load, validate and write link spectra."""
    report = Report("spectrum", config.echo())
    try:
        if config.load:
            spectrum = load_spectrum(config.load)
        else:
            spectrum = _spectrum_for(config, config.cutoff or 100.0)
    except SpectrumValidationError as err:
        report.checks.append(Check.below("validation", len(err.violations), 0))
        report.payload["violations"] = err.violations
        return report

    violations = validate_spectrum(spectrum)
    report.checks.append(Check.below("validation", len(violations), 0))
    if spectrum.m == 1:
        report.checks.append(Check.below("weyl deviation", weyl_count_deviation(spectrum),
                                         1.0 + 1e-9))
    if config.out:
        write_spectrum(spectrum, config.out)
    degrees = range(spectrum.m + 1)
    report.payload = {
        "m": spectrum.m,
        "k": spectrum.group_order,
        "cutoff": spectrum.cutoff,
        "families": len(spectrum),
        "families_by_degree": {str(i): len(spectrum.families(i)) for i in degrees},
        "harmonic": {str(i): spectrum.harmonic_dimension(i) for i in degrees},
        "violations": violations,
    }
    return report


def _green_indices(config):
    """Cone indices of the built-in link modes of the selected degree."""
    m = config.m or 1
    if config.degree > m:
        raise ValueError("Invalid degree %d for m=%d" % (config.degree, m))
    spectrum = _spectrum_for(config, config.cutoff or 100.0)
    indices = []
    for mode in spectrum.families(config.degree):
        if mode.kind == "exact":
            continue
        candidate = cone_indices(m, config.degree, mode.eigenvalue)
        try:
            RadialKernel(candidate, config.flavor)
        except (ArithmeticError, ValueError) as err:
            logger.info("skipping mu=%s: %s", mode.eigenvalue, err)
            continue
        indices.append(candidate)
    return indices


def cmd_green(config):
    """Evaluate Green kernels and check their identities."""
    report = Report("green", config.echo())
    indices = _green_indices(config)
    flavor = config.flavor
    radii = [j / 101.0 for j in range(1, 101)]

    if "boundary" in config.checks and flavor != "model":
        # the boundary condition holds for mu > 0 (absolute) and nu > 0 (relative)
        constrained = [ind for ind in indices
                       if (ind.mu if flavor == "absolute" else ind.nu) > 0]
        worst = max((boundary_residuals(ind, flavor) for ind in constrained), default=0.0)
        report.checks.append(Check.below("boundary", worst, _GREEN_TOLERANCE))
    if "jump" in config.checks:
        worst = 0.0
        for ind in indices:
            for r in radii:
                scale = max(1.0, r ** (2 * ind.degree - ind.m))
                worst = max(worst, jump_condition_check(ind, flavor, r) / scale)
        report.checks.append(Check.below("jump", worst, _GREEN_TOLERANCE))
    if "ode" in config.checks:
        worst = max((ode_residual(ind, flavor) for ind in indices), default=0.0)
        report.checks.append(Check.below("ode", worst, _GREEN_TOLERANCE))
    if "symmetry" in config.checks:
        worst = max((symmetry_residual(ind, flavor) for ind in indices), default=0.0)
        report.checks.append(Check.below("symmetry", worst, _GREEN_TOLERANCE))
    if "bound" in config.checks and (config.m or 1) == 1 and config.degree == 0:
        bound = fit_and_validate_bound(config.k or 1, flavor, seed=config.seed)
        report.checks.append(Check.below("bound violations", bound["violations"], 0))
        report.payload["bound"] = bound

    if config.dump:
        if (config.m or 1) != 1:
            raise ValueError("Kernel dumps are available for m=1 only")
        k = config.k or 1
        spectrum = circle_quotient_spectrum(k, float(k * k))
        pairs = sample_bound_pairs(k, config.pairs, config.seed)
        with open(config.dump, "w", newline="", encoding="utf-8") as dump_file:
            writer = csv.writer(dump_file)
            writer.writerow(("flavor", "r1", "theta1", "r2", "theta2", "value", "tail_bound"))
            writer.writerows(kernel_rows(spectrum, config.degree, flavor, pairs))
    report.payload["modes"] = len(indices)
    return report


def cmd_heat(config):
    """Compare the conical and the orbifold heat kernel of the flat cone."""
    report = Report("heat", config.echo())
    k = config.k or 1
    parameters = {}
    if config.method == "stepping":
        parameters = {"dt": config.dt, "h": config.h, "ratio": config.grid_ratio}
    solver = make_solver(config.method, t_max=max([1.0] + config.times), **parameters)
    pairs = sample_pairs(k, config.pairs, config.seed)
    grid = duhamel_compare(k, config.times, pairs, config.method, solver)
    report.checks.append(Check.below("sup relative discrepancy", grid.sup_rel_discrepancy,
                                     defaults["torsion"]["tolerance"]))
    report.payload = grid.to_dict()
    if config.emit_plot_data:
        with open(config.emit_plot_data, "w", newline="", encoding="utf-8") as plot_file:
            writer = csv.writer(plot_file)
            writer.writerow(("t", "dist", "K_c", "K_o"))
            writer.writerows(grid.plot_rows())
    return report


def cmd_torsion(config):
    """Circle torsion, spindle torsion, its comparison and the residue check."""
    report = Report("torsion", config.echo())
    tolerance = defaults["torsion"]["tolerance"]
    if config.circle:
        length = config.length or 2 * math.pi
        result = circle_torsion(length, config.zeta_method)
        report.checks.append(Check.below("circle log T + log L",
                                         abs(result.log_tc + math.log(length)),
                                         _CIRCLE_TOLERANCE))
        report.payload["circle"] = result.to_dict()
    elif config.spindle:
        k = config.k or 2
        if config.residue_check:
            residue = spindle_residue_check(k, config.cutoff)
            control = spindle_residue_check(k, config.cutoff, control=True)
            report.checks.append(Check.below("residue |b|", abs(residue.b), residue.tolerance))
            report.checks.append(Check.above("control |b|", abs(control.b),
                                             10 * residue.tolerance))
            report.payload["residue"] = residue.to_dict()
            report.payload["control"] = control.to_dict()
        if config.compare:
            result = torsion_compare(k, config.cutoff, config.levels)
            report.checks.append(Check.below("|log Tc - log To|", result.discrepancy,
                                             tolerance))
            report.payload["compare"] = result.to_dict()
        elif not config.residue_check:
            result, _ = spindle_torsion(k, config.cutoff or defaults["torsion"]["cutoff"])
            report.payload["spindle"] = result.to_dict()
        harmonic = harmonic_dim_check(k)
        report.checks.append(Check.below("harmonic dimension mismatches",
                                         len(harmonic.failures), 0))
        report.payload["harmonic"] = harmonic.to_dict()
    else:
        raise UsageError("torsion needs --circle or --spindle")
    return report


COMMANDS = {"spectrum": cmd_spectrum, "green": cmd_green, "heat": cmd_heat,
            "torsion": cmd_torsion}


def _checks(value):
    if value == "all":
        return list(CHECKS)
    return [item.strip() for item in value.split(",") if item.strip()]


def _floats(value):
    return [float(item) for item in value.split(",") if item.strip()]


def build_parser():
    """Create the argument parser; unset flags are absent from the namespace."""
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--quiet", action="store_true", help="log errors only")
    common.add_argument("--verbose", action="store_true", help="log progress")
    common.add_argument("--seed", type=int, help="seed of the point sampling")
    common.add_argument("--threads", type=int, help="worker thread cap")
    common.add_argument("--out", help="output path")
    common.add_argument("--k", type=int, help="group order")
    common.add_argument("--cutoff", type=float, help="eigenvalue truncation")

    parser = _Parser(prog="torsionctl", description="Conical and orbifold torsion checks")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest="command")

    spectrum = subparsers.add_parser("spectrum", parents=[common], help="link spectra",
                                     argument_default=argparse.SUPPRESS)
    spectrum.add_argument("--m", type=int, help="sphere dimension")
    spectrum.add_argument("--load", help="spectrum file to read")
    spectrum.add_argument("--validate", action="store_true", help="validate the spectrum")

    green = subparsers.add_parser("green", parents=[common], help="Green kernels",
                                  argument_default=argparse.SUPPRESS)
    green.add_argument("--m", type=int, help="link dimension")
    green.add_argument("--degree", type=int, help="form degree")
    green.add_argument("--flavor", help="model, absolute or relative")
    green.add_argument("--checks", type=_checks, help="comma separated checks or all")
    green.add_argument("--boundary-check", dest="checks", action="store_const",
                       const=["boundary"], help="boundary condition only")
    green.add_argument("--pairs", type=int, help="pairs of the kernel dump")
    green.add_argument("--dump", help="kernel CSV path")

    heat = subparsers.add_parser("heat", parents=[common], help="heat kernel comparison",
                                 argument_default=argparse.SUPPRESS)
    heat.add_argument("--times", type=_floats, help="comma separated times")
    heat.add_argument("--pairs", type=int, help="number of point pairs")
    heat.add_argument("--method", help="solver, stepping or bessel")
    heat.add_argument("--dt", type=float, help="stepping time step")
    heat.add_argument("--h", type=float, help="stepping grid spacing")
    heat.add_argument("--grid-ratio", type=float, help="stepping grading ratio")
    heat.add_argument("--emit-plot-data", help="t,dist,K_c,K_o CSV path")

    torsion = subparsers.add_parser("torsion", parents=[common], help="analytic torsion",
                                    argument_default=argparse.SUPPRESS)
    torsion.add_argument("--circle", action="store_true", help="circle torsion")
    torsion.add_argument("--L", dest="length", type=float, help="circle circumference")
    torsion.add_argument("--spindle", action="store_true", help="flat spindle")
    torsion.add_argument("--compare", action="store_true", help="conical against orbifold")
    torsion.add_argument("--residue-check", action="store_true", help="fit the log t term")
    torsion.add_argument("--levels", type=int, help="cutoff levels")
    torsion.add_argument("--method", dest="zeta_method", help="closed or mellin")
    return parser


def _configure_logging(config):
    level = logging.WARNING
    if config.verbose:
        level = logging.INFO
    if config.quiet:
        level = logging.ERROR
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _emit(report, config):
    if config.out and config.command != "spectrum":
        with open(config.out, "w", encoding="utf-8") as out_file:
            out_file.write(report.to_json() + "\n")
    if config.json:
        print(report.to_json())
    elif not config.quiet:
        print(report.to_text())


def main(argv=None):
    """Run ``torsionctl``.

    Args:
        argv (list): arguments without the program name, sys.argv if None

    Returns:
        int: exit code
    """
    try:
        args = vars(build_parser().parse_args(argv))
        command = args.pop("command", None)
        if command is None:
            raise UsageError("missing subcommand")
        path = args.pop("config", None)
        config = build_config(command, args, path)
    except (UsageError, ValueError, OSError) as err:
        print("torsionctl: error: %s" % err, file=sys.stderr)
        return EXIT_CODES["usage"]

    _configure_logging(config)
    if config.threads is not None:
        os.environ["TORSIONCTL_THREADS"] = str(config.threads)
    try:
        report = COMMANDS[command](config)
        _emit(report, config)
    except (NumericalError, ZetaPoleError) as err:
        logger.error("numerical failure: %s", err)
        return EXIT_CODES["numerical"]
    except (UsageError, ValueError, OSError) as err:
        logger.error("%s", err)
        return EXIT_CODES["usage"]
    except ArithmeticError as err:
        logger.error("numerical failure: %s", err)
        return EXIT_CODES["numerical"]
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

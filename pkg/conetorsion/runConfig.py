"""Run configuration of the ``torsionctl`` command line tool.

A configuration file is an INI file with a ``[general]`` section and one
section per subcommand::

    [general]
    seed = 7
    json = yes

    [heat]
    k = 2
    times = 0.05, 0.2, 1.0
    pairs = 20

Values given on the command line override the file.
"""

import configparser
import logging
from dataclasses import asdict, dataclass, field, fields

from conetorsion.greenKernels import FLAVORS
from conetorsion.heatKernels import METHODS

logger = logging.getLogger(__name__)

COMMANDS = ("spectrum", "green", "heat", "torsion")

CHECKS = ("boundary", "jump", "ode", "symmetry", "bound")


def _float_list(value):
    if isinstance(value, str):
        return [float(item) for item in value.replace(",", " ").split()]
    return [float(item) for item in value]


def _str_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return list(value)


@dataclass
class RunConfig:
    """Parameters of one ``torsionctl`` run.

    Attributes:
        command (str): subcommand, one of :py:data:`COMMANDS`
        k (int): group order of the circle quotient or spindle
        m (int): link dimension of a round sphere spectrum
        degree (int): form degree
        cutoff (float): eigenvalue truncation
        flavor (str): Green kernel flavor
        checks (list): Green kernel checks
        times (list): heat kernel times
        pairs (int): number of sampled point pairs
        method (str): heat kernel mode method
        dt (float): stepping solver time step
        h (float): stepping solver grid spacing
        grid_ratio (float): stepping solver grading ratio
        length (float): circle circumference
        circle (bool): circle torsion
        spindle (bool): spindle torsion
        compare (bool): conical against orbifold torsion
        residue_check (bool): fit the log t coefficient
        levels (int): cutoff levels of the extrapolation
        zeta_method (str): ``"closed"`` or ``"mellin"`` circle torsion
        load (str): spectrum file to read
        validate (bool): validate the spectrum
        out (str): report or spectrum output path
        dump (str): Green kernel CSV path
        emit_plot_data (str): heat kernel CSV path
        seed (int): seed of the point sampling
        threads (int): worker cap
        json (bool): JSON report
        quiet (bool): errors only
        verbose (bool): info logging
    """

    command: str = None
    k: int = None
    m: int = None
    degree: int = 0
    cutoff: float = None
    flavor: str = "model"
    checks: list = field(default_factory=lambda: list(CHECKS))
    times: list = field(default_factory=lambda: [0.05, 0.2, 1.0])
    pairs: int = 20
    method: str = "solver"
    dt: float = None
    h: float = None
    grid_ratio: float = None
    length: float = None
    circle: bool = False
    spindle: bool = False
    compare: bool = False
    residue_check: bool = False
    levels: int = None
    zeta_method: str = "closed"
    load: str = None
    validate: bool = False
    out: str = None
    dump: str = None
    emit_plot_data: str = None
    seed: int = 0
    threads: int = None
    json: bool = False
    quiet: bool = False
    verbose: bool = False

    def validated(self):
        """Check the ranges of all parameters.

        Returns:
            RunConfig: self

        Raises:
            ValueError: naming the first invalid parameter
        """
        if self.command not in COMMANDS:
            raise ValueError("Unknown command: %s" % self.command)
        if self.k is not None and (int(self.k) != self.k or self.k < 1):
            raise ValueError("Invalid group order k: %s" % self.k)
        if self.m is not None and self.m < 1:
            raise ValueError("Invalid link dimension m: %s" % self.m)
        if self.degree < 0:
            raise ValueError("Invalid degree: %s" % self.degree)
        if self.cutoff is not None and self.cutoff <= 0:
            raise ValueError("Invalid cutoff: %s" % self.cutoff)
        if self.flavor not in FLAVORS:
            raise ValueError("Unknown flavor: %s" % self.flavor)
        for check in self.checks:
            if check not in CHECKS:
                raise ValueError("Unknown check: %s" % check)
        if not self.times or any(t <= 0 for t in self.times):
            raise ValueError("Invalid times: %s" % self.times)
        if self.pairs < 1:
            raise ValueError("Invalid number of pairs: %s" % self.pairs)
        if self.method not in METHODS:
            raise ValueError("Unknown method: %s" % self.method)
        for name in ("dt", "h", "length"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError("Invalid %s: %s" % (name, value))
        if self.grid_ratio is not None and self.grid_ratio <= 1:
            raise ValueError("Invalid grid_ratio: %s" % self.grid_ratio)
        if self.levels is not None and self.levels < 1:
            raise ValueError("Invalid levels: %s" % self.levels)
        if self.zeta_method not in ("closed", "mellin"):
            raise ValueError("Unknown zeta method: %s" % self.zeta_method)
        if self.threads is not None and self.threads < 1:
            raise ValueError("Invalid threads: %s" % self.threads)
        return self

    def merged(self, overrides):
        """Copy with the non-None values of a mapping applied."""
        values = asdict(self)
        for key, value in overrides.items():
            if key in values and value is not None:
                values[key] = value
        return RunConfig(**values)

    def echo(self):
        """dict: Configuration as echoed in reports (output switches removed)."""
        data = asdict(self)
        for key in ("json", "quiet", "verbose"):
            data.pop(key)
        return data


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(parser, section, key):
    kind = _TYPES[key]
    if kind is bool:
        return parser.getboolean(section, key)
    if kind is int:
        return parser.getint(section, key)
    if kind is float:
        return parser.getfloat(section, key)
    value = parser.get(section, key)
    if key == "times":
        return _float_list(value)
    if key == "checks":
        return _str_list(value)
    return value


def read_config(path, command):
    """Read the ``[general]`` and the command section of a config file.

    Args:
        path (str): INI file path
        command (str): subcommand

    Returns:
        dict: parsed values by field name.

    Raises:
        ValueError: for unknown keys or malformed values
        OSError: if the file cannot be read
    """
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as cfg_file:
        parser.read_file(cfg_file)
    values = {}
    for section in ("general", command):
        if not parser.has_section(section):
            continue
        for key in parser.options(section):
            if key not in _TYPES or key == "command":
                raise ValueError("Unknown key %r in section [%s]" % (key, section))
            values[key] = _convert(parser, section, key)
    logger.debug("config %s: %s", path, sorted(values))
    return values


def build_config(command, flags, path=None):
    """Combine defaults, an optional config file and command line flags.

    Args:
        command (str): subcommand
        flags (dict): parsed flags, None meaning not given
        path (str): config file

    Returns:
        RunConfig: validated configuration.
    """
    config = RunConfig(command=command)
    if path:
        config = config.merged(read_config(path, command))
    return config.merged(flags).validated()

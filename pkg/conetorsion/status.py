"""Status codes and exceptions of the numerical routines.

Solvers and fits report an integer status code together with a message.
The codes follow one convention:

* ``0`` means ok,
* ``>0`` means ok, but with a side effect (reported as a warning),
* ``<0`` means error (raised as :py:class:`NumericalError`).

Attributes:
    STATUS_CODES (dict): dict which maps status names as strs to their int
                         code
"""

import logging
import warnings

logger = logging.getLogger(__name__)

STATUS_CODES = {
    "ok": 0,
    "truncated": 1,
    "ill conditioned": 2,
    "not converged": -1,
    "singular": -2,
    "inconsistent": -3,
}


class NumericalError(ArithmeticError):
    """A solver, root finder or fit failed.

    Attributes:
        diagnostics (dict): measured quantities at the time of failure
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ZetaPoleError(ArithmeticError):
    """The continued zeta function was evaluated at a pole.

    Attributes:
        s (complex): location of the pole
        residue (float): residue of the zeta function at ``s``
    """

    def __init__(self, s, residue):
        super().__init__("Pole at s=%s with residue %.6g" % (s, residue))
        self.s = s
        self.residue = residue


class UnsupportedContinuationError(NotImplementedError):
    """A continued value was requested from a series without expansion."""


class SpectrumParseError(ValueError):
    """A spectrum file line could not be parsed.

    Attributes:
        line_no (int): 1-based line number of the offending line
    """

    def __init__(self, line_no, message):
        super().__init__("line %d: %s" % (line_no, message))
        self.line_no = line_no


class SpectrumValidationError(ValueError):
    """A spectrum violates its invariants.

    Attributes:
        violations (list): human readable violations
    """

    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class InconsistentRanksError(ValueError):
    """Supplied ranks violate exactness of a long exact sequence.

    Attributes:
        term (str): first term of the sequence where exactness fails
    """

    def __init__(self, term, message):
        super().__init__("%s: %s" % (term, message))
        self.term = term


def status_name(code):
    """Translate a status code to its name.

    Args:
        code (int): status code

    Returns:
        str: key of :py:data:`STATUS_CODES`

    Raises:
        ValueError: if the code is unknown
    """
    for key, value in STATUS_CODES.items():
        if value == code:
            return key

    raise ValueError("Unknown status code: %d" % code)


def check_status(code, message, diagnostics=None):
    """Check the status reported by a numerical routine.

    Args:
        code (int or str): status code or key of :py:data:`STATUS_CODES`
        message (str): description of what happened
        diagnostics (dict): measured quantities attached to a raised error

    Returns:
        int: the status code

    Raises:
        NumericalError: if the code is negative
    """
    if isinstance(code, str):
        code = STATUS_CODES[code]

    if code != 0:
        status_str = '[' + str(code) + ']: ' + status_name(code) + ', ' + message
        if code > 0:
            logger.debug(status_str)
            warnings.warn(status_str)
        else:
            raise NumericalError(status_str, diagnostics)

    return code

"""Exception hierarchy shared by the library and the CLI.

Every exception carries a short machine-readable ``code`` which the CLI
prints in its ``error,<code>,<message>`` line.
"""


class GaborError(Exception):
    code = "error"


class DimensionError(GaborError, ValueError):
    code = "dimension"


class InvalidParameterError(GaborError, ValueError):
    code = "invalid-parameter"


class InvalidSupportError(InvalidParameterError):
    code = "invalid-support"


class ResourceError(GaborError):
    code = "resource"


class IllConditionedSupportError(GaborError, ArithmeticError):
    code = "ill-conditioned-support"


class DivergenceError(GaborError, ArithmeticError):
    code = "divergence"

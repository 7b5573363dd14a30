"""Exception taxonomy shared across the package.

Argument and domain violations raise plain ``ValueError``; the classes
here cover failures that map to dedicated process exit codes.
"""


class ConfigError(Exception):
    """Invalid run configuration (bad field value, malformed config file)."""


class NumericalError(Exception):
    """A numerical routine failed to meet its accuracy contract."""

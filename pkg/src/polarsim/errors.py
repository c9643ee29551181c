"""Exception hierarchy shared by every polarsim module."""


class PolarSimError(Exception):
    """Base class for all errors raised by polarsim."""


class ParameterError(PolarSimError, ValueError):
    """An argument is out of range or inconsistent with the code/scheme."""


class FrozenMaskFormatError(ParameterError):
    """A frozen-mask file could not be parsed or contradicts its header."""


class ConfigError(ParameterError):
    """Invalid TOML or environment configuration."""


class ContentionError(PolarSimError, RuntimeError):
    """Channel memory is still in use by the frame being decoded."""


class AddressError(PolarSimError, IndexError):
    """A simulated memory access falls outside the declared geometry."""

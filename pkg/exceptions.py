"""Error hierarchy for the class module toolkit."""


class TaelmanError(Exception):
    """Base class for every error raised by this project."""


class FieldError(TaelmanError, ValueError):
    """Mismatched or invalid finite field data."""


class ParseError(TaelmanError, ValueError):
    """A polynomial or rational literal could not be parsed."""


class ModuleSpecError(TaelmanError, ValueError):
    """Malformed Drinfeld module or matrix input file."""


class ConfigError(TaelmanError, ValueError):
    """Invalid configuration or command-line parameters."""


class PrecisionError(TaelmanError):
    """A Laurent window was requested outside the exactly known range."""


class CertificateNotFound(TaelmanError):
    """The exponential tail certificate needs more coefficients."""


class ResourceGuardExceeded(TaelmanError):
    """A configured size or time limit was hit."""


class InconclusiveCertificate(TaelmanError):
    """A certificate could neither be confirmed nor refuted."""


class ConsistencyError(TaelmanError):
    """An identity that must hold failed; this signals a bug."""

"""Exception types shared across the library."""


class ZeroSumError(Exception):
    """Base class for library-specific failures."""


class PolicyDomainError(ZeroSumError):
    """A behavior policy is missing an entry for a reachable information set."""


class EnumerationCapError(ZeroSumError):
    """Reduced-normal-form enumeration would exceed the configured cap."""


class CertificationError(ZeroSumError):
    """An LP solution failed its equilibrium certificate; never returned silently."""


class ConfigError(ZeroSumError):
    """An experiment configuration is malformed or incomplete."""

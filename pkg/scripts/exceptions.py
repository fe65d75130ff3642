# scripts/exceptions.py


class FlockError(Exception):
    """Base class for every error raised by the flock package"""


class ConfigurationError(FlockError, ValueError):
    """Rejected model, boundary, leader or run configuration"""


class NormalizationError(ConfigurationError):
    """Parameters violate the necessary stability conditions"""

    def __init__(self, violated):
        self.violated = list(violated)
        super().__init__("not normalizable, violated: " + ", ".join(self.violated))


class StateDimensionError(FlockError, ValueError):
    """State vector length does not match the system"""


class IntegrationFailure(FlockError):
    """Integration stopped early; carries the last valid time"""

    def __init__(self, message, last_time):
        self.message = message
        self.last_time = float(last_time)
        super().__init__(f"{message} (last valid t={self.last_time:.15g})")


class MetricsError(FlockError, ValueError):
    """Feature extraction could not be carried out"""


class InsufficientFeaturesError(MetricsError):
    """Too few crossings or extrema for period and attenuation"""


class WaveCheckError(FlockError, ValueError):
    """Snapshot window unusable for pulse tracking or wave reconstruction"""

from terranalog.exception.terranalog_error import TerranalogError


class ConfigError(TerranalogError):
    """Exception raised for unknown keys, bad values or unreadable config files."""

from terranalog.exception.raster_error import GridFormatError


class GraphFormatError(GridFormatError):
    """Exception raised when a serialized terrain graph cannot be parsed."""

class TerranalogError(ValueError):
    """Base class for every error raised by the retrieval pipeline."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)

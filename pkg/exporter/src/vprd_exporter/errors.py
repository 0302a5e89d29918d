class ExporterError(Exception):
    """Base class for everything this tool raises deliberately."""


class CorpusError(ExporterError):
    """Corpus directory or image content is unusable."""


class ModelError(ExporterError):
    """Model weights could not be obtained or do not fit the architecture."""

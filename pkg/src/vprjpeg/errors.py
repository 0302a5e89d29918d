"""Exception classes shared across the harness.

DataError covers everything wrong with user-supplied inputs (manifests,
corpora, descriptor files); the CLI maps it to exit code 3. Bad command
configuration is exit 2, anything unexpected is exit 4.
"""


class DataError(Exception):
    """A problem with input data (files, manifests, streams)."""


class ManifestError(DataError):
    """Manifest file is missing, unparsable, or violates its invariants."""


class DecodeError(DataError):
    """An image stream could not be decoded."""


class EncodeError(DataError):
    """An image could not be encoded."""


class VPRDFormatError(DataError):
    """A descriptor interchange file is malformed."""


class ConfigError(Exception):
    """Invalid command configuration beyond what argparse catches."""

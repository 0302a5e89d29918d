"""Deep descriptor export to the VPRD interchange format."""

__version__ = "0.1.0"

from .errors import CorpusError, ExporterError, ModelError
from .export import ExportJob, export_descriptors
from .model import available_layers, available_models, load_extractor
from .writer import write_vprd

__all__ = [
    "CorpusError",
    "ExporterError",
    "ExportJob",
    "ModelError",
    "available_layers",
    "available_models",
    "export_descriptors",
    "load_extractor",
    "write_vprd",
]

"""Bridge between live PyTorch models and the iat descriptor/weight formats."""

from .walk import ExportResult, ImportReport, export_model, import_weights
from .zoo import available_models, create_model

__version__ = "0.1.0"

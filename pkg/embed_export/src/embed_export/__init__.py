from .export import ExportConfig, ExportError, export, load_documents

__all__ = ["ExportConfig", "ExportError", "export", "load_documents"]
__version__ = "0.1.0"

"""Convert upstream dataset releases into the neutral directory format."""

from .convert import SourceSpec, ConvertError, convert

__version__ = "0.1.0"
__all__ = ["SourceSpec", "ConvertError", "convert", "__version__"]

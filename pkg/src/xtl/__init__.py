"""XTL templates: instantiation, validation against templates read as schemas, and
a partial-derivatives NFA builder for plain regular expressions."""

from .errors import XtlError
from .instantiate import instantiate_document, instantiate_start
from .models import doc_to_xtl, normalize_reg, xtl_to_doc, xtl_to_reg
from .query import QueryContext, XPathPlugin
from .validate import ValidationResult, matches, validate_document
from .xmlcore import canonicalize, parse_document, serialize_document

__all__ = [
    "XtlError", "instantiate_document", "instantiate_start", "doc_to_xtl", "xtl_to_doc",
    "xtl_to_reg", "normalize_reg", "QueryContext", "XPathPlugin", "ValidationResult",
    "matches", "validate_document", "canonicalize", "parse_document", "serialize_document",
]

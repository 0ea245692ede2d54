"""tfai: asset-driven threat modeling engine for AI-based systems."""

__version__ = "0.1.0"

from .kb import (  # noqa: F401
    KnowledgeBase,
    SecurityObjective,
    load_kb,
    validate_kb,
)
from .diagram import parse_diagram, extract_asset_annotations  # noqa: F401
from .stencils import generate_stencil_library, DEFAULT_ANNOTATION_KEY  # noqa: F401
from .engine import analyze, canonical_json, report_to_dict  # noqa: F401
from .reporting import RenderOptions, render  # noqa: F401
from .evaluation import compute_coverage, load_baseline  # noqa: F401

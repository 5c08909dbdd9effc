"""Corpus-scale accessibility auditing for Jupyter notebooks.

Pipeline stages: notebook validation and coercion (``nbmodel``), code
analysis (``codeanalysis``), per-notebook accessibility metrics
(``metrics``), themed HTML export (``htmlexport``), rule-based scanning
(``a11yrules``), PNG alt-text embedding (``altpng``), and corpus reporting
(``report``). ``pipeline`` wires them together; ``cli`` exposes the
``nbaudit`` command.
"""

from .a11yrules import A11yFinding, ScanResult, contrast_ratio, scan, theme_comparison
from .altpng import embed_alt, extract_alt
from .codeanalysis import parse_and_extract, rank_usage, strip_magics
from .htmlexport import HtmlDocument, export_corpus, export_html
from .metrics import NotebookMetrics, SizeThresholds, compute_metrics, size_risk
from .nbmodel import (
    Cell,
    ImageArtifact,
    Notebook,
    OutputBundle,
    ValidityError,
    classify_mime,
    extract_images,
    filter_language,
    parse_notebook,
)
from .pipeline import RunConfig, run_audit
from .report import AuditRecord, CorpusReport, aggregate, emit, merge
from .themes import Theme, load_theme, load_themes

__version__ = "0.1.0"

__all__ = [
    "A11yFinding",
    "AuditRecord",
    "Cell",
    "CorpusReport",
    "HtmlDocument",
    "ImageArtifact",
    "Notebook",
    "NotebookMetrics",
    "OutputBundle",
    "RunConfig",
    "ScanResult",
    "SizeThresholds",
    "Theme",
    "ValidityError",
    "aggregate",
    "classify_mime",
    "compute_metrics",
    "contrast_ratio",
    "embed_alt",
    "emit",
    "export_corpus",
    "export_html",
    "extract_alt",
    "extract_images",
    "filter_language",
    "load_theme",
    "load_themes",
    "merge",
    "parse_and_extract",
    "parse_notebook",
    "rank_usage",
    "run_audit",
    "scan",
    "size_risk",
    "strip_magics",
    "theme_comparison",
]

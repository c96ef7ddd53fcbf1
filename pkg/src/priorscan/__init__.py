"""Content-addressed scanner that splits a source tree into known and
unknown artifacts by querying a knowledge base of SWHIDs."""

from .discovery import (Partition, ScanStats, Strategy, baseline_discovery,
                        layered_discovery, strategy_discovery)
from .ids import (DirEntry, DuplicateEntryError, EntryMode, NodeId, NodeKind,
                  SwhidError, blob_id, dir_id, parse_swhid, render_swhid)
from .kb import (InMemoryKb, KbBackend, KbError, KbFormatError, KbSet,
                 load_kb_file, save_kb_file)
from .remote import HttpKb, KbHttpError, KbProtocolError, KbTransportError, http_backend
from .report import partition_from_report, render_json, render_text
from .simulate import (CoverageSpec, build_full_kb, check_merkle_consistency,
                       coverage_label, coverage_ladder, degrade_kb)
from .tree import (MerkleNode, ScanConfig, ScanError, SourceTree, build_tree,
                   tree_from_root)

__version__ = "0.1.0"

__all__ = [
    "Partition", "ScanStats", "Strategy", "baseline_discovery",
    "layered_discovery", "strategy_discovery",
    "DirEntry", "DuplicateEntryError", "EntryMode", "NodeId", "NodeKind",
    "SwhidError", "blob_id", "dir_id", "parse_swhid", "render_swhid",
    "InMemoryKb", "KbBackend", "KbError", "KbFormatError", "KbSet",
    "load_kb_file", "save_kb_file",
    "HttpKb", "KbHttpError", "KbProtocolError", "KbTransportError",
    "http_backend",
    "partition_from_report", "render_json", "render_text",
    "CoverageSpec", "build_full_kb", "check_merkle_consistency",
    "coverage_label", "coverage_ladder", "degrade_kb",
    "MerkleNode", "ScanConfig", "ScanError", "SourceTree", "build_tree",
    "tree_from_root",
    "__version__",
]

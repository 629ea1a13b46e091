"""Weight sequences, weight functions and weight matrices at finite truncation."""
from .errors import WeightlabError
from .verdict import Trend, Verdict
from .seqcore import LogSeq, RelationKind, RelationResult

__version__ = "0.1.0"

__all__ = ["LogSeq", "RelationKind", "RelationResult", "Trend", "Verdict", "WeightlabError"]

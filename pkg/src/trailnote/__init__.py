"""Interaction-trail analysis for entity-cited notes.

The package covers the full path from raw interaction events to
characterized insights: ingestion and filtering of event logs, frequent
subsequence mining, per-note feature assembly, participant-disjoint model
training and evaluation, Shapley feature attribution, nonparametric
statistics, a cohort simulator, and an HTTP service over a durable note
store.
"""

from .actions import ActionTaxonomy, default_taxonomy, load_taxonomy
from .errors import TrailnoteError
from .events import EntityKey, InteractionEvent
from .notes import Note, NoteLabels
from .refs import EntityRef

__version__ = "0.1.0"

__all__ = [
    "ActionTaxonomy",
    "EntityKey",
    "EntityRef",
    "InteractionEvent",
    "Note",
    "NoteLabels",
    "TrailnoteError",
    "__version__",
    "default_taxonomy",
    "load_taxonomy",
]

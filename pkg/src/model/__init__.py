"""Parameter records, initial states and errors shared by every module.

Public API
----------
Records:  FeedbackConfig, CoherentSuperposition, TimeGrid
States:   cat_state, coherent, vacuum, overlap
"""

from model.schema import CoherentSuperposition, FeedbackConfig, TimeGrid, overlap
from model.states import cat_normalization, cat_state, coherent, vacuum

__all__ = [
    "FeedbackConfig",
    "CoherentSuperposition",
    "TimeGrid",
    "overlap",
    "cat_normalization",
    "cat_state",
    "coherent",
    "vacuum",
]

"""Annotation clients: the protocol, a deterministic mock, and an HTTP adapter."""

from .base import (
    GATE_LOW_VISUAL_QUALITY,
    GATE_NOT_SINGLE_OBJECT,
    GATE_REASONS,
    AnnotationClient,
    GateResult,
    PointSelection,
    PropertyEstimate,
    SelectionBounds,
)
from .mock import MATERIAL_FRICTION, MockAnnotationClient, auto_fixture

__all__ = [
    "AnnotationClient",
    "GateResult",
    "PropertyEstimate",
    "PointSelection",
    "SelectionBounds",
    "GATE_NOT_SINGLE_OBJECT",
    "GATE_LOW_VISUAL_QUALITY",
    "GATE_REASONS",
    "MockAnnotationClient",
    "MATERIAL_FRICTION",
    "auto_fixture",
]

"""Simulator and checker for an auditable-restoration protocol on spanning trees."""

from .model import Configuration, Mode, ModelError, ProcState, Status, Topology

__all__ = ["Configuration", "Mode", "ModelError", "ProcState", "Status", "Topology"]
__version__ = "0.1.0"

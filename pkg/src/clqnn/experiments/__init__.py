"""Desk-scale studies built on the simulator core.

toy: loss/gradient scaling scans over qubit count, with optional
depolarizing noise and a choice of initial-angle distribution.
ising: variational ground-state search for the transverse-field Ising
chain with shot-noise gradients.
wine: binary classification of angle-embedded tabular data.
"""

from __future__ import annotations

from .toy import ToyScanConfig, ScanRow, build_ansatz, toy_loss, toy_scan, rows_to_csv
from .ising import IsingResult, ising_experiment
from .wine import (
    DataError,
    WineConfig,
    WineDataset,
    WineResult,
    classification_error,
    classification_experiment,
    load_wine,
    qml_grad,
    qml_loss,
    qubit_embed,
)

__all__ = [
    "ToyScanConfig", "ScanRow", "build_ansatz", "toy_loss", "toy_scan",
    "rows_to_csv", "IsingResult", "ising_experiment", "DataError",
    "WineConfig", "WineDataset", "WineResult", "classification_error",
    "classification_experiment", "load_wine", "qml_grad", "qml_loss",
    "qubit_embed",
]

"""Penalized cost matrix tying the fit matrix to the facility-location solve.

Rows are the packable shipments (in scan order) plus one fake row per locked
box. A fake shipment ships for free in its locked box and at the penalty cost
everywhere else, which forces that box into any sub-penalty suite. The penalty
is one more than the sum of per-row maxima over fitting costs, so any suite
covering all packables (locked boxes included) costs strictly less than a
single penalty entry; coverage failures and lock violations are therefore
detectable from the objective value alone.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

import numpy as np

from boxsuite.fitmatrix import PackableSet
from boxsuite.model import BoxSet, CandidateBox, DataError, Shipment

__all__ = [
    "CostModel",
    "InnerVolumeCost",
    "BoxTableCost",
    "PairTableCost",
    "CostMatrix",
    "build_cost_matrix",
    "load_box_cost_table",
    "load_pair_cost_table",
    "save_cost_matrix",
    "load_cost_matrix",
    "export_sparse_costs",
]


class CostModel(Protocol):
    model_id: str

    def cost_for(self, shipment: Shipment, box: CandidateBox) -> float: ...


class InnerVolumeCost:
    """Ship each order at the box's inner volume; the paper-style default."""

    model_id = "inner-volume"

    def cost_for(self, shipment: Shipment, box: CandidateBox) -> float:
        return box.volume


class BoxTableCost:
    """Per-box cost table (outer volume, material weight, unit price, ...)."""

    model_id = "box-table"

    def __init__(self, table: dict[int, float]):
        self.table = dict(table)

    def cost_for(self, shipment: Shipment, box: CandidateBox) -> float:
        try:
            return self.table[box.id]
        except KeyError as exc:
            raise DataError(f"cost table has no entry for box {box.id}") from exc


class PairTableCost:
    """Externally supplied cost per (shipment, box) pair."""

    model_id = "pair-table"

    def __init__(self, table: dict[tuple[int, int], float]):
        self.table = dict(table)

    def cost_for(self, shipment: Shipment, box: CandidateBox) -> float:
        try:
            return self.table[(shipment.id, box.id)]
        except KeyError as exc:
            raise DataError(
                f"cost table has no entry for shipment {shipment.id}, box {box.id}"
            ) from exc


def load_box_cost_table(path: str | Path) -> BoxTableCost:
    return BoxTableCost(dict(_read_cost_rows(path, 2)))


def load_pair_cost_table(path: str | Path) -> PairTableCost:
    return PairTableCost({(s, b): c for (s, b), c in _read_cost_rows(path, 3)})


def _read_cost_rows(path: str | Path, ncols: int):
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh), start=1):
            if not cells:
                continue
            if lineno == 1 and not _is_float(cells[-1]):
                continue  # header
            if len(cells) != ncols:
                raise DataError(f"{path}:{lineno}: expected {ncols} columns")
            try:
                ids = tuple(int(c) for c in cells[:-1])
                cost = float(cells[-1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: malformed cost row") from exc
            out.append((ids if len(ids) > 1 else ids[0], cost))
    return out


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


@dataclass(frozen=True)
class CostMatrix:
    C: np.ndarray  # (I_hat + k) x J
    gamma: float
    fake_rows: int
    locked: tuple[int, ...]  # box indices, one per fake row
    row_shipment_ids: tuple[int, ...]  # real rows only
    model_id: str = "inner-volume"

    @property
    def n_real(self) -> int:
        return self.C.shape[0] - self.fake_rows

    def __post_init__(self):
        if self.fake_rows != len(self.locked):
            raise DataError("one fake row per locked box required")
        if len(self.row_shipment_ids) != self.C.shape[0] - self.fake_rows:
            raise DataError("row id count does not match real row count")


def build_cost_matrix(
    shipments: Sequence[Shipment],
    packables: PackableSet,
    boxes: BoxSet,
    model: Optional[CostModel] = None,
    locked: Sequence[int] = (),
) -> CostMatrix:
    """Assemble the penalized cost matrix from fitting sets and a cost model.

    Model costs must be nonnegative and finite; under that precondition no
    fitting entry can reach the penalty (the penalty exceeds the sum of all
    per-row maxima), so the sub-penalty structure the coverage argument needs
    holds by construction.
    """
    if model is None:
        model = InnerVolumeCost()
    locked = tuple(locked)
    if len(set(locked)) != len(locked):
        raise DataError("locked box indices must be unique")
    for t in locked:
        if not 0 <= t < len(boxes):
            raise DataError(f"locked box index {t} out of range")

    I_hat, J = packables.I_hat, len(boxes)
    fitted = np.zeros((I_hat, J), dtype=np.float64)
    row_max = np.zeros(I_hat)
    for r, i in enumerate(packables.W):
        shipment = shipments[i]
        best = 0.0
        for j in packables.fitting_boxes[i]:
            c = float(model.cost_for(shipment, boxes[j]))
            if not math.isfinite(c) or c < 0:
                raise DataError(
                    f"cost model produced invalid cost {c!r} for shipment "
                    f"{shipment.id}, box {boxes[j].id}")
            fitted[r, j] = c
            best = max(best, c)
        row_max[r] = best
    gamma = float(row_max.sum()) + 1.0

    C = np.full((I_hat + len(locked), J), gamma, dtype=np.float64)
    for r, i in enumerate(packables.W):
        js = list(packables.fitting_boxes[i])
        C[r, js] = fitted[r, js]
    for f, t in enumerate(locked):
        C[I_hat + f, t] = 0.0
    ids = tuple(shipments[i].id for i in packables.W)
    return CostMatrix(C=C, gamma=gamma, fake_rows=len(locked), locked=locked,
                      row_shipment_ids=ids, model_id=getattr(model, "model_id", "?"))


# -- persistence -----------------------------------------------------------------


def save_cost_matrix(cm: CostMatrix, path: str | Path,
                     boxes: Optional[BoxSet] = None) -> None:
    path = Path(path)
    np.savez_compressed(
        path, C=cm.C, gamma=np.array([cm.gamma]), fake_rows=np.array([cm.fake_rows]),
        locked=np.array(cm.locked, dtype=np.int64),
        row_shipment_ids=np.array(cm.row_shipment_ids, dtype=np.int64))
    manifest = {
        "gamma": cm.gamma,
        "fake_rows": cm.fake_rows,
        "locked_box_ids": [boxes[t].id for t in cm.locked] if boxes is not None
                          else list(cm.locked),
        "model_id": cm.model_id,
        "shape": list(cm.C.shape),
    }
    manifest_path = path.with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


def load_cost_matrix(path: str | Path) -> CostMatrix:
    path = Path(path)
    if not path.suffix:
        path = path.with_suffix(".npz")
    data = np.load(path)
    manifest_path = path.with_suffix(".manifest.json")
    model_id = "?"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        model_id = manifest.get("model_id", "?")
        if manifest.get("shape") and tuple(manifest["shape"]) != data["C"].shape:
            raise DataError("cost matrix manifest disagrees on shape")
    return CostMatrix(
        C=data["C"], gamma=float(data["gamma"][0]),
        fake_rows=int(data["fake_rows"][0]),
        locked=tuple(int(t) for t in data["locked"]),
        row_shipment_ids=tuple(int(s) for s in data["row_shipment_ids"]),
        model_id=model_id)


def export_sparse_costs(cm: CostMatrix, path: str | Path, boxes: BoxSet) -> None:
    """Write only the sub-penalty entries as shipment_id,box_id,cost rows."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["shipment_id", "box_id", "cost"])
        for r in range(cm.n_real):
            sid = cm.row_shipment_ids[r]
            for j in np.nonzero(cm.C[r] < cm.gamma)[0]:
                w.writerow([sid, boxes[int(j)].id, repr(float(cm.C[r, j]))])

"""
Run Output
Tabelas com cabeçalho de proveniência (pandas), documentos JSON e arquivos de disparos.
"""

import hashlib
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .. import __version__
from ..analysis import ShotRecord
from ..errors import ScenarioError
from .engine import PointResult
from .scenario import Scenario, canonical_json

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json-lines")
FLOAT_FORMAT = "%.10g"
SHOT_COLUMNS = ("shot_index", "sweep_value", "outcome", "counts")

# unidade por nome-base de coluna; numéricas sem entrada são adimensionais
COLUMN_UNITS = {
    "time": "us",
    "duration": "us",
    "analysis_phase": "rad",
    "nbar": "quanta",
    "pulse": "index",
    "point_index": "index",
    "shot_index": "index",
    "counts": "photons",
}
TEXT_COLUMNS = ("source", "note", "outcome")

# sufixo da chave do cenário → unidade do valor varrido
SUFFIX_UNITS = {
    "_mhz": "MHz",
    "_khz": "kHz",
    "_hz": "Hz",
    "_us": "us",
    "_ms": "ms",
    "_s": "s",
    "_mw": "mW",
    "_um": "um",
    "_rad": "rad",
    "_deg": "deg",
    "_db": "dB",
    "_per_s": "1/s",
}


def config_hash(scenario: Scenario) -> str:
    """sha256 do cenário canônico (chaves ordenadas)"""
    return hashlib.sha256(canonical_json(scenario).encode("utf-8")).hexdigest()


def sweep_unit(variable: Optional[str]) -> str:
    if not variable:
        return "1"
    for suffix in sorted(SUFFIX_UNITS, key=len, reverse=True):
        if variable.endswith(suffix):
            return SUFFIX_UNITS[suffix]
    return "1"


def labelled(column: str, sweep_variable: Optional[str] = None) -> str:
    """Nome da coluna com a unidade entre colchetes"""
    if column in TEXT_COLUMNS:
        return column
    if column == "sweep_value":
        return f"sweep_value [{sweep_unit(sweep_variable)}]"
    return f"{column} [{COLUMN_UNITS.get(column, '1')}]"


def unlabelled(column: str) -> str:
    return column.split(" [", 1)[0]


def plain(value: Any) -> Any:
    """Converte numpy/tuplas em tipos JSON; NaN e inf viram None"""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if value is pd.NA:
        return None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    return value


@dataclass
class RunOutput:
    """Registros por ponto, metadados de proveniência, documento e disparos"""
    records: List[dict]
    metadata: Dict[str, Any]
    document: Dict[str, Any] = field(default_factory=dict)
    shots: List[ShotRecord] = field(default_factory=list)

    @classmethod
    def from_points(cls, scenario: Scenario, points: List[PointResult]) -> "RunOutput":
        swept = scenario.sweep is not None
        records, shots, documents = [], [], []
        for point in sorted(points, key=lambda p: p.index):
            for record in point.records:
                records.append({"point_index": point.index, **record} if swept else dict(record))
            offset = len(shots)
            shots.extend(
                ShotRecord(offset + s.shot_index, s.analysis_phase, s.outcome, s.counts) for s in point.shots
            )
            if point.document:
                documents.append({"point_index": point.index, "sweep_value": point.sweep_value, **point.document})
        metadata = {
            "tool": "iongate",
            "version": __version__,
            "scenario": scenario.name,
            "experiment": scenario.experiment.kind,
            "config_hash": config_hash(scenario),
            "seed": scenario.seed,
            "shots_per_point": scenario.shots_per_point,
            "sweep_variable": scenario.sweep.variable if swept else None,
        }
        document = {"points": documents} if documents else {}
        return cls(records, metadata, document, shots)

    # ----- tabelas -----

    def frame(self) -> pd.DataFrame:
        table = pd.DataFrame.from_records(self.records)
        return table.rename(columns=lambda c: labelled(c, self.metadata.get("sweep_variable")))

    def shot_frame(self) -> pd.DataFrame:
        table = pd.DataFrame.from_records([s.to_dict() for s in self.shots], columns=list(SHOT_COLUMNS))
        table["counts"] = table["counts"].astype("Int64")
        unit = "us" if self.metadata["experiment"] in ("carrier_flop", "sideband_flop", "ms_gate", "ramsey") else "rad"
        return table.rename(columns={
            "shot_index": labelled("shot_index"),
            "sweep_value": f"sweep_value [{unit}]",
            "counts": labelled("counts"),
        })

    def header(self) -> str:
        fields = " ".join(f"{k}={v}" for k, v in self.metadata.items() if v is not None)
        return f"# {fields}\n"

    def render(self, table: pd.DataFrame, fmt: str) -> str:
        """Texto da tabela no formato pedido, com a proveniência primeiro"""
        if fmt not in FORMATS:
            raise ScenarioError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
        if fmt == "csv":
            buffer = io.StringIO()
            buffer.write(self.header())
            table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            return buffer.getvalue()
        lines = [json.dumps({"metadata": plain(self.metadata)}, sort_keys=True)]
        for row in table.to_dict(orient="records"):
            lines.append(json.dumps(plain(row), sort_keys=True))
        return "\n".join(lines) + "\n"

    def render_document(self) -> str:
        return json.dumps(plain({"metadata": self.metadata, **self.document}), indent=2, sort_keys=True) + "\n"

    def write(self, out_dir, fmt: str = "csv") -> List[Path]:
        """
        Grava tabela, documento e disparos em out_dir.

        Returns:
            caminhos escritos, na ordem
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = self.metadata["scenario"]
        suffix = ".csv" if fmt == "csv" else ".jsonl"
        written = []

        path = out_dir / f"{stem}{suffix}"
        path.write_text(self.render(self.frame(), fmt), encoding="utf-8")
        written.append(path)
        if self.document:
            path = out_dir / f"{stem}.json"
            path.write_text(self.render_document(), encoding="utf-8")
            written.append(path)
        if self.shots:
            path = out_dir / f"{stem}_shots{suffix}"
            path.write_text(self.render(self.shot_frame(), fmt), encoding="utf-8")
            written.append(path)
        for p in written:
            logger.info("wrote %s", p)
        return written


# ============== Leitura de disparos ==============

def read_shots(path) -> List[ShotRecord]:
    """Lê um arquivo de disparos (CSV com cabeçalho # ou JSON lines)"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read shot file {path}: {exc}") from exc

    if path.suffix == ".jsonl":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        table = pd.DataFrame.from_records([r for r in rows if "metadata" not in r])
    else:
        table = pd.read_csv(io.StringIO(text), comment="#")
    table = table.rename(columns=unlabelled)
    missing = [c for c in SHOT_COLUMNS if c not in table.columns]
    if missing:
        raise ScenarioError(f"shot file {path} lacks columns {missing}")

    shots = []
    for row in table.itertuples(index=False):
        outcome = row.outcome if isinstance(row.outcome, str) and row.outcome else None
        counts = None if pd.isna(row.counts) else int(row.counts)
        shots.append(ShotRecord(int(row.shot_index), float(row.sweep_value), outcome, counts))
    logger.debug("read %d shots from %s", len(shots), path)
    return shots

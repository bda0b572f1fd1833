"""CSV export of scenario results."""
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional

import pandas as pd

logger = logging.getLogger(__name__)

COLUMNS = ['sweep_value', 'scheme', 'capacity_bps_hz', 'std_error', 'bound_bps_hz', 'iterations', 'seed']


@dataclass(frozen=True)
class ResultRow:
    """One CSV row; None fields are written as empty cells"""
    sweep_value: Optional[float]
    scheme: str
    capacity_bps_hz: Optional[float] = None
    std_error: Optional[float] = None
    bound_bps_hz: Optional[float] = None
    iterations: Optional[int] = None
    seed: Optional[int] = None


def rows_to_frame(rows: Iterable[ResultRow]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(row) for row in rows], columns=COLUMNS)
    frame['iterations'] = frame['iterations'].astype('Int64')
    return frame


def header_lines(source_name: str, source_digest: str, kind: str, seed: int, trials: int):
    return [
        f"# scenario: {source_name} sha256={source_digest} kind={kind}",
        f"# seed: {seed} trials: {trials}",
    ]


def write_results(path: Path, rows: Iterable[ResultRow], header: Iterable[str]) -> Path:
    """Write the comment header and the fixed columns to `path`"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = rows_to_frame(rows)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        for line in header:
            fh.write(f"{line}\n")
        frame.to_csv(fh, index=False, lineterminator='\n', float_format='%.10g', na_rep='')
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path

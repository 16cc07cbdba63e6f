# Text utf-8 encoded files: eigenvalue lists in, CSV reports out
import csv
import io
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateEigenvalueError, DimensionMismatchError, LevyAreaValueError


def format_value(value) -> str:
    # 17 significant digits round-trip a float64
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


class DataLoader:

    def __init__(self):
        pass

    @staticmethod
    def read_utf8_file(filepath):
        with open(filepath, "r", encoding="utf-8") as file:
            return file.read()

    @staticmethod
    def write_utf8_file(filepath, content):
        with open(filepath, "w", encoding="utf-8") as file:
            file.write(content)

    @staticmethod
    def read_eigenvalues(filepath, m: int) -> np.ndarray:
        """
        Read Q-Wiener eigenvalues eta_1..eta_m, one positive number per line.

        Blank lines and lines starting with '#' are skipped.

        Args:
            filepath (str): path of the UTF-8 text file
            m (int): expected number of eigenvalues

        Returns:
            np.ndarray: the eigenvalues (not their roots)
        """
        values = []
        for number, line in enumerate(DataLoader.read_utf8_file(filepath).splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise LevyAreaValueError(f"{filepath}:{number}: not a number: '{line}'") from None

        eigenvalues = np.asarray(values, dtype=np.float64)
        if eigenvalues.size != m:
            raise DimensionMismatchError(f"{filepath} holds {eigenvalues.size} eigenvalues, expected {m}")
        if not np.all(np.isfinite(eigenvalues)) or np.any(eigenvalues <= 0.0):
            raise DegenerateEigenvalueError(f"{filepath}: eigenvalues must be positive and finite")
        return eigenvalues

    @staticmethod
    def format_csv(
        rows: Iterable[Sequence],
        columns: Optional[Sequence[str]] = None,
        header: Optional[Mapping[str, object]] = None,
    ) -> str:
        """
        Render rows as CSV, preceded by '# key=value' provenance lines.

        Args:
            rows (Iterable[Sequence]): the records
            columns (Sequence[str], optional): column names for the first CSV line
            header (Mapping[str, object], optional): provenance entries

        Returns:
            str: the document, newline terminated
        """
        buffer = io.StringIO()
        for key, value in (header or {}).items():
            buffer.write(f"# {key}={format_value(value)}\n")

        writer = csv.writer(buffer, lineterminator="\n")
        if columns is not None:
            writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
        return buffer.getvalue()

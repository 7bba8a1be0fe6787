import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

from src.svarmsh.pipeline.csv_io import FLOAT_FORMAT
from src.svarmsh.sampler import convert_for_json


@dataclass
class ReportBundle:
    """
    Tables and notes produced by one pipeline command.

    Attributes:
        title (str): Heading of the Markdown report.
        tables (Dict[str, pd.DataFrame]): Named tables, written one CSV each.
        notes (List[str]): Free-text remarks, e.g. a reading legend.
        records (Dict[str, Any]): Extra JSON-serializable results.
    """

    title: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    records: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "notes": list(self.notes),
            "records": self.records,
            "tables": {name: _table_records(table) for name, table in self.tables.items()},
        }


def _table_records(table: pd.DataFrame) -> List[Dict[str, Any]]:
    frame = table.reset_index() if table.index.name else table
    records = []
    for row in frame.to_dict(orient="records"):
        # JSON has no NaN
        records.append(
            {key: None if isinstance(value, float) and np.isnan(value) else value for key, value in row.items()}
        )
    return records


class ResultsManager:
    """Manages report storage: lossless JSON and CSV plus a rounded Markdown rendering."""

    def __init__(self, results_dir: Union[str, Path] = Path("./results")):
        self.results_dir = Path(results_dir)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    def save_results(self, name: str, bundle: ReportBundle) -> Path:
        """Saves the bundle as `<name>.json`."""
        filepath = self.results_dir / f"{name}.json"
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(convert_for_json(bundle.to_dict()), f, indent=2)
        print(f"  > Results saved to: {filepath}")
        return filepath

    def save_tables(self, name: str, bundle: ReportBundle) -> List[Path]:
        """Writes every table to `<name>_<table>.csv` with full double precision."""
        paths = []
        for table_name, table in bundle.tables.items():
            filepath = self.results_dir / f"{name}_{table_name}.csv"
            table.to_csv(
                filepath,
                index=bool(table.index.name),
                float_format=FLOAT_FORMAT,
                lineterminator="\n",
            )
            paths.append(filepath)
        return paths

    def save_report(self, name: str, bundle: ReportBundle, digits: int = 4) -> Path:
        """Generates and saves a human-readable Markdown report."""
        filepath = self.results_dir / f"{name}_report.md"
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(self._generate_markdown_report(bundle, digits))
        print(f"  > Markdown report saved to: {filepath}")
        return filepath

    def save_bundle(self, name: str, bundle: ReportBundle) -> Dict[str, Any]:
        return {
            "json": self.save_results(name, bundle),
            "csv": self.save_tables(name, bundle),
            "markdown": self.save_report(name, bundle),
        }

    def compare_models(self, scores: pd.DataFrame, score_column: str = "log_mdd") -> pd.DataFrame:
        """Ranks models by a score, highest first, and prints the table to the console."""
        if scores.empty:
            print("No results to compare.")
            return scores

        df = scores.sort_values(score_column, ascending=False, kind="stable").reset_index(drop=True)
        df["rank"] = df.index + 1
        df = df.set_index("rank")

        print("\n" + "=" * 80)
        print("MODEL COMPARISON")
        print("=" * 80)
        print(df.to_string(float_format=lambda value: f"{value:,.4f}"))
        print("=" * 80 + "\n")
        return df

    def _generate_markdown_report(self, bundle: ReportBundle, digits: int) -> str:
        """Helper to format the Markdown report; numbers are rounded for display only."""
        report = f"# {bundle.title}\n\n"
        for note in bundle.notes:
            report += f"> {note}\n\n"
        for name, table in bundle.tables.items():
            report += f"## {name.replace('_', ' ').capitalize()}\n\n"
            report += self._markdown_table(table, digits) + "\n"
        return report

    @staticmethod
    def _markdown_table(table: pd.DataFrame, digits: int) -> str:
        frame = table.reset_index() if table.index.name else table
        columns = [str(c) for c in frame.columns]
        lines = ["| " + " | ".join(columns) + " |", "|" + "|".join(":---" for _ in columns) + "|"]
        for row in frame.itertuples(index=False):
            cells = []
            for value in row:
                if isinstance(value, (bool, np.bool_)):
                    cells.append("**yes**" if value else "")
                elif isinstance(value, (float, np.floating)):
                    cells.append("" if np.isnan(value) else f"{value:.{digits}f}")
                else:
                    cells.append(str(value))
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

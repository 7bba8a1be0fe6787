import json
import warnings
from pathlib import Path
from typing import Dict, List, Optional, Union

from src.svarmsh.model.errors import RestrictionError
from src.svarmsh.model.restrictions import RestrictionScheme, compose_restricted_rows

DEFAULT_SCHEMES_PATH = Path(__file__).resolve().parents[3] / "data" / "restriction_schemes.json"


class SchemeFactory:
    """
    Builds restriction schemes from the preset file.

    Generic presets ('unrestricted', 'recursive') exist for any N; pattern
    presets only fit the number of variables they were written for.
    """

    def __init__(self, schemes_json_path: Union[str, Path] = DEFAULT_SCHEMES_PATH):
        raw = self._load_json(schemes_json_path)
        if not isinstance(raw, dict) or not isinstance(raw.get("schemes"), list):
            raise TypeError("Scheme data must be an object with a 'schemes' list.")
        self.reference_variables: List[str] = list(raw.get("variables", []))
        self._records: Dict[str, Dict] = self._index_records(raw["schemes"])

    def _load_json(self, json_path: Union[str, Path]) -> Dict:
        try:
            with open(json_path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (FileNotFoundError, json.JSONDecodeError) as e:
            raise RuntimeError(f"Failed to load or parse JSON from {json_path}: {e}") from e

    def _index_records(self, records: List[Dict]) -> Dict[str, Dict]:
        """Maps every name and alias, lower-cased, to its record."""
        indexed = {}
        for record in records:
            name = record.get("name")
            if not name or not ("generic" in record or "pattern" in record):
                warnings.warn(f"Skipping malformed scheme record: {record!r}")
                continue
            for key in [name, *record.get("aliases", [])]:
                indexed[str(key).lower()] = record
        return indexed

    def has_scheme(self, name: str) -> bool:
        return str(name).lower() in self._records

    @property
    def names(self) -> List[str]:
        return sorted({record["name"] for record in self._records.values()})

    def create_scheme(
        self, name: str, n_variables: int, restricted_rows: Optional[List[int]] = None
    ) -> Optional[RestrictionScheme]:
        """
        Creates a preset scheme for N variables.

        Args:
            name: Preset name or alias, case-insensitive.
            n_variables: Number of variables in the data.
            restricted_rows: Zero-based rows that keep the preset pattern while
                             the others are freed; None keeps every row.

        Returns:
            The scheme, or None (with a warning) if the name is unknown.

        Raises:
            RestrictionError: If a pattern preset does not match N.
        """
        record = self._records.get(str(name).lower())
        if record is None:
            warnings.warn(f"Error: Restriction scheme '{name}' not found.")
            return None

        if record.get("generic") == "unrestricted":
            scheme = RestrictionScheme.unrestricted(n_variables)
        elif record.get("generic") == "recursive":
            scheme = RestrictionScheme.recursive(n_variables)
        else:
            pattern = record["pattern"]
            if len(pattern) != n_variables:
                raise RestrictionError(
                    f"Scheme '{record['name']}' is defined for {len(pattern)} variables, "
                    f"data has {n_variables}."
                )
            scheme = RestrictionScheme.from_pattern(pattern, name=record["name"])

        if restricted_rows is None or sorted(restricted_rows) == list(range(n_variables)):
            return scheme
        return compose_restricted_rows(scheme, restricted_rows)

"""
Linear restrictions on the structural matrix, vec(A0) = Q alpha + q.

vec stacks columns, so entry A0[i, j] sits at position j * N + i. Free
parameters are ordered by the first vec position in which they appear.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.svarmsh.model.errors import RestrictionError

Token = Union[str, float, int]
_IDENTIFIER = re.compile(r"^(-?)([A-Za-z_][A-Za-z0-9_]*)$")


@dataclass(frozen=True)
class RestrictionScheme:
    """
    The (Q, q) pair restricting A0.

    Attributes:
        Q (np.ndarray): N^2 x r matrix with linearly independent columns.
        q (np.ndarray): N^2 vector; carries the unit diagonal and fixed entries.
        preset_name (Optional[str]): Label of the built-in scheme, if any.
        parameter_names (Tuple[str, ...]): One label per free element.
    """

    Q: np.ndarray
    q: np.ndarray
    preset_name: Optional[str] = None
    parameter_names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        """Validate the vec-consistency invariants."""
        q = np.asarray(self.q, dtype=float).ravel()
        n = int(round(np.sqrt(q.size)))
        if n * n != q.size or n < 1:
            raise RestrictionError(f"q has length {q.size}, which is not a square N^2.")
        Q = np.asarray(self.Q, dtype=float)
        if Q.size == 0:
            Q = np.zeros((q.size, 0))
        if Q.ndim != 2 or Q.shape[0] != q.size:
            raise RestrictionError(f"Q must have {q.size} rows, got shape {Q.shape}.")

        diagonal = np.arange(n) * (n + 1)
        if np.any(Q[diagonal] != 0) or np.any(q[diagonal] != 1.0):
            raise RestrictionError("Restrictions must fix the diagonal of A0 at one.")
        if Q.shape[1] and np.linalg.matrix_rank(Q) < Q.shape[1]:
            raise RestrictionError("Columns of Q must be linearly independent.")

        names = tuple(self.parameter_names) or tuple(f"alpha{c + 1}" for c in range(Q.shape[1]))
        if len(names) != Q.shape[1]:
            raise RestrictionError("parameter_names must have one entry per column of Q.")

        Q.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "parameter_names", names)

    @property
    def n_variables(self) -> int:
        return int(round(np.sqrt(self.q.size)))

    @property
    def n_free(self) -> int:
        return self.Q.shape[1]

    @property
    def label(self) -> str:
        return self.preset_name or "custom"

    def reconstruct(self, alpha: np.ndarray) -> np.ndarray:
        n = self.n_variables
        alpha = np.asarray(alpha, dtype=float).ravel()
        if alpha.size != self.n_free:
            raise ValueError(f"Expected {self.n_free} free elements, got {alpha.size}.")
        return (self.Q @ alpha + self.q).reshape((n, n), order="F")

    def extract(self, A0: np.ndarray) -> np.ndarray:
        """Least-squares inverse of reconstruct: (Q'Q)^{-1} Q' (vec(A0) - q)."""
        if self.n_free == 0:
            return np.zeros(0)
        vec = np.asarray(A0, dtype=float).reshape(-1, order="F") - self.q
        return np.linalg.solve(self.Q.T @ self.Q, self.Q.T @ vec)

    def free_mask(self) -> np.ndarray:
        """N x N boolean mask of entries that move with alpha."""
        n = self.n_variables
        return np.any(self.Q != 0, axis=1).reshape((n, n), order="F")

    def pattern(self) -> List[List[str]]:
        """Human-readable token matrix, the inverse of from_pattern for single-sign ties."""
        n = self.n_variables
        rows: List[List[str]] = [["" for _ in range(n)] for _ in range(n)]
        for j in range(n):
            for i in range(n):
                idx = j * n + i
                (nonzero,) = np.nonzero(self.Q[idx])
                if nonzero.size == 0:
                    rows[i][j] = f"{self.q[idx]:g}"
                    continue
                terms = []
                for c in nonzero:
                    coefficient = self.Q[idx, c]
                    sign = "-" if coefficient < 0 else ""
                    magnitude = "" if abs(coefficient) == 1 else f"{abs(coefficient):g}*"
                    terms.append(f"{sign}{magnitude}{self.parameter_names[c]}")
                offset = f"{self.q[idx]:+g}" if self.q[idx] else ""
                rows[i][j] = "+".join(terms).replace("+-", "-") + offset
        return rows

    @classmethod
    def unrestricted(cls, n_variables: int) -> "RestrictionScheme":
        """Every off-diagonal element free."""
        mask = ~np.eye(n_variables, dtype=bool)
        return cls._from_free_mask(mask, "unrestricted")

    @classmethod
    def recursive(cls, n_variables: int) -> "RestrictionScheme":
        """Lower-triangular A0 with unit diagonal."""
        mask = np.tril(np.ones((n_variables, n_variables), dtype=bool), k=-1)
        return cls._from_free_mask(mask, "recursive")

    @classmethod
    def _from_free_mask(cls, mask: np.ndarray, name: str) -> "RestrictionScheme":
        n = mask.shape[0]
        positions = [j * n + i for j in range(n) for i in range(n) if mask[i, j]]
        Q = np.zeros((n * n, len(positions)))
        for c, idx in enumerate(positions):
            Q[idx, c] = 1.0
        q = np.eye(n).reshape(-1, order="F")
        names = tuple(f"a{idx % n + 1}_{idx // n + 1}" for idx in positions)
        return cls(Q=Q, q=q, preset_name=name, parameter_names=names)

    @classmethod
    def from_pattern(
        cls, pattern: Sequence[Sequence[Token]], name: Optional[str] = None
    ) -> "RestrictionScheme":
        """
        Builds a scheme from an N x N matrix of tokens.

        A numeric token fixes the entry. An identifier marks a free element;
        prefixed with '-' it enters with coefficient -1. The same identifier
        in several cells ties those cells to one element of alpha.

        Raises:
            RestrictionError: On a ragged pattern or an unparseable token.
        """
        n = len(pattern)
        if n == 0 or any(len(row) != n for row in pattern):
            raise RestrictionError("Restriction pattern must be a square matrix.")

        q = np.zeros(n * n)
        columns: Dict[str, int] = {}
        entries: List[Tuple[int, int, float]] = []
        for j in range(n):
            for i in range(n):
                token = pattern[i][j]
                idx = j * n + i
                if isinstance(token, (int, float)) and not isinstance(token, bool):
                    q[idx] = float(token)
                    continue
                text = str(token).strip()
                try:
                    q[idx] = float(text)
                    continue
                except ValueError:
                    pass
                match = _IDENTIFIER.match(text)
                if match is None:
                    raise RestrictionError(f"Cannot parse restriction token {text!r} at ({i + 1}, {j + 1}).")
                sign, identifier = match.groups()
                column = columns.setdefault(identifier, len(columns))
                entries.append((idx, column, -1.0 if sign else 1.0))

        Q = np.zeros((n * n, len(columns)))
        for idx, column, coefficient in entries:
            Q[idx, column] = coefficient
        return cls(Q=Q, q=q, preset_name=name, parameter_names=tuple(columns))


def reconstruct_A0(alpha: np.ndarray, scheme: RestrictionScheme) -> np.ndarray:
    """A0 reshaped from Q alpha + q (column-major)."""
    return scheme.reconstruct(alpha)


def extract_alpha(A0: np.ndarray, scheme: RestrictionScheme) -> np.ndarray:
    """Free elements of A0 under the scheme."""
    return scheme.extract(A0)


def compose_restricted_rows(
    preset: RestrictionScheme, rows: Iterable[int], name: Optional[str] = None
) -> RestrictionScheme:
    """
    Keeps the preset's restrictions on the listed rows and frees every other row.

    Args:
        preset: Scheme supplying the restricted rows.
        rows: Zero-based equation indices that keep the preset pattern.
        name: Label for the composed scheme.

    Returns:
        A scheme whose unlisted rows have unit diagonal and free off-diagonals.
    """
    n = preset.n_variables
    kept = sorted(set(int(r) for r in rows))
    if any(r < 0 or r >= n for r in kept):
        raise RestrictionError(f"Rows {kept} out of range for N = {n}.")

    q = np.zeros(n * n)
    column_map: Dict[Tuple[str, int], int] = {}
    entries: List[Tuple[int, int, float]] = []
    names: List[str] = []

    def column_for(key: Tuple[str, int], label: str) -> int:
        if key not in column_map:
            column_map[key] = len(names)
            names.append(label)
        return column_map[key]

    for j in range(n):
        for i in range(n):
            idx = j * n + i
            if i in kept:
                q[idx] = preset.q[idx]
                for c in np.nonzero(preset.Q[idx])[0]:
                    column = column_for(("preset", int(c)), preset.parameter_names[c])
                    entries.append((idx, column, float(preset.Q[idx, c])))
            elif i == j:
                q[idx] = 1.0
            else:
                column = column_for(("free", idx), f"a{i + 1}_{j + 1}")
                entries.append((idx, column, 1.0))

    Q = np.zeros((n * n, len(names)))
    for idx, column, coefficient in entries:
        Q[idx, column] = coefficient
    label = name or f"{preset.label}[rows={','.join(str(r + 1) for r in kept)}]"
    return RestrictionScheme(Q=Q, q=q, preset_name=label, parameter_names=tuple(names))

"""Utility helpers: input paths, integer ranges and resource limits."""

import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from exceptions import ConfigError, ResourceGuardExceeded

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parent


class PathResolver:
    """Utility class for resolving input file paths."""

    SEARCH_DIRS = ("modules", "matrices")

    @classmethod
    def resolve_file_path(cls, file_path: str) -> Path:
        """Resolve a path by checking the working directory and the bundled example folders."""
        path = Path(file_path)
        if path.exists():
            return path

        possible_paths = [Path.cwd() / file_path, REPO_ROOT / file_path]
        possible_paths += [REPO_ROOT / d / path.name for d in cls.SEARCH_DIRS]

        for p in possible_paths:
            if p.exists():
                logger.info(f"Resolved file path: {p}")
                return p

        raise FileNotFoundError(
            f"Could not find file at any of these locations: {[str(p) for p in [path] + possible_paths]}"
        )


class RangeParser:
    """Parses integer ranges such as ``1..12``, ``2,4,8`` or ``5``."""

    @staticmethod
    def parse_range(text: str, minimum: int = 0) -> List[int]:
        text = str(text).strip()
        values: List[int] = []
        try:
            for part in text.split(","):
                part = part.strip()
                if ".." in part:
                    lo, hi = (int(x) for x in part.split("..", 1))
                    if lo > hi:
                        raise ConfigError(f"empty range {part!r}")
                    values.extend(range(lo, hi + 1))
                elif part:
                    values.append(int(part))
        except ValueError as e:
            raise ConfigError(f"invalid integer range {text!r}: {e}") from e
        if not values:
            raise ConfigError(f"empty range {text!r}")
        if min(values) < minimum:
            raise ConfigError(f"range {text!r} goes below {minimum}")
        return sorted(set(values))

    @staticmethod
    def parse_list(text: str, minimum: int = 1) -> List[int]:
        """Comma-separated integers, order kept."""
        try:
            values = [int(x) for x in str(text).split(",") if x.strip()]
        except ValueError as e:
            raise ConfigError(f"invalid integer list {text!r}: {e}") from e
        if not values:
            raise ConfigError(f"empty list {text!r}")
        if min(values) < minimum:
            raise ConfigError(f"list {text!r} has entries below {minimum}")
        return values


class ResourceGuard:
    """Size and wall-clock limits shared by the long-running computations."""

    def __init__(self, max_field_order: int = 65536, max_window_dim: int = 4096,
                 max_matrix_dim: int = 400, max_exp_terms: int = 48,
                 time_budget_secs: Optional[int] = None):
        self.max_field_order = max_field_order
        self.max_window_dim = max_window_dim
        self.max_matrix_dim = max_matrix_dim
        self.max_exp_terms = max_exp_terms
        self.time_budget_secs = time_budget_secs
        self._started = time.monotonic()

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "ResourceGuard":
        return cls(
            max_field_order=config.get("max_field_order", 65536),
            max_window_dim=config.get("max_window_dim", 4096),
            max_matrix_dim=config.get("max_matrix_dim", 400),
            max_exp_terms=config.get("max_exp_terms", 48),
            time_budget_secs=config.get("time_budget_secs"),
        )

    def check_field(self, field) -> None:
        if field.order > self.max_field_order:
            raise ResourceGuardExceeded(f"field {field} has {field.order} elements, limit {self.max_field_order}")

    def check_window(self, dim: int) -> None:
        if dim > self.max_window_dim:
            raise ResourceGuardExceeded(f"window dimension {dim} exceeds the limit {self.max_window_dim}")

    def check_matrix(self, n: int) -> None:
        if n > self.max_matrix_dim:
            raise ResourceGuardExceeded(f"matrix dimension {n} exceeds the limit {self.max_matrix_dim}")

    def check_time(self, stage: str = "") -> None:
        if self.time_budget_secs is None:
            return
        elapsed = time.monotonic() - self._started
        if elapsed > self.time_budget_secs:
            where = f" during {stage}" if stage else ""
            raise ResourceGuardExceeded(f"time budget of {self.time_budget_secs}s exhausted{where}")

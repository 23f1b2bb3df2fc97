"""Reading module and matrix specs, writing JSON / CSV / table reports."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from base_algebra import FiniteField
from drinfeld_core import DrinfeldModule
from exceptions import ModuleSpecError, ParseError
from lambda_mu_engine import PresentationMatrix
from utils import PathResolver

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ModuleSpecReader:
    """Reads Drinfeld-module and presentation-matrix specs (JSON, or YAML with the same keys)."""

    @staticmethod
    def _load(file_path: str) -> Dict[str, Any]:
        path = PathResolver.resolve_file_path(file_path)
        logger.info(f"Reading spec from: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ModuleSpecError(f"{path} is not valid JSON/YAML: {e}") from e
        if not isinstance(data, dict):
            raise ModuleSpecError(f"{path} must hold an object")
        return data

    def read_module(self, file_path: str) -> DrinfeldModule:
        try:
            data = self._load(file_path)
            module = DrinfeldModule.from_spec(data)
            logger.info(f"Loaded {module}")
            return module
        except Exception as e:
            logger.error(f"Error reading module spec: {str(e)}")
            raise

    def read_matrix(self, file_path: str) -> PresentationMatrix:
        """``{"p": 2, "rows": [["T", "pi"], ["0", "T"]]}``; an optional ``q`` with ``field_modulus`` as for modules."""
        try:
            data = self._load(file_path)
            field = self._field(data)
            matrix = PresentationMatrix.from_dict(data, field)
            logger.info(f"Loaded {matrix.nrows}x{matrix.ncols} presentation over {field}")
            return matrix
        except Exception as e:
            logger.error(f"Error reading matrix spec: {str(e)}")
            raise

    @staticmethod
    def _field(data: Dict[str, Any]) -> FiniteField:
        if "q" in data:
            spec = {"q": data["q"], "phi_t": ["theta"]}
            if "field_modulus" in data:
                spec["field_modulus"] = data["field_modulus"]
            return DrinfeldModule.from_spec(spec).field
        try:
            return FiniteField(int(data.get("p", 2)))
        except (TypeError, ValueError) as e:
            raise ParseError(f"invalid characteristic {data.get('p')!r}: {e}") from e


class ReportWriter:
    """Serializes report dicts; every report carries the schema version."""

    def __init__(self, output_format: str = "json"):
        self.output_format = output_format

    @staticmethod
    def with_schema(report: Dict[str, Any]) -> Dict[str, Any]:
        return {"schema": SCHEMA_VERSION, **report}

    def render(self, report: Dict[str, Any], header: Optional[Sequence[str]] = None,
               rows: Optional[List[List[Any]]] = None) -> str:
        if self.output_format == "csv" and header is not None:
            return self.render_csv(header, rows or [])
        if self.output_format == "table":
            if header is not None:
                return self.render_table(header, rows or [])
            return self.render_pairs(report)
        return self.render_json(report)

    def render_json(self, report: Dict[str, Any]) -> str:
        return json.dumps(self.with_schema(report), indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def render_csv(header: Sequence[str], rows: List[List[Any]]) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    @staticmethod
    def render_table(header: Sequence[str], rows: List[List[Any]]) -> str:
        cells = [[str(h) for h in header]] + [[str(c) for c in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    @staticmethod
    def render_pairs(report: Dict[str, Any], indent: int = 0) -> str:
        lines = []
        pad = " " * indent
        for key, value in report.items():
            if isinstance(value, dict):
                lines.append(f"{pad}{key}:")
                lines.append(ReportWriter.render_pairs(value, indent + 2).rstrip("\n"))
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                lines.append(f"{pad}{key}:")
                for item in value:
                    lines.append(ReportWriter.render_pairs(item, indent + 2).rstrip("\n"))
                    lines.append(f"{pad}  --")
            else:
                lines.append(f"{pad}{key}: {value}")
        return "\n".join(lines) + "\n"

    def write(self, text: str, output_path: Optional[str] = None) -> None:
        if output_path is None:
            print(text, end="")
            return
        try:
            Path(output_path).write_text(text, encoding="utf-8")
            logger.info(f"Report saved to: {output_path}")
        except Exception as e:
            logger.error(f"Error writing report: {str(e)}")
            raise

    def write_csv(self, header: Sequence[str], rows: List[List[Any]], output_path: str) -> None:
        self.write(self.render_csv(header, rows), output_path)

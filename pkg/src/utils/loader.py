"""
Config, model-file and table I/O.
Functions:
- load_config(path)
- load_model_spec(path), load_model(path)
- parse_alpha_grid(text)
- read_points(path, d)
- write_csv(records, path), write_json(obj, path)
"""

import os
import json
import yaml
import pandas as pd
import numpy as np
from dotenv import load_dotenv
from typing import Dict, Any, List, Sequence

from src.core.model import ArmaControlModel, build_model
from src.utils.errors import DomainError, InputFileError

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))

load_dotenv()

def load_config(path: str = None) -> Dict[str, Any]:
    if path is None:
        path = os.getenv("ARMA_ENTROPY_CONFIG") or os.path.join(ROOT, "config", "config.yaml")
    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise InputFileError(f"cannot read config {path}: {e}", path=path)
    if os.getenv("ARMA_ENTROPY_LOGS"):
        cfg["logs_path"] = os.getenv("ARMA_ENTROPY_LOGS")
    return cfg

def load_model_spec(path: str) -> Dict[str, Any]:
    if not path or not os.path.exists(path):
        raise InputFileError(f"model file not found at path: {path}", path=path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            spec = json.load(f)
    except OSError as e:
        raise InputFileError(f"cannot read model file {path}: {e}", path=path)
    except json.JSONDecodeError as e:
        raise InputFileError(f"model file {path} is not valid JSON: {e.msg} (line {e.lineno})", path=path)
    return spec

def load_model(path: str) -> ArmaControlModel:
    return build_model(load_model_spec(path))

def parse_alpha_grid(text: str) -> List[float]:
    """
    "1" | "0.5,1,2" | "0.5:0.25:3" (start:step:stop, stop included).
    """
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(t) for t in text.split(":")]
            if len(parts) != 3:
                raise ValueError("range needs start:step:stop")
            start, step, stop = parts
            if step <= 0 or stop < start:
                raise ValueError("range needs step > 0 and stop >= start")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 12) for k in range(n)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise DomainError(f"bad alpha grid '{text}': {e}")

def read_points(path: str, d: int) -> List[np.ndarray]:
    """Frequency vectors from a CSV file, one vector per row (header optional)."""
    if not path or not os.path.exists(path):
        raise InputFileError(f"points file not found at path: {path}", path=path)
    try:
        df = pd.read_csv(path)
        # no header: the first row was taken as column names
        if all(_is_number(c) for c in df.columns):
            df = pd.read_csv(path, header=None)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputFileError(f"cannot read points file {path}: {e}", path=path)
    df = df.apply(pd.to_numeric, errors="coerce")
    if df.isnull().values.any():
        raise InputFileError(f"points file {path} has non-numeric entries", path=path)
    if df.shape[1] != d:
        raise DomainError(f"points file has {df.shape[1]} columns, model dimension is {d}")
    return [row.astype(float) for row in df.to_numpy()]

def _is_number(text: Any) -> bool:
    try:
        float(text)
        return True
    except (TypeError, ValueError):
        return False

def write_csv(records: Sequence[Dict[str, Any]], path: str, columns: List[str] = None) -> str:
    # full 17-significant-digit floats, '.' decimal, header row
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    df = pd.DataFrame(list(records), columns=columns)
    df.to_csv(path, index=False, float_format="%.17g", encoding="utf-8")
    return path

def write_json(obj: Any, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, default=_json_default)
    return path

def _json_default(o: Any):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    return str(o)

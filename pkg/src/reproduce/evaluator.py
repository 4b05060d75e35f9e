import math
from typing import Dict, Any
from src.utils.metrics import deviation
from datetime import datetime

VERDICTS = ("PASS", "FLAG", "FAIL")

class Evaluator:
    """
    Row evaluator for reproduction reports:
    - Compares a computed value with its published counterpart under a tolerance.
    - Produces verdict: PASS | FLAG | FAIL
    - FLAG is reserved for documented published discrepancies; they are never silent.
    - Property rows (no published value) pass or fail on their own check.
    """

    def __init__(self, config: Dict[str, Any]):
        self.cfg = config or {}
        self.default_tol = float(self.cfg.get("reproduce", {}).get("default_tol", 1e-3))

    def evaluate(self, row: Dict[str, Any]) -> Dict[str, Any]:
        # row keys: example, quantity, computed, published, tol, known_discrepancy, passed, note
        out = dict(row)
        tol = float(row.get("tol", self.default_tol))
        out["tol"] = tol

        if row.get("published") is None:
            passed = bool(row.get("passed", False))
            out["deviation"] = None
            out["verdict"] = "PASS" if passed else "FAIL"
        else:
            dev = deviation(row.get("computed"), row.get("published"))
            out["deviation"] = dev if math.isfinite(dev) else None
            if dev <= tol:
                verdict = "PASS"
            elif row.get("known_discrepancy"):
                verdict = "FLAG"
            else:
                verdict = "FAIL"
            out["verdict"] = verdict

        if out["verdict"] == "FLAG":
            known = str(row.get("known_discrepancy"))
            note = out.get("note") or ""
            out["note"] = note if known in note else (f"{known}; {note}" if note else known)
        out.setdefault("note", "")
        out["evaluated_at"] = datetime.utcnow().isoformat() + "Z"
        return out

import os
import json
from datetime import datetime
from typing import Dict, Any, List, Optional

import numpy as np

from src import __version__
from src.utils.loader import load_config, load_model, load_model_spec, read_points, write_csv, write_json
from src.core.model import characteristic_roots, is_stable, validate
from src.core.realization import impulse_response
from src.core.covariance import autocovariance, compare_methods
from src.core.entropy import model_entropy, model_upper_bound
from src.core.charfn import CharacteristicFunction
from src.core.simulate import SimConfig, simulate_path
from src.reproduce.reproducer import Reproducer, format_table, summarize
from src.utils.errors import ArmaEntropyError, DomainError

LOGS_PATH_DEFAULT = "logs/traces.json"


class Orchestrator:
    """
    Orchestrator runs one CLI command: loads the model, calls the library,
    writes artifacts plus manifest.json, and appends a trace for observability.
    """

    def __init__(self, cfg: Dict[str, Any] = None):
        self.cfg = cfg or load_config()
        self.margin = float(self.cfg.get("stability_margin", 1e-9))
        self.dm_cap = int(self.cfg.get("dm_cap", 60))
        self.out_fmt = self.cfg.get("output_format", "csv")
        self.logs_path = self.cfg.get("logs_path", LOGS_PATH_DEFAULT)
        os.makedirs(os.path.dirname(self.logs_path) or ".", exist_ok=True)

    def _write_trace(self, trace_item: Dict[str, Any]):
        existing = []
        try:
            if os.path.exists(self.logs_path):
                with open(self.logs_path, "r", encoding="utf-8") as f:
                    existing = json.load(f) or []
        except (OSError, json.JSONDecodeError):
            existing = []
        existing.append(trace_item)
        with open(self.logs_path, "w", encoding="utf-8") as f:
            json.dump(existing, f, indent=2, default=str)

    def _write_manifest(self, out_dir: str, command: str, model_path: Optional[str], parameters: Dict[str, Any],
                        outputs: List[str]) -> str:
        manifest = {
            "command": command,
            "model_path": model_path,
            "parameters": parameters,
            "outputs": outputs,
            "tool_version": __version__,
            "timestamp": datetime.utcnow().isoformat() + "Z",
        }
        return write_json(manifest, os.path.join(out_dir, "manifest.json"))

    def _table(self, records: List[Dict[str, Any]], out_dir: str, name: str, columns: List[str] = None) -> str:
        if self.out_fmt == "json":
            return write_json(records, os.path.join(out_dir, f"{name}.json"))
        return write_csv(records, os.path.join(out_dir, f"{name}.csv"), columns=columns)

    # --- commands -------------------------------------------------------

    def cmd_validate(self, model_path: str, out_dir: str, emit_normalized: bool = False) -> Dict[str, Any]:
        report = validate(load_model_spec(model_path))
        outputs = [write_json(report.to_dict(), os.path.join(out_dir, "validation.json"))]
        if report.ok and emit_normalized:
            outputs.append(write_json(report.model.to_dict(), os.path.join(out_dir, "model.normalized.json")))
        return {"payload": report.to_dict(), "outputs": outputs, "exit_code": 0 if report.ok else 2}

    def cmd_stability(self, model_path: str, out_dir: str) -> Dict[str, Any]:
        m = load_model(model_path)
        verdict = is_stable(m, self.margin)
        payload = verdict.to_dict()
        payload["roots"] = [{"re": float(z.real), "im": float(z.imag)} for z in characteristic_roots(m)]
        return {"payload": payload, "outputs": [write_json(payload, os.path.join(out_dir, "stability.json"))]}

    def cmd_impulse(self, model_path: str, out_dir: str, tol: float) -> Dict[str, Any]:
        m = load_model(model_path)
        imp = impulse_response(m, tol, self.margin, int(self.cfg.get("max_impulse_terms", 100000)))
        records = []
        for kind, mats in (("M", imp.M), ("Mstar", imp.Mstar)):
            for j, mat in enumerate(mats):
                for i in range(m.d):
                    for k in range(m.d):
                        records.append({"j": j, "kind": kind, "row": i, "col": k, "value": float(mat[i, k])})
        payload = {"N": imp.N, "tail_bound": imp.tail_bound, "rate": imp.rate}
        outputs = [self._table(records, out_dir, "impulse", ["j", "kind", "row", "col", "value"]),
                   write_json(payload, os.path.join(out_dir, "impulse.meta.json"))]
        return {"payload": payload, "outputs": outputs}

    def cmd_covariance(self, model_path: str, out_dir: str, tau_max: int, tol: float,
                       cross_check: bool = False) -> Dict[str, Any]:
        m = load_model(model_path)
        cov = autocovariance(m, tau_max, tol=tol, dm_cap=self.dm_cap, margin=self.margin)
        payload = {"method": cov.method, "residual": cov.residual, "tail_bound": cov.tail_bound,
                   "phi0": cov.phi[0].tolist()}
        if cross_check:
            payload["cross_check"] = compare_methods(m, tol, dm_cap=self.dm_cap, margin=self.margin)
        outputs = [self._table(cov.to_records(), out_dir, "covariance", ["tau", "row", "col", "value"]),
                   write_json(payload, os.path.join(out_dir, "covariance.meta.json"))]
        return {"payload": payload, "outputs": outputs}

    def cmd_entropy(self, model_path: str, out_dir: str, alphas: List[float], tol: float) -> Dict[str, Any]:
        m = load_model(model_path)
        ptol = float(self.cfg.get("proportionality_tol", 1e-8))
        records, details = [], []
        for alpha in alphas:
            report = model_entropy(m, alpha, tol=tol, ptol=ptol, dm_cap=self.dm_cap, margin=self.margin)
            records.append({"alpha": alpha, "value": report.value, "kind": report.kind})
            details.append(report.to_dict())
            if report.kind == "exact_gaussian":
                # the covariance bound sits next to the exact value when alpha is in its domain
                try:
                    bound = model_upper_bound(m, alpha, dm_cap=self.dm_cap, margin=self.margin)
                    records.append({"alpha": alpha, "value": bound.value, "kind": bound.kind})
                    details.append(bound.to_dict())
                except DomainError as e:
                    details.append({"alpha": alpha, "kind": "upper_bound", "note": e.message})
        outputs = [self._table(records, out_dir, "entropy", ["alpha", "value", "kind"]),
                   write_json(details, os.path.join(out_dir, "entropy.details.json"))]
        return {"payload": {"rows": records}, "outputs": outputs}

    def cmd_charfn(self, model_path: str, out_dir: str, points_path: Optional[str], tol: float) -> Dict[str, Any]:
        m = load_model(model_path)
        if points_path:
            points = read_points(points_path, m.d)
        else:
            # unit frequency vectors when no points file is given
            points = list(np.eye(m.d))
        cfg = dict(self.cfg, charfn_tol=tol)
        cf = CharacteristicFunction(m, cfg)
        records = []
        for v in cf.evaluate_many(points):
            row = {f"s_{i + 1}": float(x) for i, x in enumerate(v.s)}
            row.update({"re": v.value.real, "im": v.value.imag, "truncation_error": v.truncation_error})
            records.append(row)
        columns = [f"s_{i + 1}" for i in range(m.d)] + ["re", "im", "truncation_error"]
        return {"payload": {"n_points": len(records)},
                "outputs": [self._table(records, out_dir, "charfn", columns)]}

    def cmd_simulate(self, model_path: str, out_dir: str, sim_cfg: SimConfig,
                     dump_path: Optional[str] = None) -> Dict[str, Any]:
        m = load_model(model_path)
        summary = simulate_path(m, sim_cfg, self.margin)
        payload = summary.to_dict()
        outputs = [write_json(payload, os.path.join(out_dir, "simulation.json"))]
        if dump_path and summary.path is not None:
            records = [dict({"t": t}, **{f"x_{i + 1}": float(v) for i, v in enumerate(row)})
                       for t, row in enumerate(summary.path)]
            outputs.append(write_csv(records, dump_path, ["t"] + [f"x_{i + 1}" for i in range(m.d)]))
        return {"payload": payload, "outputs": outputs}

    def cmd_reproduce(self, which: str, out_dir: str, properties: bool = False) -> Dict[str, Any]:
        rows = Reproducer(self.cfg).run(which, properties=properties)
        counts = summarize(rows)
        table = format_table(rows)
        report_path = os.path.join(out_dir, "reproduction.md")
        os.makedirs(out_dir, exist_ok=True)
        with open(report_path, "w", encoding="utf-8") as f:
            f.write(self._assemble_report_text(which, table, counts))
        columns = ["example", "quantity", "computed", "published", "deviation", "tol", "verdict", "note"]
        outputs = [self._table(rows, out_dir, "reproduction", columns), report_path]
        return {"payload": {"counts": counts, "table": table}, "outputs": outputs}

    def _assemble_report_text(self, which: str, table: str, counts: Dict[str, int]) -> str:
        ts = datetime.utcnow().isoformat() + "Z"
        lines = []
        lines.append("# ARMA control-system entropy: reproduction report")
        lines.append(f"Generated: {ts}")
        lines.append("")
        lines.append(f"Examples: {which}")
        lines.append(f"- PASS: {counts.get('PASS', 0)}")
        lines.append(f"- FLAG: {counts.get('FLAG', 0)} (published values the closed forms do not reproduce)")
        lines.append(f"- FAIL: {counts.get('FAIL', 0)}")
        lines.append("")
        lines.append(table)
        return "\n".join(lines)

    def run(self, command: str, params: Dict[str, Any], out_dir: str = "reports") -> Dict[str, Any]:
        """
        Dispatch one command and log it. Errors are traced, then re-raised for
        the CLI to map onto an exit code.
        """
        model_path = params.get("model_path")
        handler = getattr(self, f"cmd_{command}")
        kwargs = {k: v for k, v in params.items() if k != "model_path"}
        if command != "reproduce":
            kwargs["model_path"] = model_path
        trace = {
            "command": command,
            "time": datetime.utcnow().isoformat() + "Z",
            "model_path": model_path,
            "parameters": _loggable(params),
        }
        os.makedirs(out_dir, exist_ok=True)
        try:
            result = handler(out_dir=out_dir, **kwargs)
        except ArmaEntropyError as e:
            trace.update({"status": "error", "error": e.to_dict()})
            self._write_trace(trace)
            raise
        outputs = list(result.get("outputs", []))
        outputs.append(self._write_manifest(out_dir, command, model_path, _loggable(params), outputs))
        result["outputs"] = outputs
        trace.update({"status": "ok", "outputs": outputs, "summary": _summary(command, result.get("payload", {}))})
        self._write_trace(trace)
        result["trace"] = trace
        return result


def _loggable(params: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for k, v in params.items():
        if isinstance(v, SimConfig):
            out[k] = {f: getattr(v, f) for f in ("seed", "n_samples", "burn_in", "replicate_count", "batches")}
        else:
            out[k] = v
    return out


def _summary(command: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    if command == "reproduce":
        return {"counts": payload.get("counts")}
    keep = ("ok", "stable", "spectral_radius", "N", "tail_bound", "residual", "n_points", "n_effective", "burn_in")
    return {k: payload[k] for k in keep if k in payload}

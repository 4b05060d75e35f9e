"""
Runs the worked examples end to end and compares every published number.

Rows are dicts: example, quantity, computed, published, tol, verdict, deviation, note.
Published discrepancies that the closed forms cannot reproduce come back as FLAG
rows carrying both numbers.
"""
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.core.covariance import compare_methods, covariance_lyapunov
from src.core.entropy import (c_d_alpha, cauchy_scale_from_coefficients, cauchy_scale_matrix, model_upper_bound,
                              renyi_cauchy, renyi_gaussian, renyi_upper_bound)
from src.core.model import characteristic_roots, is_stable
from src.reproduce.evaluator import Evaluator
from src.reproduce.property_suites import run_property_suites
from src.reproduce.reference_examples import PUBLISHED, example_model, published_coefficients
from src.utils.errors import DomainError

HALF_LN10 = 0.5 * math.log(10.0)
PHI0_BLOCK_DISCREPANCY = ("published Phi(0) rows 2-3 do not follow from the printed A_1, B_1, D_1, S_u, S_w; "
                          "Lyapunov solve and series sum agree on the computed value")


class Reproducer:
    def __init__(self, cfg: Optional[Dict[str, Any]] = None):
        self.cfg = cfg or {}
        self.evaluator = Evaluator(self.cfg)

    def _row(self, example: int, quantity: str, computed: Any, published: Any, tol: float,
             known_discrepancy: Optional[str] = None, note: str = "") -> Dict[str, Any]:
        return self.evaluator.evaluate({
            "example": example,
            "quantity": quantity,
            "computed": computed,
            "published": published,
            "tol": tol,
            "known_discrepancy": known_discrepancy,
            "note": note,
        })

    def example_1(self) -> List[Dict[str, Any]]:
        pub = PUBLISHED[1]
        m = example_model(1)
        rows = []
        verdict = is_stable(m)
        rows.append(self._row(1, "spectral radius", verdict.spectral_radius, 0.5, 1e-12))
        roots = characteristic_roots(m)
        for k, target in enumerate(pub["roots"]):
            rows.append(self._row(1, f"characteristic root {k + 1}", float(roots[k].real), target, 1e-3))

        dm_cap = int(self.cfg.get("dm_cap", 60))
        cov = covariance_lyapunov(m, dm_cap=dm_cap)
        phi0 = cov.phi[0]
        pub_phi0 = np.array(pub["phi0"])
        for i in range(3):
            for j in range(3):
                known = None
                if i > 0 and j > 0:
                    known = PHI0_BLOCK_DISCREPANCY
                rows.append(self._row(1, f"Phi(0)[{i},{j}]", float(phi0[i, j]), pub["phi0"][i][j], 5e-3,
                                      known_discrepancy=known,
                                      note=f"computed {phi0[i, j]:.4f}; published {pub['phi0'][i][j]}" if known else ""))
        check = compare_methods(m, float(self.cfg.get("series_tol", 1e-10)), dm_cap=dm_cap)
        rows.append(self._row(1, "Phi(0) Lyapunov - series (Frobenius)", check["gap"], 0.0,
                              check["tail_bound"] + 1e-8, note="independent confirmation of the computed Phi(0)"))

        exact = renyi_gaussian(phi0, 1.0)
        from_pub = renyi_gaussian(pub_phi0, 1.0)
        rows.append(self._row(
            1, "Shannon entropy (alpha = 1)", exact.value, pub["shannon"], 1e-3,
            known_discrepancy=PHI0_BLOCK_DISCREPANCY,
            note=f"computed {exact.value:.4f}; published {pub['shannon']}; "
                 f"closed form on the published Phi(0) gives {from_pub.value:.4f}"))
        rows.append(self._row(1, "Shannon entropy from published Phi(0)", from_pub.value, pub["shannon"], 1e-3))

        bound = renyi_upper_bound(phi0, 3, 1.0)
        pub_half_logdet = renyi_upper_bound(pub_phi0, 3, 1.0).components["half_logdet"]
        rows.append(self._row(
            1, "bound log-det term 1/2 ln det Phi(0)", bound.components["half_logdet"], pub["half_logdet"], 1e-3,
            known_discrepancy=PHI0_BLOCK_DISCREPANCY,
            note=f"computed {bound.components['half_logdet']:.4f}; published {pub['half_logdet']}; "
                 f"published Phi(0) gives {pub_half_logdet:.4f}"))
        rows.append(self._row(1, "bound log-det term from published Phi(0)", pub_half_logdet, pub["half_logdet"],
                              1e-3))
        rows.append(self._row(1, "bound - exact at alpha = 1", bound.value - exact.value, 0.0, 1e-9))

        constant = math.exp(from_pub.components["half_logdet_2piS"])
        rows.append(self._row(
            1, "alpha != 1 constant sqrt(det(2 pi Phi(0)))", constant, pub["alpha_constant"], 1e-3,
            known_discrepancy="published constant does not follow from the published Phi(0)",
            note=(f"closed form on the published Phi(0) gives {constant:.4f}; "
                  f"on the computed Phi(0) {math.exp(exact.components['half_logdet_2piS']):.4f}; "
                  f"published {pub['alpha_constant']}")))
        rows.append(self._row(
            1, "alpha exponent coefficient (alpha^(c/(1-alpha)))", -1.5, pub["alpha_exponent"], 1e-12,
            known_discrepancy="Gaussian closed form has exponent -d/(2(1-alpha)) = -1.5",
            note="published form uses -d/(1-alpha), the Cauchy exponent"))
        return rows

    def example_2(self) -> List[Dict[str, Any]]:
        pub = PUBLISHED[2]
        m = example_model(2)
        rows = []
        tol = float(self.cfg.get("impulse_tol", 1e-10))

        printed = cauchy_scale_from_coefficients(published_coefficients(), m.S_u)
        rows.append(self._row(2, "coefficient sum a (printed series)", printed.coefficient_sum,
                              pub["coefficient_sum"], 1e-9))
        printed_h = renyi_cauchy(printed.D, 3, 1.0).value
        rows.append(self._row(
            2, "Cauchy entropy alpha = 1 (printed coefficients)", printed_h, pub["shannon"], 2e-2,
            known_discrepancy="closed form with D = 2.3^2 S_u does not give the published value",
            note=(f"closed form gives {printed_h:.4f}; published {pub['shannon']}; "
                  f"difference {printed_h - pub['shannon']:.4f} vs 1/2 ln 10 = {HALF_LN10:.4f}")))
        parts = renyi_cauchy(printed.D, 3, 2.0).components
        const = math.exp(parts["half_logdet_4piD"] + parts["gamma_term"])
        rows.append(self._row(
            2, "alpha != 1 constant (printed coefficients)", const, pub["alpha_constant"], 1e-3,
            known_discrepancy="published constant is the closed-form constant divided by sqrt(10)",
            note=f"closed form gives {const:.4f}; / sqrt(10) = {const / math.sqrt(10.0):.4f}"))

        scale = cauchy_scale_matrix(m, tol)
        rows.append(self._row(2, "K_j K_j' proportional", 1.0 if scale.proportional else 0.0, 1.0, 0.0))
        rows.append(self._row(
            2, "coefficient sum a (recursion)", scale.coefficient_sum, pub["coefficient_sum"], 1e-3,
            known_discrepancy="printed M_j conflict with the recursion (M_0 = I, M_1 = A_1 + B_1)",
            note=f"recursion gives a = {scale.coefficient_sum:.6f} (tail bound {scale.coefficient_tail:.2g})"))
        recursion_h = renyi_cauchy(scale.D, 3, 1.0).value
        rows.append(self._row(
            2, "Cauchy entropy alpha = 1 (recursion coefficients)", recursion_h, pub["shannon"], 2e-2,
            known_discrepancy="recursion-based scale matrix differs from the printed one",
            note=f"recursion gives {recursion_h:.4f}"))
        return rows

    def example_3(self) -> List[Dict[str, Any]]:
        pub = PUBLISHED[3]
        m = example_model(3)
        pub_phi0 = np.array(PUBLISHED[1]["phi0"])
        rows = []
        for alpha in pub["alphas"]:
            quantity = f"upper bound alpha = {alpha:g}"
            try:
                bound = model_upper_bound(m, alpha, dm_cap=int(self.cfg.get("dm_cap", 60)))
            except DomainError as e:
                rows.append(self._row(3, quantity, None, pub["half_logdet"], 1e-3,
                                      known_discrepancy=e.message, note=e.message))
                continue
            target = c_d_alpha(3, alpha) + pub["half_logdet"]
            rows.append(self._row(
                3, quantity, bound.value, target, 1e-3, known_discrepancy=PHI0_BLOCK_DISCREPANCY,
                note=f"computed {bound.value:.4f}; published {target:.4f}; "
                     f"C_3({alpha:g}) = {bound.components['c_d_alpha']:.6f}"))
            rows.append(self._row(3, f"{quantity} from published Phi(0)",
                                  renyi_upper_bound(pub_phi0, 3, alpha).value, target, 1e-3))
        cov = covariance_lyapunov(m)
        half_logdet = 0.5 * float(np.linalg.slogdet(cov.phi[0])[1])
        rows.append(self._row(3, "bound log-det term 1/2 ln det Phi(0)", half_logdet, pub["half_logdet"], 1e-3,
                              known_discrepancy=PHI0_BLOCK_DISCREPANCY,
                              note=f"computed {half_logdet:.4f}; published {pub['half_logdet']}"))
        return rows

    def properties(self) -> List[Dict[str, Any]]:
        return [self.evaluator.evaluate(r) for r in run_property_suites(self.cfg)]

    def run(self, which: str = "all", properties: bool = False) -> List[Dict[str, Any]]:
        runners = {"1": self.example_1, "2": self.example_2, "3": self.example_3}
        keys = list(runners) if which == "all" else [str(which)]
        rows: List[Dict[str, Any]] = []
        for k in keys:
            if k not in runners:
                raise DomainError(f"unknown example '{k}'; choose 1, 2, 3 or all")
            rows.extend(runners[k]())
        if properties:
            rows.extend(self.properties())
        return rows


def summarize(rows: List[Dict[str, Any]]) -> Dict[str, int]:
    out = {v: 0 for v in ("PASS", "FLAG", "FAIL")}
    for r in rows:
        out[r["verdict"]] = out.get(r["verdict"], 0) + 1
    return out


def format_table(rows: List[Dict[str, Any]]) -> str:
    lines = ["| example | quantity | computed | published | deviation | verdict | note |",
             "|---|---|---|---|---|---|---|"]
    for r in rows:
        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)
        lines.append(f"| {r['example']} | {r['quantity']} | {fmt(r.get('computed'))} | {fmt(r.get('published'))} "
                     f"| {fmt(r.get('deviation'))} | {r['verdict']} | {r.get('note', '')} |")
    return "\n".join(lines)

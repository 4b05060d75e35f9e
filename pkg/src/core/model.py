"""
ARMA control system definition and validation.

    x(t) = sum_i A_i x(t-i) + u(t) + sum_j B_j u(t-j) + w(t) + sum_k D_k w(t-k)

with zero-mean white control u and noise w, independent of each other. The
leading coefficients B_0 = D_0 = I are implied and never stored.

Model files are JSON documents (schema_version 1):
    {"schema_version": 1, "d": 3, "p": 1, "r": 1, "q": 1,
     "A": [A_1, ...], "B": [B_1, ...], "D": [D_1, ...],
     "family": "gaussian" | "cauchy" | "laplace",
     "S_u": [[...]], "S_w": [[...]]}
Optional "control_family" / "noise_family" override "family" per residual.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from src.core.numerics import SpdMat, as_mat, block_companion, spd_factor, spectral_radius
from src.utils.errors import ArmaEntropyError, ModelValidationError

SCHEMA_VERSION = 1
FAMILIES = ("gaussian", "cauchy", "laplace")
STABILITY_MARGIN = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ResidualFamily:
    kind: str
    scale: SpdMat


@dataclass(frozen=True, eq=False)
class ArmaControlModel:
    d: int
    A: Tuple[np.ndarray, ...]
    B: Tuple[np.ndarray, ...]
    D: Tuple[np.ndarray, ...]
    control: ResidualFamily
    noise: ResidualFamily

    @property
    def p(self) -> int:
        return len(self.A)

    @property
    def r(self) -> int:
        return len(self.B)

    @property
    def q(self) -> int:
        return len(self.D)

    @property
    def family(self) -> str:
        return self.control.kind

    @property
    def S_u(self) -> np.ndarray:
        return self.control.scale.base

    @property
    def S_w(self) -> np.ndarray:
        return self.noise.scale.base

    @property
    def max_ma_order(self) -> int:
        return max(self.r, self.q)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.d,
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "A": [a.tolist() for a in self.A],
            "B": [b.tolist() for b in self.B],
            "D": [k.tolist() for k in self.D],
            "family": self.family,
            "S_u": self.S_u.tolist(),
            "S_w": self.S_w.tolist(),
        }

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any]) -> "ArmaControlModel":
        return build_model(spec)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: List[Dict[str, str]] = field(default_factory=list)
    model: Optional[ArmaControlModel] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "violations": list(self.violations)}


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    spectral_radius: float

    def to_dict(self) -> Dict[str, Any]:
        return {"stable": self.stable, "spectral_radius": self.spectral_radius}


def _coefficient_list(raw: Any, name: str, d: int, violations: List[Dict[str, str]]) -> List[np.ndarray]:
    if raw is None:
        return []
    if not isinstance(raw, (list, tuple)):
        violations.append({"path": name, "message": "must be a list of matrices"})
        return []
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        # ragged input: check each entry on its own
        arr = None
    if arr is not None and arr.size == 0:
        return []
    if arr is not None and arr.ndim == 2:
        # a bare matrix is a single coefficient
        items = [raw]
    else:
        items = list(raw)
    out = []
    for i, item in enumerate(items):
        path = f"{name}[{i}]"
        try:
            mat = np.array(item, dtype=float)
        except (TypeError, ValueError):
            violations.append({"path": path, "message": "not a numeric matrix"})
            continue
        if mat.ndim != 2 or mat.shape != (d, d):
            violations.append({"path": path,
                               "message": f"dimension mismatch: expected {d}x{d}, got {'x'.join(map(str, mat.shape))}"})
            continue
        if not np.all(np.isfinite(mat)):
            violations.append({"path": path, "message": "non-finite entries"})
            continue
        out.append(mat)
    return out


def _scale(raw: Any, name: str, d: int, violations: List[Dict[str, str]]) -> Optional[SpdMat]:
    if raw is None:
        violations.append({"path": name, "message": "missing"})
        return None
    try:
        mat = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        violations.append({"path": name, "message": "not a numeric matrix"})
        return None
    if mat.ndim != 2 or mat.shape != (d, d):
        violations.append({"path": name,
                           "message": f"dimension mismatch: expected {d}x{d}, got {'x'.join(map(str, mat.shape))}"})
        return None
    try:
        return spd_factor(as_mat(mat, name))
    except ArmaEntropyError as e:
        violations.append({"path": name, "message": e.message})
        return None


def _family_kind(spec: Mapping[str, Any], key: str, violations: List[Dict[str, str]]) -> Optional[str]:
    kind = spec.get(key, spec.get("family"))
    if kind is None:
        violations.append({"path": key if key in spec else "family", "message": "missing"})
        return None
    kind = str(kind).lower()
    if kind not in FAMILIES:
        violations.append({"path": key if key in spec else "family",
                           "message": f"unknown family '{kind}', expected one of {', '.join(FAMILIES)}"})
        return None
    return kind


def validate(spec: Any) -> ValidationReport:
    """
    Validate a model description (a mapping in the model-file schema, or an
    already built ArmaControlModel). Never raises for model problems; every
    violation is listed with its field path.
    """
    if isinstance(spec, ArmaControlModel):
        spec = spec.to_dict()
    if not isinstance(spec, Mapping):
        return ValidationReport(ok=False, violations=[{"path": "", "message": "model must be a JSON object"}])

    violations: List[Dict[str, str]] = []
    version = spec.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        violations.append({"path": "schema_version", "message": f"unsupported schema version {version}"})

    d = spec.get("d")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        violations.append({"path": "d", "message": "must be a positive integer"})
        return ValidationReport(ok=False, violations=violations)

    A = _coefficient_list(spec.get("A"), "A", d, violations)
    B = _coefficient_list(spec.get("B"), "B", d, violations)
    D = _coefficient_list(spec.get("D"), "D", d, violations)
    for order_key, coeffs, name in (("p", A, "A"), ("r", B, "B"), ("q", D, "D")):
        declared = spec.get(order_key)
        if declared is None:
            continue
        if isinstance(declared, bool) or not isinstance(declared, int) or declared < 0:
            violations.append({"path": order_key, "message": "must be a non-negative integer"})
        elif not any(v["path"].startswith(name + "[") for v in violations) and declared != len(coeffs):
            violations.append({"path": order_key,
                               "message": f"order mismatch: declared {declared}, {name} has {len(coeffs)} matrices"})

    control_kind = _family_kind(spec, "control_family", violations)
    noise_kind = _family_kind(spec, "noise_family", violations)
    if control_kind and noise_kind and control_kind != noise_kind:
        violations.append({"path": "family",
                           "message": f"mixed families ({control_kind} control, {noise_kind} noise) are not supported"})

    S_u = _scale(spec.get("S_u"), "S_u", d, violations)
    S_w = _scale(spec.get("S_w"), "S_w", d, violations)

    if violations:
        return ValidationReport(ok=False, violations=violations)

    model = ArmaControlModel(
        d=d,
        A=tuple(_frozen(a) for a in A),
        B=tuple(_frozen(b) for b in B),
        D=tuple(_frozen(k) for k in D),
        control=ResidualFamily(kind=control_kind, scale=S_u),
        noise=ResidualFamily(kind=noise_kind, scale=S_w),
    )
    return ValidationReport(ok=True, violations=[], model=model)


def build_model(spec: Any) -> ArmaControlModel:
    report = validate(spec)
    if not report.ok:
        raise ModelValidationError(report.violations)
    return report.model


def ar_companion(m: ArmaControlModel) -> np.ndarray:
    """Companion block of the AR part; a zero d x d block for p = 0."""
    if m.p == 0:
        return np.zeros((m.d, m.d))
    return block_companion(m.A)


def is_stable(m: ArmaControlModel, margin: float = STABILITY_MARGIN) -> StabilityVerdict:
    radius = spectral_radius(ar_companion(m))
    return StabilityVerdict(stable=radius < 1.0 - margin, spectral_radius=radius)


def characteristic_roots(m: ArmaControlModel) -> np.ndarray:
    """Roots of det(I - A(z)), sorted by modulus (reciprocal companion eigenvalues)."""
    eig = np.linalg.eigvals(ar_companion(m))
    eig = eig[np.abs(eig) > 1e-14]
    roots = 1.0 / eig
    return roots[np.argsort(np.abs(roots))]


def similarity_transform(m: ArmaControlModel, T) -> ArmaControlModel:
    """Model of T x(t) driven by T u(t), T w(t)."""
    T = as_mat(T, "T")
    Tinv = np.linalg.inv(T)
    spec = m.to_dict()
    spec["A"] = [(T @ a @ Tinv).tolist() for a in m.A]
    spec["B"] = [(T @ b @ Tinv).tolist() for b in m.B]
    spec["D"] = [(T @ k @ Tinv).tolist() for k in m.D]
    S_u = T @ m.S_u @ T.T
    S_w = T @ m.S_w @ T.T
    spec["S_u"] = (0.5 * (S_u + S_u.T)).tolist()
    spec["S_w"] = (0.5 * (S_w + S_w.T)).tolist()
    return build_model(spec)

"""Spectra of upper Laplacians, Betti numbers and expander certificates."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex
from .errors import BoundViolation, CertificationError, NumericalError, ValidationError
from .hodge import _boundary, laplacian

__all__ = [
    "DimensionSpectrum",
    "ErrorOperatorReport",
    "ExpanderCertificate",
    "SpectralSummary",
    "betti",
    "certificate_vector",
    "certify",
    "certify_spectrum",
    "count_lemma",
    "eigen_symmetric",
    "error_operator_norm",
    "matrix_rank",
    "nontrivial_spectrum",
    "spectral_duality",
    "spectral_summary",
]

RANK_RTOL = 1e-10
ZERO_TOL = 1e-8


def _dense(M) -> np.ndarray:
    if sp.issparse(M):
        return M.toarray()
    return np.asarray(M)


def eigen_symmetric(M, vectors: bool = False):
    """Ascending eigenvalues (and optionally orthonormal eigenvectors) of a symmetric matrix."""
    A = _dense(M).astype(float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0))):
        raise ValidationError("matrix is not symmetric")
    try:
        if vectors:
            return np.linalg.eigh(A)
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc


def matrix_rank(M) -> int:
    """Rank via singular values; anything below ``1e-10 * s_max`` is zero."""
    A = _dense(M).astype(float)
    if A.size == 0:
        return 0
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if s[0] == 0:
        return 0
    return int((s > RANK_RTOL * s[0]).sum())


def _snap_zeros(values: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    out = values.copy()
    out[np.abs(out) <= ZERO_TOL * scale] = 0.0
    return out


def _rank_boundary(X: SimplicialComplex, j: int) -> int:
    if j <= -1 or j > X.dim:
        return 0
    return matrix_rank(_boundary(X, j))


def nontrivial_spectrum(X: SimplicialComplex, j: int) -> np.ndarray:
    """Spectrum of the upper Laplacian on ``Z_j``: the full spectrum minus ``rank d_j`` zeros."""
    if not -1 <= j <= X.dim - 1:
        raise ValidationError(f"nontrivial_spectrum: j={j} outside [-1, {X.dim - 1}]")
    vals = _snap_zeros(eigen_symmetric(laplacian(X, j, "upper")))
    r = _rank_boundary(X, j)
    if np.any(vals[:r] != 0.0):
        raise NumericalError(f"fewer than rank(d_{j})={r} zero eigenvalues at j={j}")
    return vals[r:]


@dataclass(frozen=True)
class ExpanderCertificate:
    """Nontrivial spectrum at ``j`` lies in ``[k(1-eps), k(1+eps)]``."""

    j: int
    k: float
    eps: float
    vacuous: bool = False

    @property
    def valid(self) -> bool:
        return self.eps < 1.0

    @property
    def interval(self) -> tuple[float, float]:
        return self.k * (1 - self.eps), self.k * (1 + self.eps)

    def to_dict(self) -> dict:
        return {"j": self.j, "k": self.k, "eps": self.eps, "valid": self.valid, "vacuous": self.vacuous}


def certify_spectrum(values, j: int = 0, k: float | None = None) -> ExpanderCertificate:
    """Certificate for a given nontrivial spectrum.

    Without ``k`` the midpoint of the spectrum is used, which gives the
    smallest ``eps`` of any symmetric enclosure.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise CertificationError(f"empty nontrivial spectrum at j={j} (Z_j = 0)")
    lo, hi = float(vals.min()), float(vals.max())
    if k is None:
        if hi <= 0:
            raise CertificationError(f"nontrivial spectrum at j={j} is identically zero")
        k = (lo + hi) / 2
        eps = (hi - lo) / (hi + lo)
    else:
        if k <= 0:
            raise ValidationError("k must be positive")
        eps = float(np.abs(vals / k - 1).max())
    return ExpanderCertificate(j=j, k=float(k), eps=float(eps))


def certify(X: SimplicialComplex, j: int, k: float | None = None) -> ExpanderCertificate:
    return certify_spectrum(nontrivial_spectrum(X, j), j, k)


def certificate_vector(
    X: SimplicialComplex, overrides: dict[int, float] | None = None, strict: bool = True
) -> list[ExpanderCertificate | None]:
    """Certificates for ``j = -1 .. dim-1``; ``overrides`` pins ``k_j`` for chosen ``j``.

    With ``strict=False`` a dimension that cannot be certified yields ``None``.
    """
    overrides = overrides or {}
    out = []
    for j in range(-1, X.dim):
        try:
            out.append(certify(X, j, overrides.get(j)))
        except CertificationError:
            if strict:
                raise
            out.append(None)
    return out


def betti(X: SimplicialComplex, j: int) -> int:
    """Reduced real Betti number ``|X^j| - rank d_j - rank d_{j+1}``."""
    if not 0 <= j <= X.dim:
        raise ValidationError(f"betti: j={j} outside [0, {X.dim}]")
    return X.num_cells(j) - _rank_boundary(X, j) - _rank_boundary(X, j + 1)


def spectral_duality(X: SimplicialComplex, j: int, tol: float = 1e-6) -> bool:
    """Nonzero spectra of the lower Laplacian at ``j`` and upper at ``j-1`` coincide."""
    lower = _snap_zeros(eigen_symmetric(laplacian(X, j, "lower")))
    upper = _snap_zeros(eigen_symmetric(laplacian(X, j - 1, "upper")))
    a, b = lower[lower != 0], upper[upper != 0]
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))


@dataclass
class DimensionSpectrum:
    j: int
    eigenvalues: list[float]
    trivial_zero_count: int
    nontrivial: list[float]
    betti: int
    mean: float | None
    cert: ExpanderCertificate | None
    note: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cert"] = self.cert.to_dict() if self.cert else None
        return d


@dataclass
class SpectralSummary:
    n: int
    dim: int
    dims: list[DimensionSpectrum] = field(default_factory=list)

    def __getitem__(self, j: int) -> DimensionSpectrum:
        return self.dims[j + 1]

    def lambdas(self) -> list[float | None]:
        return [s.mean for s in self.dims]

    def certs(self) -> list[ExpanderCertificate | None]:
        return [s.cert for s in self.dims]

    def to_dict(self) -> dict:
        return {"n": self.n, "dim": self.dim, "spectra": [s.to_dict() for s in self.dims]}


def spectral_summary(X: SimplicialComplex, k: dict[int, float] | None = None) -> SpectralSummary:
    summary = SpectralSummary(n=X.n, dim=X.dim)
    for j in range(-1, X.dim):
        vals = _snap_zeros(eigen_symmetric(laplacian(X, j, "upper")))
        r = _rank_boundary(X, j)
        nontriv = vals[r:]
        note = None
        try:
            cert = certify_spectrum(nontriv, j, (k or {}).get(j))
        except CertificationError as exc:
            if nontriv.size == 0:
                cert = ExpanderCertificate(j=j, k=0.0, eps=0.0, vacuous=True)
            else:
                cert = None
            note = str(exc)
        summary.dims.append(
            DimensionSpectrum(
                j=j,
                eigenvalues=vals.tolist(),
                trivial_zero_count=r,
                nontrivial=nontriv.tolist(),
                betti=betti(X, j) if j >= 0 else 0,
                mean=float(nontriv.mean()) if nontriv.size else None,
                cert=cert,
                note=note,
            )
        )
    return summary


def count_lemma(X: SimplicialComplex, summary: SpectralSummary | None = None) -> dict:
    """Compare average degrees and cell counts with their spectral predictions.

    Applies when every Betti number below the top dimension vanishes; otherwise
    the report says so instead of raising.
    """
    d = X.dim
    bettis = [betti(X, j) for j in range(0, d)]
    if any(bettis):
        return {"applicable": False, "reason": f"nonzero Betti numbers below top: {bettis}"}
    summary = summary or spectral_summary(X)
    lam = {j: summary[j].mean for j in range(-1, d)}

    rows = []
    for m in range(0, d + 1):
        row: dict = {"m": m}
        if m < d:
            observed = float(X.degrees(m).mean())
            predicted = lam[m] * (1 - (m + 1) / lam[m - 1])
            row.update(avg_degree=observed, avg_degree_predicted=predicted,
                       avg_degree_abs_diff=abs(observed - predicted))
        count = lam[m - 1] / (m + 1)
        for jj in range(-1, m - 1):
            count *= lam[jj] / (jj + 2) - 1
        row.update(cells=X.num_cells(m), cells_predicted=count,
                   cells_abs_diff=abs(X.num_cells(m) - count))
        rows.append(row)
    return {"applicable": True, "lambdas": [lam[j] for j in range(-1, d)], "rows": rows}


@dataclass(frozen=True)
class ErrorOperatorReport:
    j: int
    norm: float
    bound: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.norm <= self.bound + self.tol

    def to_dict(self) -> dict:
        return {"j": self.j, "norm": self.norm, "bound": self.bound, "holds": self.holds}


def error_operator_norm(
    X: SimplicialComplex,
    j: int,
    cert_prev: ExpanderCertificate | None,
    cert_j: ExpanderCertificate | None,
    tol: float = 1e-8,
    strict: bool = True,
) -> ErrorOperatorReport:
    """Spectral norm of ``k_j I - up_j - (k_j / k_{j-1}) low_j`` against ``k_j (eps_{j-1} + eps_j)``."""
    if cert_prev is None or cert_j is None:
        raise CertificationError("error_operator_norm needs certificates at j-1 and j")
    if not (cert_prev.valid and cert_j.valid) or cert_prev.k <= 0 or cert_j.k <= 0:
        raise CertificationError(f"invalid certificates at j={j}")
    if not 0 <= j <= X.dim - 1:
        raise ValidationError(f"error_operator_norm: j={j} outside [0, {X.dim - 1}]")
    up = laplacian(X, j, "upper").toarray().astype(float)
    low = laplacian(X, j, "lower").toarray().astype(float)
    E = cert_j.k * np.eye(up.shape[0]) - up - (cert_j.k / cert_prev.k) * low
    vals = eigen_symmetric(E)
    norm = float(np.abs(vals).max(initial=0.0))
    report = ErrorOperatorReport(j=j, norm=norm, bound=cert_j.k * (cert_prev.eps + cert_j.eps), tol=tol)
    if strict and not report.holds:
        raise BoundViolation(f"||E|| = {norm} exceeds {report.bound} at j={j}")
    return report

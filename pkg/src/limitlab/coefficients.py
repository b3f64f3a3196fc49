"""Parameter bridge between the Q-tensor and director theories.

Maps the tensor-model viscosities onto Leslie coefficients and Frank
constants, and certifies dissipativity of both parameter sets.
"""

from dataclasses import dataclass, field

import numpy as np

from .bulk import BulkParams, ElasticParams, critical_s
from .errors import DegenerateGamma


@dataclass(frozen=True)
class ViscosityParams:
    """Viscosities of the inertial Q-tensor model plus inertial density J.

    beta6 - beta5 = mu2 is the tensor-level Parodi relation; the map to
    Leslie coefficients reproduces Parodi's identity exactly when it holds.
    """
    beta1: float
    beta4: float
    beta5: float
    beta6: float
    beta7: float
    mu1: float
    mu2: float
    J: float = 0.0

    @property
    def parodi_defect(self) -> float:
        return self.beta6 - self.beta5 - self.mu2


@dataclass(frozen=True)
class LeslieParams:
    """Leslie viscosities, rotational coefficients, inertia and Frank constants."""
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float
    gamma1: float
    gamma2: float
    I: float
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 0.0


@dataclass(frozen=True)
class Certificate:
    """Outcome of a dissipativity check: clause-by-clause margins."""
    ok: bool
    clauses: tuple = ()          # (name, passed, margin) triples
    notes: dict = field(default_factory=dict)

    def failed_clauses(self):
        return [name for name, passed, _ in self.clauses if not passed]

    def as_dict(self):
        return {
            "ok": self.ok,
            "clauses": [
                {"name": name, "passed": bool(passed), "margin": float(margin)}
                for name, passed, margin in self.clauses
            ],
            "notes": {k: float(v) for k, v in self.notes.items()},
        }


def map_leslie(vp: ViscosityParams, bp: BulkParams,
               ep: ElasticParams) -> LeslieParams:
    """Leslie coefficients and Frank constants induced by the tensor model.

    Uses the stable order parameter s of the bulk potential:

        alpha1 = beta1 s^2             alpha2 = mu2 s / 2 - mu1 s^2
        alpha3 = mu2 s / 2 + mu1 s^2   alpha4 = beta4 - (beta5+beta6)s/3 + 2 beta7 s^2/9
        alpha5 = beta5 s + beta7 s^2/3 alpha6 = beta6 s + beta7 s^2/3
        gamma1 = 2 mu1 s^2             gamma2 = mu2 s        I = 2 J s^2
        k1 = k3 = (2 L1 + L2 + L3) s^2 k2 = 2 L1 s^2         k4 = L3 s^2

    The Frank constants are exactly those for which the elastic energy of
    the uniaxial tensor s(nn - Id/3) equals the Oseen-Frank energy of n,
    which also makes the elastic stresses of the two models agree
    pointwise.
    """
    s = critical_s(bp)[0]
    s2 = s * s
    return LeslieParams(
        alpha1=vp.beta1 * s2,
        alpha2=0.5 * vp.mu2 * s - vp.mu1 * s2,
        alpha3=0.5 * vp.mu2 * s + vp.mu1 * s2,
        alpha4=vp.beta4 - (vp.beta5 + vp.beta6) * s / 3.0
               + 2.0 * vp.beta7 * s2 / 9.0,
        alpha5=vp.beta5 * s + vp.beta7 * s2 / 3.0,
        alpha6=vp.beta6 * s + vp.beta7 * s2 / 3.0,
        gamma1=2.0 * vp.mu1 * s2,
        gamma2=vp.mu2 * s,
        I=2.0 * vp.J * s2,
        k1=(2.0 * ep.L1 + ep.L2 + ep.L3) * s2,
        k2=2.0 * ep.L1 * s2,
        k3=(2.0 * ep.L1 + ep.L2 + ep.L3) * s2,
        k4=ep.L3 * s2,
    )


def check_qs_dissipative(vp: ViscosityParams) -> Certificate:
    """Certify that the tensor-model viscosities dissipate energy.

    Clauses: beta1, beta4, mu1 > 0; beta4 - mu2^2/(4 mu1) > 0; beta7 >= 0;
    and (beta5+beta6)^2 < 8 beta7 (beta4 - mu2^2/(4 mu1)) when beta7 != 0,
    else beta5 + beta6 = 0.  Margins are reported with strict comparison
    and zero slack.
    """
    clauses = []
    clauses.append(("beta1 > 0", vp.beta1 > 0, vp.beta1))
    clauses.append(("beta4 > 0", vp.beta4 > 0, vp.beta4))
    clauses.append(("mu1 > 0", vp.mu1 > 0, vp.mu1))
    if vp.mu1 > 0:
        gap = vp.beta4 - vp.mu2 ** 2 / (4.0 * vp.mu1)
    else:
        gap = -np.inf
    clauses.append(("beta4 - mu2^2/(4 mu1) > 0", gap > 0, gap))
    clauses.append(("beta7 >= 0", vp.beta7 >= 0, vp.beta7))
    if vp.beta7 != 0:
        margin = 8.0 * vp.beta7 * gap - (vp.beta5 + vp.beta6) ** 2
        clauses.append(
            ("(beta5+beta6)^2 < 8 beta7 (beta4 - mu2^2/(4 mu1))",
             margin > 0, margin))
    else:
        resid = vp.beta5 + vp.beta6
        clauses.append(("beta5 + beta6 = 0 (beta7 = 0)",
                        resid == 0.0, -abs(resid)))
    notes = {"parodi_defect": vp.parodi_defect}
    if vp.J > 0:
        notes["mu1_over_J"] = vp.mu1 / vp.J
    return Certificate(ok=all(p for _, p, _ in clauses),
                       clauses=tuple(clauses), notes=notes)


def check_quadratic_form(b1h: float, b2h: float, b3h: float) -> bool:
    """Non-negativity of b1|nn:D|^2 + b2|D|^2 + b3|n.D|^2 over unit n and
    symmetric traceless D.

    Holds iff b2 >= 0, 2 b2 + b3 >= 0 and 3/2 b2 + b3 + b1 >= 0.
    """
    return (b2h >= 0.0 and 2.0 * b2h + b3h >= 0.0
            and 1.5 * b2h + b3h + b1h >= 0.0)


def quadratic_form_minimum(b1h, b2h, b3h, samples=100_000, seed=0):
    """Sampled minimum of the dissipation quadratic form (oracle for
    :func:`check_quadratic_form`): random unit n, unit-norm symmetric
    traceless D."""
    rng = np.random.default_rng(seed)
    n = rng.normal(size=(samples, 3))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    m = rng.uniform(-1.0, 1.0, size=(samples, 3, 3))
    d = 0.5 * (m + np.swapaxes(m, 1, 2))
    d -= (np.einsum('sii->s', d) / 3.0)[:, None, None] * np.eye(3)
    d /= np.sqrt(np.einsum('sij,sij->s', d, d))[:, None, None]
    ndn = np.einsum('si,sij,sj->s', n, d, n)
    dn2 = np.einsum('sij,sj->si', d, n)
    dn2 = np.einsum('si,si->s', dn2, dn2)
    vals = b1h * ndn ** 2 + b2h + b3h * dn2
    return float(np.min(vals))


def check_el_dissipative(lp: LeslieParams) -> Certificate:
    """Certify the director-model energy law coefficients.

    Requires gamma1 > 0 and applies :func:`check_quadratic_form` to
    b1 = alpha1 + gamma2^2/gamma1, b2 = alpha4,
    b3 = alpha5 + alpha6 - gamma2^2/gamma1.
    """
    if lp.gamma1 == 0:
        raise DegenerateGamma("gamma1 must be nonzero")
    clauses = [("gamma1 > 0", lp.gamma1 > 0, lp.gamma1)]
    ratio = lp.gamma2 ** 2 / lp.gamma1
    b1h = lp.alpha1 + ratio
    b2h = lp.alpha4
    b3h = lp.alpha5 + lp.alpha6 - ratio
    clauses.append(("b2 >= 0", b2h >= 0, b2h))
    clauses.append(("2 b2 + b3 >= 0", 2 * b2h + b3h >= 0, 2 * b2h + b3h))
    clauses.append(("3/2 b2 + b3 + b1 >= 0", 1.5 * b2h + b3h + b1h >= 0,
                    1.5 * b2h + b3h + b1h))
    notes = {"b1_hat": b1h, "b2_hat": b2h, "b3_hat": b3h}
    return Certificate(ok=all(p for _, p, _ in clauses),
                       clauses=tuple(clauses), notes=notes)


__all__ = [
    "ViscosityParams", "LeslieParams", "Certificate", "map_leslie",
    "check_qs_dissipative", "check_quadratic_form",
    "quadratic_form_minimum", "check_el_dissipative",
]

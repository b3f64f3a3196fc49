"""Landau-de Gennes bulk potential: energy, gradient, critical points,
and the linearized operator at the uniaxial critical point.

Everything here is pointwise tensor algebra (no grid); all functions
broadcast over trailing sample axes like :mod:`limitlab.tensor_ops`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBulk, NotInRange
from .tensor_ops import (_eye_like, frobenius, mat_mul, matvec, outer,
                         sym_traceless, uniaxial)
from .tolerances import DEFAULT


@dataclass(frozen=True)
class BulkParams:
    """Bulk coefficients (a, b, c) of the isotropic-nematic potential."""
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.c < 0:
            raise DegenerateBulk("bulk coefficients must be non-negative")

    @property
    def s1(self) -> float:
        return critical_s(self)[0]


@dataclass(frozen=True)
class ElasticParams:
    """Gradient-energy constants L1, L2, L3.

    L1 > 0 and L1 + L2 + L3 > 0 keep the elastic energy strictly positive
    on non-constant fields.
    """
    L1: float = 1.0
    L2: float = 0.0
    L3: float = 0.0

    def __post_init__(self):
        if not (self.L1 > 0 and self.L1 + self.L2 + self.L3 > 0):
            raise DegenerateBulk(
                "need L1 > 0 and L1 + L2 + L3 > 0 for elastic positivity")


def critical_s(bp: BulkParams):
    """Both scalar order parameters of the uniaxial critical points.

    Returns (s1, s2) with s1 >= s2, the roots of 2c s^2 - b s - 3a = 0;
    s1 is the stable branch used throughout the package.
    """
    if bp.c <= 0:
        raise DegenerateBulk("c must be positive to form critical points")
    disc = math.sqrt(bp.b * bp.b + 24.0 * bp.a * bp.c)
    return (bp.b + disc) / (4.0 * bp.c), (bp.b - disc) / (4.0 * bp.c)


def bulk_energy(q, bp: BulkParams):
    """Bulk energy density -a/2 tr Q^2 - b/3 tr Q^3 + c/4 (tr Q^2)^2."""
    q = np.asarray(q, dtype=float)
    q2 = mat_mul(q, q)
    tr2 = np.einsum('ii...->...', q2)
    tr3 = np.einsum('ij...,ji...->...', q2, q)
    return -0.5 * bp.a * tr2 - bp.b / 3.0 * tr3 + 0.25 * bp.c * tr2 ** 2


def bulk_gradient(q, bp: BulkParams):
    """Gradient T(Q) = -aQ - bQ^2 + c|Q|^2 Q + (b/3)|Q|^2 Id of the bulk energy,
    projected onto the symmetric traceless subspace."""
    q = np.asarray(q, dtype=float)
    q2 = mat_mul(q, q)
    norm2 = frobenius(q, q)
    return (-bp.a * q - bp.b * q2 + bp.c * norm2 * q
            + (bp.b / 3.0) * norm2 * _eye_like(q))


def linearized_gradient(q0, p, bp: BulkParams):
    """Derivative of the bulk gradient at q0 applied to p.

    Valid for arbitrary q0; coincides with :func:`hn_apply` when q0 is the
    uniaxial critical point built from the same bulk parameters.
    """
    q0 = np.asarray(q0, dtype=float)
    p = np.asarray(p, dtype=float)
    mix = frobenius(q0, p)
    return (-bp.a * p - bp.b * (mat_mul(q0, p) + mat_mul(p, q0))
            + bp.c * frobenius(q0, q0) * p
            + 2.0 * mix * (bp.c * q0 + (bp.b / 3.0) * _eye_like(p)))


def _nn_contract(n, q):
    """Scalar Q:nn = n_i Q_ij n_j."""
    return np.einsum('i...,ij...,j...->...', n, q, n)


def hn_apply(n, q, bp: BulkParams, s=None):
    """Linearized bulk operator H_n at the uniaxial critical point.

    H_n(Q) = bs (Q - (nn.Q + Q.nn) + 2/3 (Q:nn) Id)
             + 2 c s^2 (Q:nn)(nn - Id/3), with s the stable order parameter.
    Annihilates tensors of the form n m + m n with m orthogonal to n.
    """
    n = np.asarray(n, dtype=float)
    q = np.asarray(q, dtype=float)
    if s is None:
        s = critical_s(bp)[0]
    nn = outer(n, n)
    qn = matvec(q, n)
    nqn = np.einsum('i...,i...->...', n, qn)
    sandwich = outer(n, qn) + outer(qn, n)  # nn.Q + Q.nn for symmetric Q
    eye = _eye_like(q)
    return (bp.b * s * (q - sandwich + (2.0 / 3.0) * nqn * eye)
            + 2.0 * bp.c * s * s * nqn * (nn - eye / 3.0))


def project_in(n, q):
    """Projection onto Ker H_n, the infinitesimal director rotations
    {n m + m n : m . n = 0}."""
    n = np.asarray(n, dtype=float)
    q = np.asarray(q, dtype=float)
    qn = matvec(q, n)
    nqn = np.einsum('i...,i...->...', n, qn)
    return outer(n, qn) + outer(qn, n) - 2.0 * nqn * outer(n, n)


def project_out(n, q):
    """Complementary projection Q - P_in(Q) onto (Ker H_n)^perp."""
    return np.asarray(q, dtype=float) - project_in(n, q)


def hn_inverse(n, q_perp, bp: BulkParams, s=None, tol=DEFAULT.subspace):
    """Inverse of H_n on (Ker H_n)^perp.

    The input is first projected onto the subspace; if the discarded part
    exceeds ``tol`` relative to the input norm, NotInRange is raised.
    """
    n = np.asarray(n, dtype=float)
    q_perp = np.asarray(q_perp, dtype=float)
    if s is None:
        s = critical_s(bp)[0]
    bs = bp.b * s
    pole = 4.0 * bp.c * s - bp.b
    if abs(bs) < 1e-12 or abs(pole) < 1e-12 * max(abs(bp.b), abs(bp.c * s)):
        raise DegenerateBulk("H_n inverse undefined: bs (4cs - b) vanishes")

    projected = project_out(n, q_perp)
    discarded = np.sqrt(np.max(frobenius(q_perp - projected,
                                         q_perp - projected)))
    scale = np.sqrt(np.max(frobenius(q_perp, q_perp)))
    if scale > 0 and discarded > tol * scale:
        raise NotInRange(
            f"input has relative in-kernel part {discarded / scale:.3e}")

    q = projected
    qn = matvec(q, n)
    nqn = np.einsum('i...,i...->...', n, qn)
    sandwich = outer(n, qn) + outer(qn, n)
    eye = _eye_like(q)
    first = (q - sandwich + (2.0 / 3.0) * nqn * eye) / bs
    second = ((4.0 * bp.b + 2.0 * bp.c * s) / (bs * pole)
              * nqn * (outer(n, n) - eye / 3.0))
    return first + second


def critical_tensor(n, bp: BulkParams):
    """Stable uniaxial critical point s1 (nn - Id/3)."""
    return uniaxial(n, critical_s(bp)[0])


def molecular_field_bulk(q, bp: BulkParams, eps: float):
    """Pointwise part -T(Q)/eps of the molecular field."""
    from .errors import BadEpsilon
    if eps <= 0:
        raise BadEpsilon("eps must be positive")
    return -bulk_gradient(q, bp) / eps


__all__ = [
    "BulkParams", "ElasticParams", "critical_s", "bulk_energy",
    "bulk_gradient", "linearized_gradient", "hn_apply", "hn_inverse",
    "project_in", "project_out", "critical_tensor", "molecular_field_bulk",
    "sym_traceless",
]

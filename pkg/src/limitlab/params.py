"""Combined material parameter bundle for the Q-tensor model runs."""

from dataclasses import dataclass, field

from .bulk import BulkParams, ElasticParams, critical_s
from .coefficients import (LeslieParams, ViscosityParams, check_qs_dissipative,
                           map_leslie)
from .errors import BadEpsilon


@dataclass(frozen=True)
class MaterialParams:
    """Bulk, elastic and viscous constants plus the small parameter eps."""
    bulk: BulkParams = field(default_factory=BulkParams)
    elastic: ElasticParams = field(default_factory=ElasticParams)
    visc: ViscosityParams = field(default_factory=lambda: ViscosityParams(
        beta1=1.0, beta4=2.0, beta5=0.5, beta6=2.5, beta7=1.0,
        mu1=2.0, mu2=2.0, J=0.1))
    eps: float = 0.1

    def __post_init__(self):
        if self.eps <= 0:
            raise BadEpsilon("eps must be positive")

    @property
    def s1(self) -> float:
        return critical_s(self.bulk)[0]

    def leslie(self) -> LeslieParams:
        return map_leslie(self.visc, self.bulk, self.elastic)

    def certificate(self):
        return check_qs_dissipative(self.visc)

    def with_eps(self, eps: float) -> "MaterialParams":
        return MaterialParams(bulk=self.bulk, elastic=self.elastic,
                              visc=self.visc, eps=eps)

# levy_sysid/noise/families/cgmy.py
"""
CGMY (tempered stable) increments, characteristic function only.

Lévy measure ν(dx) = C e^{−G|x|}/|x|^{1+Y} dx for x < 0 and
C e^{−Mx}/x^{1+Y} dx for x > 0, with characteristic exponent

    ψ(u) = C Γ(−Y) ((M − iu)^Y − M^Y + (G + iu)^Y − G^Y).

The increment over h is centered by the analytic mean
m_h = h C Γ(1−Y) (M^{Y−1} − G^{Y−1}). No sampler is provided; moments come
from numerical differentiation of log φ at the origin.

The α-stable law is the untempered limit G = M = 0 with Lévy measure
C_± |x|^{−1−α} dx. Its increments have infinite variance and it is not
implemented.
"""
from typing import Tuple

import numpy as np
from scipy import special

from levy_sysid.exceptions import NumericalInstabilityError, ParameterDomainError
from levy_sysid.models.noise_params import NoiseKind, NoiseParams
from levy_sysid.noise.base import NoiseFamily

Y_GUARD = 1e-3
Y_GRAD_GUARD = 1e-2


def gamma_neg(y: float) -> float:
    """Γ(−y) by reflection, 0 < y < 2, y ≠ 1."""
    return -np.pi / (np.sin(np.pi * y) * special.gamma(1.0 + y))


class CgmyFamily(NoiseFamily):
    """η = (C, G, M, Y)."""

    kind = NoiseKind.CGMY

    def check_domain(self, model: NoiseParams) -> None:
        self._require_dim(model, 4)
        c, g, m, y = model.eta
        self._require_positive("C", c)
        self._require_positive("G", g)
        self._require_positive("M", m)
        if not (0.0 < y < 2.0):
            raise ParameterDomainError("Y", y, "must lie in (0, 2)")
        if abs(y - 1.0) < Y_GUARD:
            raise ParameterDomainError("Y", y, f"must keep distance {Y_GUARD} from 1")

    def _mean(self, model: NoiseParams) -> float:
        c, g, m, y = model.eta
        gamma_1my = -y * gamma_neg(y)
        return model.h * c * gamma_1my * (m ** (y - 1.0) - g ** (y - 1.0))

    def _bracket(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        _, g, m, y = model.eta
        return (m - 1j * u) ** y - m**y + (g + 1j * u) ** y - g**y

    def log_cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        c, _, _, y = model.eta
        return model.h * c * gamma_neg(y) * self._bracket(model, u) - 1j * u * self._mean(model)

    def cf(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        return np.exp(self.log_cf(model, u))

    def cf_grad_eta(self, model: NoiseParams, u: np.ndarray) -> np.ndarray:
        c, g, m, y = model.eta
        if y < Y_GRAD_GUARD or abs(y - 1.0) < Y_GRAD_GUARD:
            raise NumericalInstabilityError(
                "cgmy Y-derivative", f"Y={y} is too close to a pole of Γ(−Y)"
            )
        h = model.h
        gn = gamma_neg(y)
        g1 = -y * gn
        bracket = self._bracket(model, u)
        iu = 1j * u

        # mean correction and its partial derivatives
        diff = m ** (y - 1.0) - g ** (y - 1.0)
        mean = h * c * g1 * diff
        dmean_dc = mean / c
        dmean_dg = -h * c * g1 * (y - 1.0) * g ** (y - 2.0)
        dmean_dm = h * c * g1 * (y - 1.0) * m ** (y - 2.0)
        dg1_dy = -g1 * special.digamma(1.0 - y)
        dmean_dy = h * c * (
            dg1_dy * diff + g1 * (m ** (y - 1.0) * np.log(m) - g ** (y - 1.0) * np.log(g))
        )

        d_c = h * gn * bracket - iu * dmean_dc
        d_g = h * c * gn * y * ((g + iu) ** (y - 1.0) - g ** (y - 1.0)) - iu * dmean_dg
        d_m = h * c * gn * y * ((m - iu) ** (y - 1.0) - m ** (y - 1.0)) - iu * dmean_dm
        dgn_dy = -gn * special.digamma(-y)
        d_bracket_dy = (
            (m - iu) ** y * np.log(m - iu)
            - m**y * np.log(m)
            + (g + iu) ** y * np.log(g + iu)
            - g**y * np.log(g)
        )
        d_y = h * c * (dgn_dy * bracket + gn * d_bracket_dy) - iu * dmean_dy

        phi = self.cf(model, u)
        return np.column_stack((d_c, d_g, d_m, d_y)) * phi[:, None]

    def cumulants(self, model: NoiseParams) -> Tuple[float, float]:
        k1, k2, k4 = self.numerical_cumulants(model)
        return k2, k4

    def numerical_cumulants(self, model: NoiseParams) -> Tuple[float, float, float]:
        """
        κ₁, κ₂, κ₄ from Taylor coefficients of log φ at the origin.

        Re log φ(u) = −κ₂u²/2 + κ₄u⁴/24 − κ₆u⁶/720 + … and
        Im log φ(u) = κ₁u − κ₃u³/6 + κ₅u⁵/120 − …; three points jδ fix the
        first three coefficients of each series.
        """
        def solve(delta: float) -> Tuple[float, float, float]:
            pts = delta * np.arange(1.0, 4.0)
            values = self.log_cf(model, pts)
            even = np.column_stack((-pts**2 / 2.0, pts**4 / 24.0, -pts**6 / 720.0))
            odd = np.column_stack((pts, -pts**3 / 6.0, pts**5 / 120.0))
            k2, k4, _ = np.linalg.solve(even, values.real)
            k1, _, _ = np.linalg.solve(odd, values.imag)
            return float(k1), float(k2), float(k4)

        _, k2, _ = solve(1e-2)
        return solve(0.1 / np.sqrt(abs(k2)))

    def closed_form_cumulant(self, model: NoiseParams, order: int) -> float:
        """κ_n = hCΓ(n−Y)(M^{Y−n} + (−1)^n G^{Y−n}), n >= 2."""
        c, g, m, y = model.eta
        return float(
            model.h * c * special.gamma(order - y)
            * (m ** (y - order) + (-1.0) ** order * g ** (y - order))
        )

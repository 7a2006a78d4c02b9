# levy_sysid/noise/families/__init__.py
"""
Built-in increment-law families.
"""
from typing import List

from levy_sysid.noise.base import NoiseFamily
from levy_sysid.noise.families.cgmy import CgmyFamily
from levy_sysid.noise.families.compound_poisson import CompoundPoissonGaussianFamily
from levy_sysid.noise.families.gaussian import GaussianFamily
from levy_sysid.noise.families.mixture import GaussianMixtureFamily
from levy_sysid.noise.families.variance_gamma import VarianceGammaFamily


def default_families() -> List[NoiseFamily]:
    return [
        GaussianFamily(),
        GaussianMixtureFamily(),
        CompoundPoissonGaussianFamily(),
        VarianceGammaFamily(),
        CgmyFamily(),
    ]


__all__ = [
    "default_families",
    "CgmyFamily",
    "CompoundPoissonGaussianFamily",
    "GaussianFamily",
    "GaussianMixtureFamily",
    "VarianceGammaFamily",
]

"""
Built-in family registry.

@help.category Models
@help.title Family Registry
@help.description Maps configuration ids to the built-in parametric families.
"""
from src.models.base import ParametricFamily
from src.models.exponential import BernoulliNatural, GaussianLocation
from src.models.location import LaplaceLocation

FAMILIES = {
    "gaussian": GaussianLocation,
    "bernoulli": BernoulliNatural,
    "laplace": LaplaceLocation,
}


def get_family(family_id: str, dim: int = 1) -> ParametricFamily:
    """
    Build a built-in family by id.

    @help.title Family Factory
    @help.description Ids: "gaussian" (d in 1..3), "bernoulli" (d = 1), "laplace" (d in 1..2).
    @help.example
        family = get_family("gaussian", dim=2)
    """
    try:
        factory = FAMILIES[family_id.lower()]
    except KeyError:
        raise ValueError(f"Unsupported family: {family_id}. Supported: {', '.join(FAMILIES)}") from None
    return factory(dim)

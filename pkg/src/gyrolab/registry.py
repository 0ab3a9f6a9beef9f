"""Model specs: ``zn:<n>``, ``klein``, ``mobius`` or a Cayley table file, and
the JSON model descriptions embedded in reports."""

from __future__ import annotations

from gyrolab.core import GyroModel
from gyrolab.hm import HMModel
from gyrolab.models import CayleyGyrogroup, MobiusDisk, cayley_load, cyclic, klein


def parse_model_spec(spec: str, tolerance: float | None = None) -> GyroModel:
    if spec.startswith("zn:"):
        try:
            n = int(spec[3:])
        except ValueError:
            raise ValueError(f"bad model spec {spec!r}: order must be an integer") from None
        if n < 1:
            raise ValueError(f"bad model spec {spec!r}: order must be positive")
        return cyclic(n)
    if spec == "klein":
        return klein()
    if spec == "mobius":
        return MobiusDisk() if tolerance is None else MobiusDisk(tolerance=tolerance)
    return cayley_load(spec)


def model_from_json(obj: dict) -> GyroModel:
    if "base" in obj:
        return HMModel(model_from_json(obj["base"]))
    if "table" in obj:
        return CayleyGyrogroup(tuple(tuple(r) for r in obj["table"]), obj.get("name", "cayley"))
    if obj.get("name") == "mobius":
        return MobiusDisk(tolerance=obj.get("tolerance", 1e-9), rho_max=obj.get("rho_max", 0.999))
    raise ValueError(f"cannot rebuild model from {obj!r}")

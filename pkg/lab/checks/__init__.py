# lab/checks/__init__.py
from lab.checks.mean_value import MeanValueCheck
from lab.checks.order_limit import OrderLimitCheck
from lab.checks.monotonicity import MonotonicityCheck
from lab.checks.cylinder import CylinderCheck
from lab.checks.isoperimetric import IsoperimetricCheck
from lab.checks.poincare import PoincareCheck
from lab.checks.energy_quantization import EnergyQuantizationCheck
from lab.checks.mass_identity import MassIdentityCheck

CHECKS = {cls.check_name: cls for cls in (
    MeanValueCheck, OrderLimitCheck, MonotonicityCheck, CylinderCheck,
    IsoperimetricCheck, PoincareCheck, EnergyQuantizationCheck, MassIdentityCheck,
)}

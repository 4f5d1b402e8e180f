# lab/checks/monotonicity.py
from lab.checks.order_limit import OrderLimitCheck
from lab.inequality_lab import monotonicity_profile


class MonotonicityCheck(OrderLimitCheck):
    """
    Profil de monotonie R(δ) = E/(πδ²) sur le corpus.

    Critère :
    - R(δ_min) ≥ ord_x·0.95 ; la constante C est ajustée, pas exigée
    """

    check_name = "monotonicity"
    default_deltas = (0.02, 0.01, 0.005, 0.0025)

    def measure(self, curve, target, deltas):
        return monotonicity_profile(curve, target, deltas)


if __name__ == "__main__":
    MonotonicityCheck.main()

# lab/checks/poincare.py
from lab.base_check import BaseCheck
from lab.inequality_lab import poincare_check, combine_reports


class PoincareCheck(BaseCheck):
    """
    Inégalité de Poincaré sur des polynômes trigonométriques de moyenne nulle (K = 8).

    Critères :
    - accord coefficients/quadrature à 1e-8
    - ∫|f|² ≤ ∫|f'|²
    """

    check_name = "poincare"

    def evaluate(self):
        order = int(self.params.get("K", 8))
        reports = [poincare_check(a) for a in self.corpus.trig_polynomials(order)]
        ratios = [r.fit["ratio"] for r in reports if r.fit["ratio"] is not None]
        return combine_reports(self.check_name, reports, {"max_ratio": max(ratios, default=None)})


if __name__ == "__main__":
    PoincareCheck.main()

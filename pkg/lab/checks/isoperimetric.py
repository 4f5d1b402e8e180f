# lab/checks/isoperimetric.py
from utils.config import Config
from lab.base_check import BaseCheck
from lab.corpus import shrink_to_diameter
from lab.inequality_lab import isoperimetric_report, combine_reports, map_in_order

RADII = (0.1, 0.05, 0.02)


class IsoperimetricCheck(BaseCheck):
    """
    Rapport isopérimétrique E(B_r)/ℓ(γ_r)² sur le corpus.

    Critère :
    - rapport ≤ 1.1/(4π) pour r ≤ 0.1
    """

    check_name = "isoperimetric"

    def prepare(self):
        radii = self.params.get("radii", RADII)
        cap = 0.9 * Config.IMAGE_DIAMETER_CAP
        self.curves = [shrink_to_diameter(c, max(radii), cap)[0] for c in self.corpus.curves()]

    def evaluate(self):
        radii = self.params.get("radii", RADII)
        reports = map_in_order(lambda c: isoperimetric_report(c, 0j, radii), self.curves)
        worst = max((r.fit["normalized_max"] for r in reports), default=0.0)
        return combine_reports(self.check_name, reports, {"max_ratio_times_4pi": worst})


if __name__ == "__main__":
    IsoperimetricCheck.main()

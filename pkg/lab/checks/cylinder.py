# lab/checks/cylinder.py
import math
from utils.config import Config
from lab.base_check import BaseCheck
from lab.corpus import shrink_to_diameter
from lab.inequality_lab import cylinder_decay_fit, combine_reports, map_in_order, DEFAULT_T_VALUES


class CylinderCheck(BaseCheck):
    """
    Décroissance de l'énergie sur les cylindres e^{-6} ≤ |z| ≤ 1.

    Chaque courbe est contractée jusqu'à ce que l'image du disque unité soit
    de diamètre ≤ 0.9·IMAGE_DIAMETER_CAP.

    Critère :
    - pente de log E en T ≤ −0.9
    """

    check_name = "cylinder"

    def prepare(self):
        cap = 0.9 * Config.IMAGE_DIAMETER_CAP
        self.curves = [shrink_to_diameter(c, 1.0, cap)[0] for c in self.corpus.curves()]

    def evaluate(self):
        r_in = self.params.get("r_in", math.exp(-6))
        T_values = self.params.get("T_values", DEFAULT_T_VALUES)
        reports = map_in_order(lambda c: cylinder_decay_fit(c, 0j, r_in, 1.0, T_values), self.curves)
        slopes = [r.fit["slope"] for r in reports if r.fit.get("slope") is not None]
        return combine_reports(self.check_name, reports, {"max_slope": max(slopes) if slopes else None})


if __name__ == "__main__":
    CylinderCheck.main()

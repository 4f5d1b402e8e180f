# lab/checks/order_limit.py
import numpy as np
from lab.base_check import BaseCheck
from lab.corpus import unit_disk
from lab.inequality_lab import order_limit_check, combine_reports, map_in_order


class OrderLimitCheck(BaseCheck):
    """
    Limite E(préimage de B_δ(x))/(πδ²) → ord_x sur le corpus.

    La cible x est l'image d'un point tiré uniformément dans le disque unité.

    Critère :
    - rapport au plus petit δ à 5 % de l'ordre algébrique
    """

    check_name = "order-limit"
    default_deltas = (0.004, 0.002, 0.001)

    def prepare(self):
        self.curves = self.corpus.curves()
        rng = np.random.default_rng(self.seed + 1)
        self.targets = [c.evaluate(z) for c, z in zip(self.curves, unit_disk(rng, len(self.curves)))]

    def measure(self, curve, target, deltas):
        return order_limit_check(curve, target, deltas)

    def evaluate(self):
        deltas = self.params.get("deltas", self.default_deltas)
        reports = map_in_order(lambda item: self.measure(item[0], item[1], deltas),
                               zip(self.curves, self.targets))
        return combine_reports(self.check_name, reports)


if __name__ == "__main__":
    OrderLimitCheck.main()

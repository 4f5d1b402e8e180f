# lab/checks/energy_quantization.py
from lab.base_check import BaseCheck
from lab.inequality_lab import energy_quantization, combine_reports, map_in_order


class EnergyQuantizationCheck(BaseCheck):
    """
    Énergie totale = degré ≥ ħ pour chaque courbe du corpus.
    """

    check_name = "energy-quantization"

    def evaluate(self):
        hbar = self.params.get("hbar")
        reports = map_in_order(lambda c: energy_quantization(c, hbar), self.corpus.curves())
        worst = max((abs(r.fit["error"]) for r in reports), default=0.0)
        return combine_reports(self.check_name, reports, {"max_error": worst})


if __name__ == "__main__":
    EnergyQuantizationCheck.main()

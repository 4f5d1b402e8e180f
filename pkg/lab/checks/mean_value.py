# lab/checks/mean_value.py
from lab.base_check import BaseCheck
from lab.inequality_lab import mean_value_report


class MeanValueCheck(BaseCheck):
    """
    Inégalité de la moyenne sur le corpus.

    Critère :
    - 2ρ(0)·πR²/(16·E(B_R)) ≤ 1 dès que E(B_R) ≤ energy_cap (0.1)
    """

    check_name = "mean-value"

    def evaluate(self):
        return mean_value_report(self.corpus, R=self.params.get("R", 1.0),
                                 energy_cap=self.params.get("energy_cap"))


if __name__ == "__main__":
    MeanValueCheck.main()

# lab/checks/mass_identity.py
import numpy as np
from lab.base_check import BaseCheck
from lab.corpus import planted_family
from lab.inequality_lab import mass_identity, combine_reports


class MassIdentityCheck(BaseCheck):
    """
    Masses des familles plantées (d ≤ 4, n ≤ 3) contre les multiplicités algébriques.

    Critères :
    - points plantés retrouvés à τ_pt
    - masses à MASS_TOL des multiplicités
    - somme des degrés de l'arbre de bulles = d
    """

    check_name = "mass-identity"

    def prepare(self):
        rng = np.random.default_rng(self.seed)
        self.families = []
        for _ in range(self.samples):
            degree = int(rng.integers(1, 5))
            n = int(rng.integers(2, 4))
            self.families.append(planted_family(rng, degree, n))
        self.logger.info(f"{len(self.families)} familles plantées générées")

    def evaluate(self):
        build_tree = bool(self.params.get("build_tree", True))
        reports = [mass_identity(p, self.params.get("mass_tol"), build_tree) for p in self.families]
        return combine_reports(self.check_name, reports)


if __name__ == "__main__":
    MassIdentityCheck.main()

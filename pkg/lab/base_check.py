# lab/base_check.py
import sys
from utils.config import Config
from utils.errors import GromovError
from utils.logging_utils import setup_logger
from utils.serialization import dumps
from lab.corpus import Corpus


class BaseCheck:
    """Classe de base pour toutes les vérifications du laboratoire"""

    check_name = None

    def __init__(self, seed=None, samples=None, params=None):
        self.seed = Config.VERIFY_SEED if seed is None else int(seed)
        self.samples = Config.VERIFY_SAMPLES if samples is None else int(samples)
        self.params = dict(params or {})
        self.corpus = None
        self.logger = setup_logger(f"lab.{self.check_name}")
        self.logger.info(f"Vérification {self.check_name} initialisée (graine {self.seed}, {self.samples} échantillons)")

    def setup(self):
        """Configuration initiale : corpus et préparation spécifique"""
        try:
            self.corpus = Corpus(seed=self.seed, count=self.samples)
            self.prepare()
            self.logger.info(f"Configuration de la vérification {self.check_name} terminée")
        except GromovError as e:
            self.logger.error(f"Erreur lors de la configuration: {e}")
            raise

    def prepare(self):
        """Préparer les données spécifiques de la vérification (à surcharger)"""
        pass

    def evaluate(self):
        """Calcul du rapport (à surcharger)"""
        raise NotImplementedError(f"evaluate() non implémentée pour {self.check_name}")

    def run(self):
        """
        Exécuter la vérification

        Returns:
            FitReport: rapport agrégé
        """
        self.setup()
        self.logger.info(f"Vérification {self.check_name} démarrée")
        try:
            report = self.evaluate()
        except GromovError as e:
            self.logger.error(f"Erreur pendant la vérification: {e}")
            raise
        finally:
            self.cleanup()
        if report.passed:
            self.logger.info(f"Vérification {self.check_name} réussie")
        else:
            failed = [name for name, ok in report.assertions.items() if not ok]
            self.logger.warning(f"Vérification {self.check_name} en échec : {failed}")
        return report

    def cleanup(self):
        self.logger.info(f"Vérification {self.check_name} terminée")

    @classmethod
    def main(cls):
        """Point d'entrée autonome : rapport JSON sur la sortie standard, code 0 si tout passe"""
        try:
            report = cls().run()
        except GromovError as e:
            print(str(e), file=sys.stderr)
            sys.exit(e.exit_code)
        print(dumps(report))
        sys.exit(0 if report.passed else 1)

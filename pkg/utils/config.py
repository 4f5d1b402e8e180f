# utils/config.py
import os
from dotenv import load_dotenv

# Charger les variables d'environnement du fichier .env
load_dotenv()

class Config:
    # Configuration générale
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_DIR = os.getenv('LOG_DIR', '')

    # Tolérances algébriques
    TAU_PT = float(os.getenv('TAU_PT', '1e-6'))
    TAU_ROOT = float(os.getenv('TAU_ROOT', '1e-6'))
    ROOT_NOISE = float(os.getenv('ROOT_NOISE', '1e-12'))

    # Quadrature
    QUAD_TOL = float(os.getenv('QUAD_TOL', '1e-7'))
    CELL_CAP = int(os.getenv('CELL_CAP', str(2 ** 20)))
    SUP_GRID = int(os.getenv('SUP_GRID', '64'))

    # Analyse des bulles
    LIMIT_TOL = float(os.getenv('LIMIT_TOL', '1e-6'))
    HBAR = float(os.getenv('HBAR', '1.0'))
    MASS_TOL = float(os.getenv('MASS_TOL', '0.05'))
    CONNECT_TOL = float(os.getenv('CONNECT_TOL', '1e-3'))

    # Laboratoire d'inégalités
    ENERGY_CAP = float(os.getenv('ENERGY_CAP', '0.1'))
    IMAGE_DIAMETER_CAP = float(os.getenv('IMAGE_DIAMETER_CAP', '0.2'))
    VERIFY_SEED = int(os.getenv('VERIFY_SEED', '7'))
    VERIFY_SAMPLES = int(os.getenv('VERIFY_SAMPLES', '200'))
    MAX_WORKERS = int(os.getenv('MAX_WORKERS', '1'))

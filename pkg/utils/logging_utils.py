# utils/logging_utils.py
import logging
import os
import sys
from datetime import datetime
from utils.config import Config

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

def setup_logger(name):
    """
    Configure et retourne un logger pour un point d'entrée (commande, vérification).

    La sortie standard est réservée aux rapports JSON : la console reçoit les
    logs sur stderr. Un fichier journalier est ajouté si LOG_DIR est défini.
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))

    # Un appel répété ne doit pas dupliquer les handlers
    if logger.handlers:
        return logger

    log_format = logging.Formatter(LOG_FORMAT)

    # Handler pour la console
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_format)
    logger.addHandler(console_handler)

    # Handler pour le fichier
    if Config.LOG_DIR:
        os.makedirs(Config.LOG_DIR, exist_ok=True)
        today = datetime.now().strftime('%Y-%m-%d')
        file_handler = logging.FileHandler(os.path.join(Config.LOG_DIR, f'{name}_{today}.log'))
        file_handler.setFormatter(log_format)
        logger.addHandler(file_handler)

    return logger

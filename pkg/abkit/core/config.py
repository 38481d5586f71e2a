import os
from dotenv import load_dotenv

BASE_DIR = os.path.abspath(os.path.dirname(__file__))
env_path = os.path.join(BASE_DIR, "..", "..", "abkit.env")
load_dotenv(dotenv_path=env_path)

class Config:
    ABKIT_THREADS = max(1, int(os.getenv("ABKIT_THREADS", "1")))
    ABKIT_LOG_LEVEL = os.getenv("ABKIT_LOG_LEVEL", "WARNING")
    ABKIT_RANDOM_SEED = int(os.getenv("ABKIT_RANDOM_SEED", "20240601"))
    DEFAULT_MAX_DEGREE = int(os.getenv("ABKIT_DEFAULT_MAX_DEGREE", "30"))
    DEFAULT_B_ORDER = int(os.getenv("ABKIT_DEFAULT_B_ORDER", "8"))
    DEFAULT_PARAM_ORDER = int(os.getenv("ABKIT_DEFAULT_PARAM_ORDER", "2"))
    DEFAULT_MAX_STEPS = int(os.getenv("ABKIT_DEFAULT_MAX_STEPS", "8"))
    JSON_SORT_KEYS = True

import logging
import os

LOG_DIR = os.environ.get("DIVLAT_LOG_DIR", "logs")
os.makedirs(LOG_DIR, exist_ok=True)

logging = logging

logging.basicConfig(
    filename=os.path.join(LOG_DIR, "divlat.log"),
    encoding="utf-8",
    format="%(asctime)s:%(levelname)s:%(message)s",
    level=logging.DEBUG,
)

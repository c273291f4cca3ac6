"""CIM-TPU Simulator - Latency and energy of transformer inference on TPUs with digital or CIM matrix units."""
from loguru import logger

# Library use stays quiet; the CLI turns logging back on
logger.disable("src")

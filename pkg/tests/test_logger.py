from loguru import logger

from app.dependencies import apply_run_config
from app.schemas.run_config import RunConfig
from utils.logger import LOG_FORMAT, init_logger, set_log_level

def test_service_name_survives_run_config():
    service_logger = init_logger("PhaseSpaceService")
    apply_run_config(RunConfig.assemble("sigma", {"log_level": "INFO"}, {}))
    records = []
    sink = logger.add(records.append, format=LOG_FORMAT, level="INFO")
    try:
        service_logger.info("fold located")
        logger.info("unbound record")
    finally:
        logger.remove(sink)
        set_log_level("WARNING")
    assert len(records) == 2
    assert "| PhaseSpaceService |" in records[0]
    assert "| Ising2mm |" in records[1]

import numpy as np
import pytest
from dotenv import load_dotenv


@pytest.fixture(scope="session", autouse=True)
def load_environment_variables():
    """Load environment variables from .env file for the test session."""
    load_dotenv(".env.test", override=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def log_messages():
    """Messages logged through loguru at WARNING level or above during the test."""
    from batm.utils.logger import logger

    messages: list[str] = []
    handler_id = logger.add(lambda m: messages.append(m.record["message"]), level="WARNING")
    yield messages
    logger.remove(handler_id)

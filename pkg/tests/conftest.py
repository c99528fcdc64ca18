import logging

import pytest


@pytest.fixture(autouse=True)
def reset_toolkit_loggers():
    yield
    # CLI runs bind stderr handlers to the capture stream of the test that made them
    for name in ("clockinterf", "src"):
        logger = logging.getLogger(name)
        logger.handlers.clear()
        logger.propagate = True
